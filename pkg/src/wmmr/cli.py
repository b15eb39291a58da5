"""Command-line driver: ``wmmr check`` and ``wmmr crosscheck``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .events import STAR, format_structure, to_dot
from .gen import Shape, crosscheck
from .litmus import LitmusError, LitmusTest, corpus_names, iter_paths, load_corpus, load_file
from .promising import check_outcome, explore, format_memory, format_trace
from .proof import CALCULI, check_reachable, render_witness, revalidate

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_ERROR = 2
EXIT_UNKNOWN = 3

ENGINES = ("both", "op", "proof")
UNKNOWN = "bounded-unknown"


@dataclass(frozen=True)
class RunConfig:
    engine: str = "both"
    unroll: int = 2
    max_memory: int | None = None
    output: str = "text"
    witness: bool = False
    strict: bool = False
    calculus: str = "base"
    all_outcomes: bool = False
    jobs: int = 1

    def to_json(self) -> dict:
        return {
            "engine": self.engine, "unroll": self.unroll, "max_memory": self.max_memory,
            "witness": self.witness, "strict": self.strict, "calculus": self.calculus,
        }


@dataclass
class TestReport:
    name: str
    source: str
    outcome: str
    expected: str
    verdicts: dict = field(default_factory=dict)      # engine -> verdict
    reasons: dict = field(default_factory=dict)       # engine -> incompleteness reasons
    outcomes: dict = field(default_factory=dict)      # engine -> sorted valuations
    agree: bool = True
    passed: bool = True
    witness: dict = field(default_factory=dict)
    witness_text: str = ""
    seconds: float = 0.0

    @property
    def unknown(self) -> bool:
        return UNKNOWN in self.verdicts.values()

    def to_json(self) -> dict:
        out = {
            "name": self.name, "source": self.source, "outcome": self.outcome,
            "expected": self.expected, "verdicts": self.verdicts, "agree": self.agree,
            "pass": self.passed, "seconds": round(self.seconds, 4),
        }
        if self.reasons:
            out["incomplete_reasons"] = self.reasons
        if self.outcomes:
            out["outcomes"] = {k: [dict(v) for v in vs] for k, vs in self.outcomes.items()}
        if self.witness:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    config: RunConfig
    tests: list = field(default_factory=list)
    errors: list = field(default_factory=list)     # {"source", "message", "line", "column"}

    def exit_code(self) -> int:
        if any(not t.passed for t in self.tests):
            return EXIT_MISMATCH
        if self.errors:
            return EXIT_ERROR
        if self.config.strict and any(t.unknown for t in self.tests):
            return EXIT_UNKNOWN
        return EXIT_OK

    def to_json(self) -> dict:
        return {
            "tool": "wmmr",
            "version": __version__,
            "config": self.config.to_json(),
            "tests": [t.to_json() for t in self.tests],
            "errors": self.errors,
            "summary": {
                "tests": len(self.tests),
                "passed": sum(t.passed for t in self.tests),
                "mismatches": sum(not t.passed for t in self.tests),
                "bounded_unknown": sum(t.unknown for t in self.tests),
                "errors": len(self.errors),
            },
            "exit_code": self.exit_code(),
        }


def _op_witness(trace, final) -> dict:
    return {"trace": [str(l) for l in trace], "memory": format_memory(final.memory),
            "registers": final.valuation()}


def _proof_witness(w) -> dict:
    cfg = w.config
    return {
        "outlines": [
            {"thread": o.tid, "steps": [{"rule": s.rule, "assertion": format_structure(s.post)} for s in o.steps]}
            for o in w.outlines
        ],
        "configuration": [f"{_tuple(ev)}: {cfg.structure.labels[ev]}" for ev in cfg.config],
        "order": [_tuple(e) for e in cfg.order],
        "registers": w.final.valuation(),
        "memory": format_memory(w.final.memory),
        "dot": to_dot(cfg.structure, name="configuration"),
    }


def _tuple(ev) -> str:
    return "(" + ",".join("*" if x is STAR else str(x) for x in ev) + ")"


def check_test(test: LitmusTest, config: RunConfig, source: str = "") -> TestReport:
    """Run the configured engines on one test."""
    rep = TestReport(test.name, source, str(test.outcome), test.expected)
    start = time.perf_counter()
    text = []
    if config.engine in ("both", "op"):
        res = explore(test, config.unroll, config.max_memory)
        v = check_outcome(res, test.outcome)
        rep.verdicts["op"] = v.label
        if res.incomplete:
            rep.reasons["op"] = res.reasons
        if config.all_outcomes:
            rep.outcomes["op"] = sorted(res.valuations())
        if config.witness and v.reachable:
            rep.witness["op"] = _op_witness(v.witness, v.final)
            text.append("operational trace:\n" + format_trace(v.witness)
                        + f"\nfinal memory: {format_memory(v.final.memory)}")
    if config.engine in ("both", "proof"):
        res = check_reachable(test, config.unroll, full=config.all_outcomes, calculus=config.calculus)
        rep.verdicts["proof"] = res.verdict
        if res.incomplete:
            rep.reasons["proof"] = res.reasons
        if config.all_outcomes:
            rep.outcomes["proof"] = sorted(res.valuations)
        if res.witness is not None:
            problems = revalidate(test, res.witness, config.unroll)
            if problems:
                rep.reasons.setdefault("proof", []).extend(f"witness re-check: {p}" for p in problems)
            if config.witness:
                rep.witness["proof"] = _proof_witness(res.witness)
                text.append("proof witness:\n" + render_witness(test, res.witness))
    rep.seconds = time.perf_counter() - start
    rep.witness_text = "\n\n".join(text)
    definite = {v for v in rep.verdicts.values() if v != UNKNOWN}
    rep.agree = len(definite) <= 1 and not any("witness re-check" in r for rs in rep.reasons.values() for r in rs)
    if config.all_outcomes and len(rep.outcomes) == 2 and not rep.reasons:
        rep.agree = rep.agree and rep.outcomes["op"] == rep.outcomes["proof"]
    rep.passed = rep.agree and (test.expected == "unspecified" or definite <= {test.expected})
    return rep


def _load(source: str) -> LitmusTest:
    if source.startswith("corpus:"):
        return load_corpus()[source[len("corpus:"):]]
    return load_file(source)


def _job(args) -> tuple:
    source, config = args
    try:
        test = _load(source)
    except (LitmusError, OSError, UnicodeDecodeError) as exc:
        return source, None, _error(source, exc)
    return source, check_test(test, config, source), None


def _error(source: str, exc: Exception) -> dict:
    out = {"source": source, "message": getattr(exc, "message", str(exc))}
    if isinstance(exc, LitmusError):
        out["line"] = exc.line
        out["column"] = exc.col
    return out


def run(config: RunConfig, paths: list) -> tuple[Report, int]:
    """Check every test under ``paths``; ``corpus`` names the built-in corpus."""
    sources = []
    report = Report(config)
    for p in paths:
        if str(p) == "corpus":
            sources += [f"corpus:{n}" for n in corpus_names()]
        elif not Path(p).exists():
            report.errors.append({"source": str(p), "message": "no such file or directory"})
        else:
            sources += [str(q) for q in iter_paths([p])]
    jobs = [(s, config) for s in sources]
    if config.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_job, jobs))
    else:
        results = [_job(j) for j in jobs]
    for source, rep, err in results:
        if err is not None:
            report.errors.append(err)
        else:
            report.tests.append(rep)
    report.tests.sort(key=lambda t: (t.name, t.source))
    report.errors.sort(key=lambda e: e["source"])
    return report, report.exit_code()


def format_report(report: Report) -> str:
    lines = []
    for t in report.tests:
        verdicts = "  ".join(f"{k}={v}" for k, v in t.verdicts.items())
        status = "ok" if t.passed else "MISMATCH"
        lines.append(f"{t.name:<12} {t.outcome:<32} expected={t.expected:<12} {verdicts}  [{status}] {t.seconds:.2f}s")
        for eng, rs in t.reasons.items():
            for r in rs:
                lines.append(f"    {eng}: {r}")
        for eng, vals in t.outcomes.items():
            lines.append(f"    {eng} outcomes: " + "; ".join(",".join(f"{r}={v}" for r, v in val) or "-" for val in vals))
        if t.witness_text:
            lines.append("    " + t.witness_text.replace("\n", "\n    "))
    for e in report.errors:
        where = f":{e['line']}:{e['column']}" if e.get("line") is not None else ""
        lines.append(f"error: {e['source']}{where}: {e['message']}")
    s = report.to_json()["summary"]
    lines.append(f"{s['passed']}/{s['tests']} passed, {s['mismatches']} mismatches, "
                 f"{s['bounded_unknown']} bounded-unknown, {s['errors']} errors")
    return "\n".join(lines)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wmmr", description="Reachability checker for litmus tests under promising semantics.")
    ap.add_argument("--version", action="version", version=f"wmmr {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="check litmus files or directories ('corpus' = built-in tests)")
    c.add_argument("paths", nargs="+")
    c.add_argument("--engine", choices=ENGINES, default="both")
    c.add_argument("--unroll", type=_nonneg, default=2)
    c.add_argument("--max-memory", type=_nonneg, default=None, help="memory length bound for the operational engine")
    c.add_argument("--calculus", choices=CALCULI, default="base")
    c.add_argument("--json", action="store_true")
    c.add_argument("--witness", action="store_true")
    c.add_argument("--all-outcomes", action="store_true", help="compute and compare every final valuation")
    c.add_argument("--strict", action="store_true", help="exit 3 when any verdict is bounded-unknown")
    c.add_argument("--jobs", type=_pos, default=1)
    c.add_argument("--dot", metavar="DIR", help="write proof witnesses as Graphviz files")

    x = sub.add_parser("crosscheck", help="compare the engines on random programs")
    x.add_argument("--seed", type=int, default=1)
    x.add_argument("--count", type=_nonneg, default=200)
    x.add_argument("--min-threads", type=_pos, default=2)
    x.add_argument("--max-threads", type=_pos, default=3)
    x.add_argument("--max-stmts", type=_pos, default=4)
    x.add_argument("--locations", type=_pos, default=2)
    x.add_argument("--no-fences", action="store_true")
    x.add_argument("--no-asm", action="store_true")
    x.add_argument("--stores-only", action="store_true")
    x.add_argument("--scheduler-max-stmts", type=_nonneg, default=3,
                   help="statement bound for the scheduler comparison programs (0 disables it)")
    x.add_argument("--unroll", type=_nonneg, default=2)
    x.add_argument("--calculus", choices=CALCULI, default="base")
    x.add_argument("--json", action="store_true")
    x.add_argument("--strict", action="store_true")
    return ap


def _nonneg(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _pos(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _write_dot(report: Report, directory: str) -> None:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for t in report.tests:
        w = t.witness.get("proof")
        if w:
            (out / f"{t.name}.dot").write_text(w["dot"], encoding="utf-8")


def main(argv: list | None = None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    if args.command == "check":
        config = RunConfig(args.engine, args.unroll, args.max_memory, "json" if args.json else "text",
                           args.witness or bool(args.dot), args.strict, args.calculus, args.all_outcomes, args.jobs)
        report, code = run(config, args.paths)
        if args.dot:
            _write_dot(report, args.dot)
        if args.json:
            print(json.dumps(report.to_json(), indent=2, sort_keys=True))
        else:
            print(format_report(report))
        return code
    shape = Shape(args.min_threads, max(args.min_threads, args.max_threads), args.max_stmts,
                  tuple("xyzwuv"[: min(args.locations, 6)]), fences=not args.no_fences,
                  asserts=not (args.no_asm or args.stores_only), loads=not args.stores_only,
                  register_stores=not args.stores_only)
    sched = None
    if args.scheduler_max_stmts:
        sched = Shape(shape.min_threads, shape.max_threads, min(args.max_stmts, args.scheduler_max_stmts),
                      shape.locations, shape.values, shape.fences, shape.asserts, shape.loads, shape.register_stores)
    rep = crosscheck(args.seed, args.count, shape, args.unroll, sched, args.calculus)
    if args.json:
        print(json.dumps(rep.to_json(), indent=2, sort_keys=True))
    else:
        print(rep.summary())
        for d in rep.discrepancies:
            print(d.dump())
    if rep.discrepancies:
        return EXIT_MISMATCH
    if args.strict and rep.skipped:
        return EXIT_UNKNOWN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
