"""Random litmus programs and the engine cross-check suite."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .litmus import (
    Asm, Cmp, Const, Dmb, LitmusTest, Load, OutcomePredicate, Reg, Store, format_litmus, seq, walk,
)
from .promising import ViewMonotonicityError, explore, explore_unrestricted, format_trace
from .proof import check_reachable, render_witness, revalidate

LOCATIONS = ("x", "y")
VALUES = (0, 1, 2)


@dataclass(frozen=True)
class Shape:
    min_threads: int = 2
    max_threads: int = 3
    max_stmts: int = 4
    locations: tuple = LOCATIONS
    values: tuple = VALUES
    fences: bool = True
    asserts: bool = True
    loads: bool = True
    register_stores: bool = True


# the unrestricted scheduler is exponential in promise placement; one
# statement fewer per thread keeps a batch of 100 within seconds
SCHEDULER_SHAPE = Shape(max_stmts=3)


def random_test(rng: random.Random, shape: Shape = Shape(), name: str = "rand") -> LitmusTest:
    """A random straight-line test.

    ``assume`` only mentions registers loaded earlier in the same thread,
    so no program is stuck by construction.
    """
    n = rng.randint(shape.min_threads, shape.max_threads)
    threads = []
    counter = 0
    for tid in range(1, n + 1):
        body = []
        loaded: list[str] = []
        for _ in range(rng.randint(1, shape.max_stmts)):
            kinds = ["store"]
            if shape.loads:
                kinds += ["load", "load"]
            if shape.fences:
                kinds.append("dmb")
            if shape.asserts and loaded:
                kinds.append("asm")
            if shape.register_stores and loaded:
                kinds.append("rstore")
            kind = rng.choice(kinds)
            x = rng.choice(shape.locations)
            if kind == "load":
                reg = f"r{counter}"
                counter += 1
                loaded.append(reg)
                body.append(Load(reg, x))
            elif kind == "store":
                body.append(Store(x, Const(rng.choice([v for v in shape.values if v] or [1]))))
            elif kind == "rstore":
                body.append(Store(x, Reg(rng.choice(loaded))))
            elif kind == "dmb":
                body.append(Dmb())
            else:
                op = rng.choice(["=", "!="])
                body.append(Asm(Cmp(op, Reg(rng.choice(loaded)), Const(rng.choice(shape.values)))))
        threads.append((tid, seq(*body)))
    regs = sorted({s.reg for _, st in threads for s in walk(st) if isinstance(s, Load)})
    outcome = OutcomePredicate(tuple((r, rng.choice(shape.values)) for r in regs[:2]))
    locs = tuple(sorted({s.loc for _, st in threads for s in walk(st) if isinstance(s, (Load, Store))}))
    return LitmusTest(name, tuple(threads), outcome, "unspecified", locs)


@dataclass
class Discrepancy:
    kind: str                 # engines, scheduler, monotonicity, witness
    test: LitmusTest
    detail: str
    witnesses: str = ""       # rendered traces or proof witnesses for the disputed outcomes

    def dump(self) -> str:
        out = f"-- {self.kind}: {self.detail}\n{format_litmus(self.test)}"
        if self.witnesses:
            out += self.witnesses.rstrip("\n") + "\n"
        return out


@dataclass
class CrosscheckReport:
    seed: int
    count: int
    programs: int = 0
    engine_checks: int = 0
    scheduler_checks: int = 0
    transitions_checked: int = 0
    witnesses_checked: int = 0
    skipped: int = 0
    discrepancies: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.discrepancies

    def summary(self) -> str:
        return (f"seed {self.seed}: {self.programs} programs, {self.engine_checks} engine comparisons, "
                f"{self.scheduler_checks} scheduler comparisons, {self.witnesses_checked} witnesses re-checked, "
                f"{self.transitions_checked} transitions checked for monotonicity, {self.skipped} skipped "
                f"(bound hit), {len(self.discrepancies)} discrepancies, {self.seconds:.1f}s")

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "count": self.count,
            "programs": self.programs,
            "engine_checks": self.engine_checks,
            "scheduler_checks": self.scheduler_checks,
            "transitions_checked": self.transitions_checked,
            "witnesses_checked": self.witnesses_checked,
            "skipped": self.skipped,
            "seconds": round(self.seconds, 3),
            "discrepancies": [{"kind": d.kind, "detail": d.detail, "program": format_litmus(d.test),
                               "witnesses": d.witnesses} for d in self.discrepancies],
            "ok": self.ok,
        }


def compare_engines(test: LitmusTest, unroll: int = 2, report: CrosscheckReport | None = None,
                    calculus: str = "base") -> list[Discrepancy]:
    """Full-valuation equality between the two engines, with witness re-checks."""
    out = []
    try:
        op = explore(test, unroll, debug=True)
    except ViewMonotonicityError as exc:
        return [Discrepancy("monotonicity", test, str(exc))]
    pr = check_reachable(test, unroll, full=True, calculus=calculus)
    if report is not None:
        report.transitions_checked += op.edges_checked
        report.engine_checks += 1
    if op.incomplete or pr.incomplete:
        if report is not None:
            report.skipped += 1
        return out
    a, b = op.valuations(), pr.valuations
    if a != b:
        shown = []
        for key in sorted(a - b):
            f = min((f for f in op.finals if f.key() == key), key=lambda f: len(f.memory))
            shown.append(f"# operational trace for {dict(key)}\n{format_trace(op.witnesses[f])}")
        for key in sorted(b - a):
            shown.append(f"# proof witness for {dict(key)}\n{render_witness(test, pr.witnesses[key])}")
        out.append(Discrepancy("engines", test, f"operational-only {sorted(a - b)}; proof-only {sorted(b - a)}",
                               "\n".join(shown)))
    for key, w in pr.witnesses.items():
        probs = revalidate(test, w, unroll, full_composition=False)
        if report is not None:
            report.witnesses_checked += 1
        if probs:
            out.append(Discrepancy("witness", test, f"{key}: {'; '.join(probs)}"))
    return out


def compare_schedulers(test: LitmusTest, unroll: int = 2, report: CrosscheckReport | None = None) -> list[Discrepancy]:
    try:
        pf = explore(test, unroll, debug=True)
        un = explore_unrestricted(test, unroll, debug=True)
    except ViewMonotonicityError as exc:
        return [Discrepancy("monotonicity", test, str(exc))]
    if report is not None:
        report.scheduler_checks += 1
        report.transitions_checked += pf.edges_checked + un.edges_checked
    if pf.incomplete or un.incomplete:
        if report is not None:
            report.skipped += 1
        return []
    if pf.finals != un.finals:
        only_pf = sorted(pf.finals - un.finals, key=str)
        only_un = sorted(un.finals - pf.finals, key=str)
        shown = [f"# promises-first trace for {f}\n{format_trace(pf.witnesses[f])}" for f in only_pf]
        shown += [f"# unrestricted trace for {f}\n{format_trace(un.witnesses[f])}" for f in only_un]
        return [Discrepancy("scheduler", test, f"promises-first-only {[str(f) for f in only_pf]}; "
                            f"unrestricted-only {[str(f) for f in only_un]}", "\n".join(shown))]
    return []


def crosscheck(seed: int, count: int, shape: Shape = Shape(), unroll: int = 2,
               scheduler_shape: Shape | None = SCHEDULER_SHAPE, calculus: str = "base") -> CrosscheckReport:
    """Run ``count`` random programs through both engines.

    With a ``scheduler_shape``, a second batch of ``count`` programs of
    that shape compares the two operational schedulers.  View
    monotonicity is asserted on every transition of both batches.
    """
    rng = random.Random(seed)
    report = CrosscheckReport(seed, count)
    start = time.perf_counter()
    for i in range(count):
        test = random_test(rng, shape, name=f"rand-{seed}-{i}")
        report.programs += 1
        report.discrepancies += compare_engines(test, unroll, report, calculus)
    if scheduler_shape is not None:
        rng = random.Random(f"{seed}:scheduler")
        for i in range(count):
            test = random_test(rng, scheduler_shape, name=f"sched-{seed}-{i}")
            report.programs += 1
            report.discrepancies += compare_schedulers(test, unroll, report)
    report.seconds = time.perf_counter() - start
    return report
