"""Proof engine: local proof outlines, parallel composition, reachability.

Each thread's outlines are enumerated by applying one local rule per
atomic statement, starting from the ini structure.  A tuple of final
structures proves an outcome when its composition has an
interference-free configuration.

Two restrictions keep enumeration finite without losing any outline that
the completeness construction produces:

* every read event must end up *barred*, i.e. directly followed by a bar
  on its location.  Only the last event on a location can gain a bar, so
  read chains use distinct locations and a pending read blocks later
  events on its location;
* a thread reads a label ``prm(t, x, k)`` at most as often as thread
  ``t`` can store ``k`` to ``x`` on one path.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

from .assertions import canonical_memory, final_states, local_psi, register_value, validate_psi, views_from
from .events import (
    BarExp, BarLoc, EventStructure, Ff, Fnc, Ini, InterferenceFree, Prm, STAR, Tst,
    act_x, append_read_chain, check_linearization, compose_subset, event_sort_key,
    extend, find_interference_free, format_structure, ini_structure, is_configuration,
    last_one, local_reads, parallel_compose, restrict, thread_covering,
    unsynchronised_reads, synchronizable,
)
from .litmus import (
    Asm, Assign, Choice, Const, Dmb, LitmusTest, Load, Reg, Seq, Statement, Store,
    eval_bexpr, format_bexpr, format_expr, statement_registers, value_universe,
)
from .promising import (
    INI, FinalState, TransitionLabel, TState, Write, _Budget, _prepare, finishes, heads,
    last_values, max_states_from_env, store_profiles, thread_step, tids_of, ts_ini,
)


@dataclass(frozen=True)
class Step:
    stmt: Statement          # the atomic statement proved
    rule: str
    detail: tuple            # ReadEx: (source event,); ReadNew: chain labels; WriteR: (register,)
    post: EventStructure


@dataclass(frozen=True)
class ProofOutline:
    tid: int
    program: Statement
    steps: tuple
    calculus: str = "base"

    @property
    def final(self) -> EventStructure:
        return self.steps[-1].post if self.steps else ini_structure()

    def valuation(self, registers: Iterable[str]) -> tuple:
        return tuple(sorted((a, register_value(self.final, a)) for a in registers))


def format_statement(st: Statement) -> str:
    if isinstance(st, Load):
        return f"{st.reg} := {st.loc}"
    if isinstance(st, Store):
        return f"{st.loc} := {format_expr(st.value)}"
    if isinstance(st, Assign):
        return f"{st.reg} := {format_expr(st.expr)}"
    if isinstance(st, Dmb):
        return "dmb"
    if isinstance(st, Asm):
        return f"assume {format_bexpr(st.cond)}"
    return "skip"


def render_outline(outline: ProofOutline) -> str:
    lines = [f"Thread {outline.tid}", f"  [ {format_structure(ini_structure())} ]"]
    for step in outline.steps:
        lines.append(f"  {format_statement(step.stmt)}    -- {step.rule}")
        lines.append(f"  [ {format_structure(step.post)} ]")
    return "\n".join(lines)


# -- local outlines ----------------------------------------------------------


CALCULI = ("base", "extended")


def read_new(es: EventStructure, chain: Sequence, tid: int, reg: str, x: str,
             calculus: str = "base", registers: Iterable[str] | None = None) -> EventStructure:
    """Post-assertion of a load that reads the last element of a fresh read chain.

    ``base`` orders every chain element after the last fence and the
    last bars, so a fresh read is always newer than the thread's read
    view.  ``extended`` orders a chain element only after the last event
    on its location and instead restricts writes to that location between
    the element and everything the read view depends on, as PR-ReadEx
    does.  That admits reads of messages older than the read view.
    """
    if calculus == "base":
        return extend(append_read_chain(es, chain), BarLoc(tid, reg, x))
    if calculus != "extended":
        raise ValueError(f"unknown calculus {calculus!r}")
    post = extend(append_read_chain(es, chain, anchor="location"), BarLoc(tid, reg, x))
    for c in sorted(set(post.labels) - set(es.labels)):
        lab = post.labels[c]
        if isinstance(lab, Prm):
            post = restrict(post, c, lab.loc, tid, registers)
    return post


@lru_cache(maxsize=None)
def _future_loads(s: Statement) -> tuple:
    """Upper bound on loads per location along any path of ``s``."""
    if isinstance(s, Load):
        return ((s.loc, 1),)
    if isinstance(s, Seq):
        c = Counter(dict(_future_loads(s.first)))
        c.update(dict(_future_loads(s.second)))
        return tuple(sorted(c.items()))
    if isinstance(s, Choice):
        a = dict(_future_loads(s.left))
        b = dict(_future_loads(s.right))
        return tuple(sorted((k, max(a.get(k, 0), b.get(k, 0))) for k in set(a) | set(b)))
    return ()


def read_budget(test: LitmusTest, values: frozenset[int]) -> dict:
    """(tid, loc, value) -> most stores of that write on one path."""
    out: dict = {}
    for tid, s in test.threads:
        for prof in store_profiles(s, values):
            for (x, k), n in Counter(prof).items():
                key = (tid, x, k)
                out[key] = max(out.get(key, 0), n)
    return out


@dataclass
class OutlineSet:
    outlines: list
    incomplete: bool = False


def _pending(es: EventStructure) -> dict:
    """loc -> read event not yet followed by a bar on its location."""
    out = {}
    for r in local_reads(es):
        lab = es.labels[r]
        if not any(isinstance(es.labels[b], BarLoc) and es.labels[b].loc == lab.loc for b in es.succs[r]):
            out[lab.loc] = r
    return out


def _reg_values(es: EventStructure):
    return lambda a: register_value(es, a)


def derive_outlines(
    tid: int,
    stmt: Statement,
    read_menu: Mapping[tuple, int],
    registers: Iterable[str] | None = None,
    budget: _Budget | None = None,
    max_chain: int | None = None,
    calculus: str = "base",
) -> OutlineSet:
    """Enumerate this thread's proof outlines, deduplicated by final structure.

    ``read_menu`` maps each readable (tid, loc, value) to how often it may
    be read.  ``max_chain`` caps read-chain length (default: number of
    locations on the menu).
    """
    registers = sorted(set(registers) if registers is not None else statement_registers(stmt))
    menu = sorted((k for k, n in read_menu.items() if n > 0 and k[0] != tid))
    locs = sorted({x for _, x, _ in menu})
    if max_chain is None:
        max_chain = len(locs)
    seen_final: dict = {}
    result = OutlineSet([])
    visited = set()
    stack: list = [(stmt, ini_structure(), ())]
    while stack:
        cur, es, steps = stack.pop()
        key = (cur, es.key())
        if key in visited:
            continue
        visited.add(key)
        if budget is not None and not budget.spend():
            result.incomplete = True
            break
        pend = _pending(es)
        if finishes(cur) and not pend:
            fk = es.key()
            if fk not in seen_final:
                seen_final[fk] = ProofOutline(tid, stmt, steps, calculus)
        succ = []
        for atom, rest in heads(cur):
            future = dict(_future_loads(rest))
            for rule, detail, post in _apply(tid, atom, es, pend, menu, read_menu, max_chain, registers, calculus):
                # every pending read still needs a later load of its location
                p2 = _pending(post)
                if any(future.get(x, 0) < 1 for x in p2):
                    continue
                succ.append((rest, post, steps + (Step(atom, rule, detail, post),)))
        stack.extend(reversed(succ))
    result.outlines = list(seen_final.values())
    return result


def _count_reads(es: EventStructure) -> Counter:
    return Counter((l.tid, l.loc, l.val) for l in es.labels.values() if isinstance(l, Prm))


def _apply(tid, atom, es, pend, menu, read_menu, max_chain, registers, calculus) -> Iterator[tuple]:
    if isinstance(atom, Store):
        x = atom.loc
        if x in pend:
            return
        if isinstance(atom.value, Const):
            yield "PR-Write", (), extend(es, Ff(tid, x, atom.value.value))
        else:
            a = atom.value.name
            k = register_value(es, a)
            yield "PR-WriteR", (a,), extend(es, Ff(tid, x, k), via=a)
    elif isinstance(atom, Dmb):
        yield "PR-Fence", (), extend(es, Fnc(tid))
    elif isinstance(atom, Assign):
        yield "PR-Registers", (), extend(es, BarExp(tid, atom.reg, atom.expr))
    elif isinstance(atom, Asm):
        if eval_bexpr(atom.cond, _reg_values(es)):
            yield "PR-Assume", (), extend(es, Tst(tid, atom.cond))
    elif isinstance(atom, Load):
        x = atom.loc
        e = last_one(es, act_x(x))
        post = extend(es, BarLoc(tid, atom.reg, x))
        yield "PR-ReadEx", (e,), restrict(post, e, x, tid, registers)
        if x in pend:
            return
        used = _count_reads(es)
        for chain in _chains(x, menu, read_menu, used, pend, max_chain):
            labels = tuple(Prm(t, y, k) for t, y, k in chain)
            yield "PR-ReadNew", labels, read_new(es, labels, tid, atom.reg, x, calculus, registers)


def _chains(x, menu, read_menu, used, pend, max_chain) -> Iterator[tuple]:
    finals = [m for m in menu if m[1] == x and used[m] < read_menu[m]]
    others = [m for m in menu if m[1] != x and m[1] not in pend and used[m] < read_menu[m]]
    for n in range(0, max_chain):
        for prefix in itertools.permutations(others, n):
            if len({m[1] for m in prefix}) < n:
                continue
            for f in finals:
                yield prefix + (f,)


# -- reachability ------------------------------------------------------------


@dataclass
class Witness:
    outlines: list               # ProofOutline per thread
    config: InterferenceFree
    final: FinalState

    @property
    def structures(self) -> list:
        return [o.final for o in self.outlines]


@dataclass
class ReachabilityResult:
    verdict: str                          # reachable, unreachable, bounded-unknown
    witness: Witness | None = None
    valuations: set = field(default_factory=set)
    witnesses: dict = field(default_factory=dict)   # valuation key -> Witness
    incomplete: bool = False
    reasons: list = field(default_factory=list)
    outline_counts: dict = field(default_factory=dict)


def _fulfill_counts(es: EventStructure) -> Counter:
    return Counter((l.tid, l.loc, l.val) for l in es.labels.values() if isinstance(l, Ff))


def _compatible(structs: Sequence[EventStructure]) -> bool:
    """Each fulfill can serve at most one reader per thread."""
    ffs = Counter()
    for es in structs:
        ffs.update(_fulfill_counts(es))
    for es in structs:
        for k, n in _count_reads(es).items():
            if ffs[k] < n:
                return False
    return True


def check_reachable(
    test: LitmusTest,
    unroll: int = 2,
    full: bool = False,
    max_states: int | None = None,
    max_chain: int | None = None,
    calculus: str = "base",
) -> ReachabilityResult:
    """Decide the outcome of ``test`` with the proof calculus.

    With ``full`` every final register valuation is computed; otherwise
    the search stops at the first witness for the outcome.
    """
    test = _prepare(test, unroll)
    values = value_universe(test, unroll)
    menu = read_budget(test, values)
    budget = _Budget(max_states if max_states is not None else max_states_from_env())
    result = ReachabilityResult("unreachable")
    if test.unrolled:
        result.incomplete = True
        result.reasons.append(f"loops unrolled {unroll} times")
    tids = test.tids
    regs = {tid: sorted(statement_registers(s)) for tid, s in test.threads}
    groups = []
    for tid, s in test.threads:
        os_ = derive_outlines(tid, s, menu, regs[tid], budget, max_chain, calculus)
        if os_.incomplete:
            result.incomplete = True
            result.reasons.append(f"state cap reached while deriving outlines of thread {tid}")
        by_val: dict = {}
        for o in os_.outlines:
            by_val.setdefault(o.valuation(regs[tid]), []).append(o)
        for v in by_val.values():
            v.sort(key=lambda o: len(o.final))
        groups.append(by_val)
        result.outline_counts[tid] = len(os_.outlines)

    outcome = test.outcome
    def final_memory_ok(sub, order):
        final = last_values(canonical_memory(sub, order)[0])
        return all(final.get(x, 0) == k for x, k in outcome.locations)

    accept = final_memory_ok if outcome.locations else None

    def search(val_combo, acc):
        combos = itertools.product(*(g[v] for g, v in zip(groups, val_combo)))
        for outlines in sorted(combos, key=lambda c: sum(len(o.final) for o in c)):
            if not budget.spend():
                return None
            structs = [o.final for o in outlines]
            if not synchronizable(structs) or not _compatible(structs):
                continue
            w = find_interference_free(None, structs, acc)
            if w is not None:
                final, _ = final_states(structs, w, tids, regs)
                return Witness(list(outlines), w, final)
        return None

    for val_combo in itertools.product(*(sorted(g) for g in groups)):
        valuation = dict(kv for part in val_combo for kv in part)
        regs_ok = all(valuation.get(r, 0) == k for r, k in outcome.registers)
        if not full and not regs_ok:
            continue
        found = None
        if regs_ok and accept is not None:
            found = search(val_combo, accept)
            if found is None and full and not budget.hit:
                found = search(val_combo, None)
        else:
            found = search(val_combo, None)
        if budget.hit:
            break
        if found is None:
            continue
        key = found.final.key()
        result.valuations.add(key)
        result.witnesses[key] = found
        if outcome.holds(found.final.valuation(), last_values(found.final.memory)):
            if result.witness is None:
                result.witness = found
            if not full:
                break
    if budget.hit:
        result.incomplete = True
        result.reasons.append(f"state cap {budget.limit} reached")
    if result.witness is not None:
        result.verdict = "reachable"
    elif result.incomplete:
        result.verdict = "bounded-unknown"
    return result


# -- completeness construction ----------------------------------------------


class MalformedTrace(ValueError):
    pass


def _memory_from_trace(trace: Sequence[TransitionLabel]) -> tuple:
    memory = [INI]
    seen_other = False
    for lab in trace:
        if lab.kind == "prm":
            if seen_other:
                raise MalformedTrace("promise after a non-promise step")
            if lab.ts != len(memory):
                raise MalformedTrace(f"promise at {lab.ts}, expected {len(memory)}")
            memory.append(Write(lab.loc, lab.val, lab.tid))
        else:
            seen_other = True
    return tuple(memory)


def _event_at(es: EventStructure, t: int):
    for e, l in es.labels.items():
        if t == 0 and isinstance(l, Ini):
            return e
        if isinstance(l, (Prm, Ff)) and l.ts == t:
            return e
    return None


def outline_steps_from_trace(trace: Sequence[TransitionLabel], tids: Sequence[int] | None = None,
                             calculus: str = "base") -> Iterator[tuple[int, int, EventStructure]]:
    """Replay a promises-first trace into timestamped local structures.

    Yields (trace index, thread, structure after that step) for every
    non-promise step.
    """
    memory = _memory_from_trace(trace)
    if tids is None:
        tids = sorted({lab.tid for lab in trace})
    structs = {tid: ini_structure() for tid in tids}
    reads_left: dict = {tid: [] for tid in tids}
    for lab in trace:
        if lab.kind == "rd":
            reads_left[lab.tid].append(lab.ts)
    for idx, lab in enumerate(trace):
        if lab.kind == "prm":
            continue
        tid = lab.tid
        es = structs[tid]
        if lab.kind == "ff":
            label = Ff(tid, lab.loc, lab.val, lab.ts)
            via = lab.expr.name if isinstance(lab.expr, Reg) else None
            es = extend(es, label, via=via)
        elif lab.kind == "fnc":
            es = extend(es, Fnc(tid))
        elif lab.kind == "lst":
            es = extend(es, BarExp(tid, lab.reg, lab.expr))
        elif lab.kind == "asm":
            es = extend(es, Tst(tid, lab.expr))
        elif lab.kind == "rd":
            t = lab.ts
            future = reads_left[tid]
            future.pop(0)
            if t == 0 or memory[t].tid == tid or _event_at(es, t) is not None:
                e = last_one(es, act_x(lab.loc))
                if e != _event_at(es, t):
                    raise MalformedTrace(f"read at {t} is not from the last event on {lab.loc}")
                es = restrict(extend(es, BarLoc(tid, lab.reg, lab.loc)), e, lab.loc, tid)
            else:
                pending = sorted({u for u in [t] + future
                                  if u <= t and u != 0 and memory[u].tid != tid and _event_at(es, u) is None})
                chain = [Prm(memory[u].tid, memory[u].loc, memory[u].val, u) for u in pending]
                es = read_new(es, chain, tid, lab.reg, lab.loc, calculus)
        else:
            raise MalformedTrace(f"unknown label kind {lab.kind}")
        structs[tid] = es
        yield idx, tid, es


def outline_from_trace(trace: Sequence[TransitionLabel], tids: Sequence[int] | None = None,
                       calculus: str = "base") -> list[EventStructure]:
    """Final timestamped structure of each thread (ordered by thread id)."""
    if tids is None:
        tids = sorted({lab.tid for lab in trace})
    structs = {tid: ini_structure() for tid in tids}
    for _, tid, es in outline_steps_from_trace(trace, tids, calculus):
        structs[tid] = es
    return [structs[t] for t in tids]


def configuration_from_trace(structs: Sequence[EventStructure]) -> InterferenceFree:
    """The configuration pairing events with equal timestamps, ordered by timestamp."""
    n = len(structs)
    tuples = [tuple(es.ini for es in structs)]
    readers: dict = {}
    for j, es in enumerate(structs):
        for r in local_reads(es):
            readers.setdefault(es.labels[r].ts, {})[j] = r
    by_ts = {}
    for i, es in enumerate(structs):
        for e in es.events:
            lab = es.labels[e]
            if isinstance(lab, (Ini, Prm)):
                continue
            slots = [STAR] * n
            slots[i] = e
            if isinstance(lab, Ff):
                for j, r in readers.get(lab.ts, {}).items():
                    slots[j] = r
                by_ts[lab.ts] = tuple(slots)
            tuples.append(tuple(slots))
    sub = compose_subset(structs, tuples)
    order = [tuples[0]] + [by_ts[t] for t in sorted(by_ts)]
    return InterferenceFree(sorted(tuples, key=event_sort_key), sub, order)


# -- re-validation -----------------------------------------------------------


def recheck_outline(outline: ProofOutline, read_menu: Mapping[tuple, int] | None = None) -> list[str]:
    """Replay every rule application and compare with the recorded assertions."""
    problems = []
    es = ini_structure()
    conts = {outline.program}
    tid = outline.tid
    for n, step in enumerate(outline.steps):
        nxt = {rest for c in conts for atom, rest in heads(c) if atom == step.stmt}
        if not nxt:
            problems.append(f"step {n}: {format_statement(step.stmt)} is not next in the program")
            return problems
        conts = nxt
        st = step.stmt
        if step.rule == "PR-Write":
            ok = isinstance(st, Store) and isinstance(st.value, Const)
            post = extend(es, Ff(tid, st.loc, st.value.value)) if ok else None
        elif step.rule == "PR-WriteR":
            ok = isinstance(st, Store) and isinstance(st.value, Reg)
            post = extend(es, Ff(tid, st.loc, register_value(es, st.value.name)), via=st.value.name) if ok else None
        elif step.rule == "PR-Fence":
            ok = isinstance(st, Dmb)
            post = extend(es, Fnc(tid)) if ok else None
        elif step.rule == "PR-Registers":
            ok = isinstance(st, Assign)
            post = extend(es, BarExp(tid, st.reg, st.expr)) if ok else None
        elif step.rule == "PR-Assume":
            ok = isinstance(st, Asm) and eval_bexpr(st.cond, _reg_values(es))
            post = extend(es, Tst(tid, st.cond)) if ok else None
        elif step.rule == "PR-ReadEx":
            ok = isinstance(st, Load)
            post = None
            if ok:
                e = last_one(es, act_x(st.loc))
                ok = step.detail == (e,)
                post = restrict(extend(es, BarLoc(tid, st.reg, st.loc)), e, st.loc, tid) if ok else None
        elif step.rule == "PR-ReadNew":
            chain = list(step.detail)
            ok = (isinstance(st, Load) and chain and all(isinstance(l, Prm) and l.tid != tid for l in chain)
                  and chain[-1].loc == st.loc)
            if ok and read_menu is not None:
                ok = all(read_menu.get((l.tid, l.loc, l.val), 0) > 0 for l in chain)
            post = read_new(es, chain, tid, st.reg, st.loc, outline.calculus) if ok else None
        else:
            ok, post = False, None
        if not ok:
            problems.append(f"step {n}: premise of {step.rule} fails")
            return problems
        if post != step.post:
            problems.append(f"step {n}: recorded assertion differs from {step.rule} result")
            return problems
        es = post
    if not any(finishes(c) for c in conts):
        problems.append("outline does not reach the end of the program")
    return problems


def revalidate(test: LitmusTest, witness: Witness, unroll: int = 2, full_composition: bool = True) -> list[str]:
    """Independent re-check of a reachability witness.  Empty list = valid."""
    test = _prepare(test, unroll)
    values = value_universe(test, unroll)
    menu = read_budget(test, values)
    problems = []
    structs = witness.structures
    for o, (tid, s) in zip(witness.outlines, test.threads):
        if o.tid != tid or o.program != s:
            problems.append(f"outline for thread {o.tid} does not match the program")
        problems += [f"thread {tid}: {p}" for p in recheck_outline(o, menu)]
    C = witness.config.config
    if full_composition:
        comp = parallel_compose(structs)
        if not all(ev in comp.labels for ev in C):
            problems.append("configuration uses events outside the composition")
        elif not is_configuration(comp, C):
            problems.append("not a configuration of the composition")
    sub = compose_subset(structs, C)
    if not sub.is_acyclic():
        problems.append("configuration has a flow cycle")
    if not thread_covering(structs, C):
        problems.append("configuration is not thread-covering")
    if unsynchronised_reads(structs, C):
        problems.append("configuration has unsynchronised reads")
    lin = check_linearization(sub, witness.config.order)
    if lin or witness.config.order[:1] != [tuple(es.ini for es in structs)]:
        return problems + (lin or ["linearization does not start with ini"])
    memory, psi = canonical_memory(sub, witness.config.order)
    problems += [f"psi: {p}" for p in validate_psi(sub, memory, psi)]
    psis = local_psi(structs, witness.config)
    for i, es in enumerate(structs):
        problems += [f"thread {test.tids[i]} psi: {p}" for p in validate_psi(es, memory, psis[i])]
    regs = {tid: sorted(statement_registers(s)) for tid, s in test.threads}
    try:
        final, _ = final_states(structs, witness.config, test.tids, regs)
        if final != witness.final:
            problems.append("final state differs from the reported one")
    except ValueError as exc:
        problems.append(str(exc))
    return problems


def render_witness(test: LitmusTest, witness: Witness) -> str:
    lines = []
    for o in witness.outlines:
        lines.append(render_outline(o))
        lines.append("")
    lines.append("Interference-free configuration:")
    for ev in witness.config.config:
        lines.append(f"  {_tuple_text(ev)}: {witness.config.structure.labels[ev]}")
    lines.append("Linearization: " + " < ".join(_tuple_text(e) for e in witness.config.order))
    lines.append("Final: " + str(witness.final))
    return "\n".join(lines)


def _tuple_text(ev) -> str:
    return "(" + ", ".join("*" if x is STAR else f"e{x}" for x in ev) + ")"


def replay_trace(test: LitmusTest, trace: Sequence[TransitionLabel], unroll: int = 2) -> list[tuple[int, TState]]:
    """Thread states after each non-promise step of a promises-first trace.

    Returns (thread, state) per non-promise label, in trace order.
    """
    test = _prepare(test, unroll)
    memory = _memory_from_trace(trace)
    regs = {tid: statement_registers(s) for tid, s in test.threads}
    steps = [lab for lab in trace if lab.kind != "prm"]

    def run(k: int, threads: dict) -> list | None:
        if k == len(steps):
            return []
        lab = steps[k]
        cur = threads[lab.tid]
        for label, nxt, _ in thread_step(cur, memory, lab.tid):
            if label != lab:
                continue
            rest = run(k + 1, {**threads, lab.tid: nxt})
            if rest is not None:
                return [(lab.tid, nxt[1])] + rest
        return None

    start = {tid: (s, ts_ini(regs[tid]).evolve(prom=tids_of(memory, tid))) for tid, s in test.threads}
    out = run(0, start)
    if out is None:
        raise MalformedTrace("trace does not replay on the program")
    return out


def check_trace_outline(test: LitmusTest, trace: Sequence[TransitionLabel], final: FinalState | None = None,
                        unroll: int = 2, calculus: str = "base") -> list[str]:
    """Completeness check for one accepted trace.  Empty list = passed.

    Every intermediate structure built from the trace must describe the
    thread's actual state under the timestamp mapping; the final
    structures must compose into an interference-free configuration whose
    final state is the trace's.
    """
    test = _prepare(test, unroll)
    tids = test.tids
    memory = _memory_from_trace(trace)
    regs = {tid: sorted(statement_registers(s)) for tid, s in test.threads}
    problems = []
    states = replay_trace(test, trace, unroll)
    built = list(outline_steps_from_trace(trace, tids, calculus))
    for (tid, ts), (idx, tid2, es) in zip(states, built):
        psi = {e: _ts_of(es, e) for e in es.memory_events}
        got = views_from(es, psi, memory, tid, regs[tid])
        if got != ts:
            problems.append(f"after {trace[idx]}: structure gives {got}, trace has {ts}")
        problems += [f"after {trace[idx]}: {p}" for p in validate_psi(es, memory, psi)]
    structs = outline_from_trace(trace, tids, calculus)
    if not synchronizable(structs):
        problems.append("structures are not synchronizable")
        return problems
    w = configuration_from_trace(structs)
    if not w.structure.is_acyclic():
        problems.append("configuration has a flow cycle")
    if not thread_covering(structs, w.config) or unsynchronised_reads(structs, w.config):
        problems.append("configuration is not thread-covering or has unsynchronised reads")
    problems += check_linearization(w.structure, w.order)
    mem2, psi = canonical_memory(w.structure, w.order)
    if mem2 != memory:
        problems.append("configuration order does not reproduce the trace memory")
    problems += [f"composite psi: {p}" for p in validate_psi(w.structure, mem2, psi)]
    if not problems:
        got, _ = final_states(structs, w, tids, regs)
        if final is not None and got != final:
            problems.append(f"configuration denotes {got}, trace ends in {final}")
    return problems


def _ts_of(es: EventStructure, e) -> int:
    lab = es.labels[e]
    return 0 if isinstance(lab, Ini) else lab.ts
