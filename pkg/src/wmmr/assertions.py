"""Which (thread states, memory) pairs an event structure describes.

A timestamp mapping ``psi`` sends every memory event (ini, reads,
fulfills) to a memory position; views are maxima of ``psi`` over the
events that precede fences, bars and tests.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .events import (
    BarExp, BarLoc, EventStructure, Ff, Ini, InterferenceFree, Prm, STAR,
    bar_of, ff_events, is_bar, is_memory, last_one, memory_before, on_loc,
    pr_bar, pr_bar_loc, pr_bar_reg, pr_fnc, pr_tst, thread_registers,
)
from .litmus import eval_expr
from .promising import INI, FinalState, Memory, TState, Write

__all__ = [
    "priors", "enumerate_psi", "validate_psi", "views_from", "register_value",
    "matches", "final_states", "canonical_memory", "pr_bar", "pr_bar_loc",
    "pr_bar_reg", "pr_fnc", "pr_tst",
]


def priors(es: EventStructure, kind: str, tid: int | None = None, reg: str | None = None,
           loc: str | None = None, registers: Iterable[str] | None = None) -> set:
    """Memory events flow-before the last event of the given kind.

    ``kind`` is one of ``fnc``, ``bar_reg``, ``bar``, ``bar_loc``, ``tst``.
    """
    if kind == "fnc":
        return pr_fnc(es, tid)
    if kind == "bar_reg":
        return pr_bar_reg(es, reg)
    if kind == "bar":
        return pr_bar(es, tid, registers)
    if kind == "bar_loc":
        return pr_bar_loc(es, tid, loc, registers)
    if kind == "tst":
        return pr_tst(es, tid)
    raise ValueError(f"unknown prior kind {kind!r}")


def _content_ok(lab, m) -> bool:
    if m is INI:
        return isinstance(lab, Ini)
    return isinstance(lab, (Prm, Ff)) and (lab.tid, lab.loc, lab.val) == (m.tid, m.loc, m.val)


def _lam_ok(es: EventStructure, memory: Memory, psi: Mapping, d, f) -> bool:
    L = es.restriction(d, f)
    if not L or d not in psi or f not in psi:
        return True
    return all(memory[t] is INI or memory[t].loc not in L for t in range(psi[d] + 1, psi[f]))


def validate_psi(es: EventStructure, memory: Memory, psi: Mapping) -> list[str]:
    """Every violated condition of a timestamp mapping, as text."""
    problems = []
    mem = es.memory_events
    if set(psi) != set(mem):
        return ["mapping is not total on the memory events"]
    for e in mem:
        t = psi[e]
        if not 0 <= t < len(memory):
            problems.append(f"{e} maps outside memory")
            continue
        lab = es.labels[e]
        if isinstance(lab, Ini) and t != 0:
            problems.append("ini is not mapped to 0")
        if t != 0 and not _content_ok(lab, memory[t]):
            problems.append(f"{lab} mapped to {memory[t]}")
        if t == 0 and not isinstance(lab, Ini):
            problems.append(f"{lab} mapped to ini")
    if problems:
        return problems
    for e in mem:
        lab = es.labels[e]
        if not isinstance(lab, Ff):
            continue
        mine = {psi[d] for d in ff_events(es, lab.tid)}
        for t in range(1, psi[e]):
            m = memory[t]
            if m.tid == lab.tid and m.loc == lab.loc and t not in mine:
                problems.append(f"write at {t} of thread {lab.tid} skipped before {lab}")
    for f in mem:
        for d in es.ancestors[f]:
            if d in psi and psi[d] >= psi[f]:
                problems.append(f"flow {d}->{f} not preserved")
    for (d, f) in es.lam:
        if not _lam_ok(es, memory, psi, d, f):
            problems.append(f"restriction on ({d},{f}) violated")
    return problems


def enumerate_psi(es: EventStructure, memory: Memory) -> list[dict]:
    """All timestamp mappings satisfying the five consistency conditions."""
    mem = _topo(es, es.memory_events)
    mem_set = set(mem)
    mem_before = {e: es.ancestors[e] & mem_set for e in mem}
    cands = {}
    for e in mem:
        lab = es.labels[e]
        if isinstance(lab, Ini):
            cands[e] = [0]
        else:
            cands[e] = [t for t in range(1, len(memory)) if _content_ok(lab, memory[t])]
    out: list[dict] = []
    psi: dict = {}

    def rec(k: int):
        if k == len(mem):
            if not validate_psi(es, memory, psi):
                out.append(dict(psi))
            return
        e = mem[k]
        low = max((psi[d] for d in mem_before[e]), default=-1)
        for t in cands[e]:
            if t <= low:
                continue
            psi[e] = t
            if all(_lam_ok(es, memory, psi, d, f) for (d, f) in es.lam if e in (d, f)):
                rec(k + 1)
            del psi[e]

    rec(0)
    return out


def _topo(es: EventStructure, events: Sequence) -> list:
    evs = list(events)
    return sorted(evs, key=lambda e: (len(es.ancestors[e]), evs.index(e)))


def _max(psi: Mapping, events: Iterable) -> int:
    return max((psi[e] for e in events if e in psi), default=0)


def bar_value(es: EventStructure, b) -> int:
    """Value a bar event assigns to its register."""
    lab = es.labels[b]
    if isinstance(lab, BarLoc):
        srcs = [d for d in es.preds[b] if on_loc(es.labels[d], lab.loc)]
        if not srcs:
            return 0
        src = max(srcs, key=lambda d: len(es.ancestors[d]))
        s = es.labels[src]
        return 0 if isinstance(s, Ini) else s.val
    if isinstance(lab, BarExp):
        def value_of(r: str) -> int:
            prev = [d for d in es.preds[b] if is_bar(es.labels[d]) and es.labels[d].reg == r]
            if not prev:
                return 0
            return bar_value(es, max(prev, key=lambda d: len(es.ancestors[d])))
        return eval_expr(lab.expr, value_of)
    raise TypeError(f"not a bar: {lab}")


def register_value(es: EventStructure, reg: str) -> int:
    """Value of ``reg`` described by the structure (0 without a bar)."""
    b = last_one(es, bar_of(reg))
    return 0 if b is None else bar_value(es, b)


def _coh(es: EventStructure, psi: Mapping, tid: int, x: str) -> int:
    best = _max(psi, ff_events(es, tid, x))
    bars = [e for e, l in es.labels.items() if isinstance(l, BarLoc) and l.tid == tid and l.loc == x]
    for b in bars:
        anc = es.ancestors[b]
        own = {d for d in anc if (isinstance(es.labels[d], Ff) and es.labels[d].tid == tid)
               or (is_memory(es.labels[d]) and on_loc(es.labels[d], x))}
        earlier = [d for d in anc if is_bar(es.labels[d]) and es.labels[d].tid == tid]
        best = max(best, _max(psi, own), _max(psi, memory_before(es, earlier)))
    return best


def views_from(es: EventStructure, psi: Mapping, memory: Memory, tid: int,
               registers: Iterable[str] | None = None, locations: Iterable[str] | None = None) -> TState:
    """The thread state of ``tid`` described by ``es`` under ``psi``."""
    regs = sorted(set(registers) if registers is not None else thread_registers(es, tid))
    ffs = ff_events(es, tid)
    prfnc = pr_fnc(es, tid)
    prbar = pr_bar(es, tid, regs)
    locs = set(locations or ())
    locs |= {m.loc for m in memory if m is not INI}
    locs |= {l.loc for l in es.labels.values() if isinstance(l, (Prm, Ff, BarLoc))}
    coh = {}
    for x in sorted(locs):
        t = _coh(es, psi, tid, x)
        if t:
            coh[x] = t
    mine = {t for t, m in enumerate(memory) if m is not INI and m.tid == tid}
    return TState(
        prom=frozenset(mine - {psi[e] for e in ffs}),
        coh=tuple(sorted(coh.items())),
        regs=tuple((a, (register_value(es, a), _max(psi, pr_bar_reg(es, a)))) for a in regs),
        v_read=_max(psi, (prfnc & ffs) | prbar),
        v_wOld=_max(psi, ffs),
        v_wNew=_max(psi, prfnc & (ffs | prbar)),
        v_C=_max(psi, pr_tst(es, tid)),
    )


def matches(es: EventStructure, states: Mapping[int, TState], memory: Memory,
            registers: Mapping[int, Iterable[str]] | None = None) -> bool:
    """Whether some consistent mapping yields exactly ``states``."""
    for psi in enumerate_psi(es, memory):
        if all(
            views_from(es, psi, memory, tid, None if registers is None else registers[tid]) == ts
            for tid, ts in states.items()
        ):
            return True
    return False


def canonical_memory(es: EventStructure, order: Sequence) -> tuple[Memory, dict]:
    """Memory read off a linearization, and the mapping sending each event to its position."""
    memory = []
    psi = {}
    for i, e in enumerate(order):
        lab = es.labels[e]
        memory.append(INI if isinstance(lab, Ini) else Write(lab.loc, lab.val, lab.tid))
        psi[e] = i
    return tuple(memory), psi


def local_psi(locals_: Sequence[EventStructure], witness: InterferenceFree) -> list[dict]:
    """Per-thread mappings induced by a composite linearization."""
    pos = {e: i for i, e in enumerate(witness.order)}
    out = [dict() for _ in locals_]
    for ev in witness.config:
        if ev not in pos:
            continue
        for i, x in enumerate(ev):
            if x is not STAR:
                out[i][x] = pos[ev]
    return out


def final_states(locals_: Sequence[EventStructure], witness: InterferenceFree,
                 tids: Sequence[int], registers: Mapping[int, Iterable[str]]) -> tuple[FinalState, list[TState]]:
    """Final state denoted by an interference-free configuration.

    Memory is read off the witness order.  Each thread's view is computed
    on its own local structure under the induced mapping; every maximum
    taken on the composite is reached at one of the thread's own events,
    so the two agree.
    """
    memory, _ = canonical_memory(witness.structure, witness.order)
    psis = local_psi(locals_, witness)
    states = []
    regs = []
    for i, (tid, es) in enumerate(zip(tids, locals_)):
        ts = views_from(es, psis[i], memory, tid, registers[tid])
        if ts.prom:
            raise ValueError(f"thread {tid} has open promises {sorted(ts.prom)}")
        states.append(ts)
        regs.append((tid, tuple(sorted(ts.values().items()))))
    return FinalState(tuple(regs), memory), states
