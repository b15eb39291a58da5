"""Operational promising semantics with timestamped views.

Memory is a tuple of messages; position 0 holds :data:`INI` and the
position of a message is its timestamp.  Thread states are immutable and
hashable so that search can deduplicate them.

Exploration is promises-first: a candidate memory is fixed up front and
every thread then runs to completion on its own.  Once memory is fixed no
thread can observe another thread's non-promise steps, so the final
states of a memory are the product of the per-thread final states.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

from .litmus import (
    Asm, Assign, BinOp, Choice, Cmp, Const, Dmb, Iterate, LitmusTest,
    Load, Not, And, Or, BConst, OutcomePredicate, Reg, Seq, Skip, Statement, Store,
    SKIP, apply_op, compare, elaborate, format_bexpr, format_expr, has_iterate,
    statement_registers, value_universe, walk,
)


class _Ini:
    __slots__ = ()

    def __repr__(self) -> str:
        return "ini"

    def __reduce__(self):
        return (_ini, ())


def _ini():
    return INI


INI = _Ini()


@dataclass(frozen=True)
class Write:
    loc: str
    val: int
    tid: int

    def __str__(self) -> str:
        return f"<{self.loc}:={self.val}>_{self.tid}"


Message = "Write | _Ini"
Memory = tuple


def msg_on(m, x: str) -> bool:
    """Whether message ``m`` is a write to ``x`` (ini writes every location)."""
    return m is INI or m.loc == x


def msg_val(m) -> int:
    return 0 if m is INI else m.val


def tids_of(memory: Memory, tid: int) -> frozenset[int]:
    return frozenset(t for t, m in enumerate(memory) if m is not INI and m.tid == tid)


def last_values(memory: Memory) -> dict[str, int]:
    out: dict[str, int] = {}
    for m in memory[1:]:
        out[m.loc] = m.val
    return out


def format_memory(memory: Memory) -> str:
    return "[" + ", ".join(str(m) for m in memory) + "]"


class ViewMonotonicityError(AssertionError):
    pass


@dataclass(frozen=True)
class TState:
    prom: frozenset = frozenset()
    coh: tuple = ()     # sorted (loc, ts) pairs, zero entries omitted
    regs: tuple = ()    # sorted (reg, (value, view)) pairs over all thread registers
    v_read: int = 0
    v_wOld: int = 0
    v_wNew: int = 0
    v_C: int = 0

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.prom, self.coh, self.regs, self.v_read, self.v_wOld, self.v_wNew, self.v_C))
            object.__setattr__(self, "_hash", h)
        return h

    def __reduce__(self):
        return (TState, (self.prom, self.coh, self.regs, self.v_read, self.v_wOld, self.v_wNew, self.v_C))

    def evolve(self, **changes) -> "TState":
        """Copy with some fields replaced (a fast ``dataclasses.replace``)."""
        new = object.__new__(TState)
        d = new.__dict__
        d.update(self.__dict__)
        d.pop("_hash", None)
        d.update(changes)
        return new

    def coh_of(self, x: str) -> int:
        for loc, t in self.coh:
            if loc == x:
                return t
        return 0

    def reg(self, a: str) -> tuple[int, int]:
        for r, vv in self.regs:
            if r == a:
                return vv
        raise KeyError(f"unknown register {a!r}")

    def with_coh(self, x: str, t: int) -> "TState":
        d = dict(self.coh)
        if t:
            d[x] = t
        else:
            d.pop(x, None)
        return self.evolve(coh=tuple(sorted(d.items())))

    def with_reg(self, a: str, val: int, view: int) -> "TState":
        d = dict(self.regs)
        d[a] = (val, view)
        return self.evolve(regs=tuple(sorted(d.items())))

    def values(self) -> dict[str, int]:
        return {r: v for r, (v, _) in self.regs}

    def views(self) -> dict[str, int]:
        """Every view component, keyed by name, for monotonicity checks."""
        out = {"v_read": self.v_read, "v_wOld": self.v_wOld, "v_wNew": self.v_wNew, "v_C": self.v_C}
        for x, t in self.coh:
            out["coh(" + x + ")"] = t
        for r, (_, v) in self.regs:
            out["v_" + r] = v
        return out

    def __str__(self) -> str:
        coh = ", ".join(f"{x}:{t}" for x, t in self.coh)
        regs = ", ".join(f"{r}={v}@{w}" for r, (v, w) in self.regs)
        return (f"prom={sorted(self.prom)} coh={{{coh}}} regs={{{regs}}} v_read={self.v_read} "
                f"v_wOld={self.v_wOld} v_wNew={self.v_wNew} v_C={self.v_C}")


def ts_ini(registers: Iterable[str] = ()) -> TState:
    return TState(regs=tuple(sorted((r, (0, 0)) for r in set(registers))))


def check_monotone(before: TState, after: TState) -> None:
    old = before.views()
    new = after.views()
    for k, v in old.items():
        if new.get(k, 0) < v:
            raise ViewMonotonicityError(f"{k} decreased from {v} to {new.get(k, 0)}")
    for r, (_, v) in after.regs:
        if v > after.v_read:
            raise ViewMonotonicityError(f"v_{r}={v} exceeds v_read={after.v_read}")


@dataclass(frozen=True)
class TransitionLabel:
    kind: str   # prm, rd, ff, fnc, lst, asm
    tid: int
    loc: str | None = None
    val: int | None = None
    ts: int | None = None
    reg: str | None = None
    expr: object = None     # stored value (ff), assigned expression (lst) or condition (asm)

    def __str__(self) -> str:
        if self.kind in ("prm", "rd", "ff"):
            return f"{self.tid}: {self.kind}({self.loc},{self.val})@t={self.ts}"
        if self.kind == "fnc":
            return f"{self.tid}: fnc"
        if self.kind == "lst":
            return f"{self.tid}: lst({self.reg},{format_expr(self.expr)})"
        return f"{self.tid}: asm({format_bexpr(self.expr)})"


def format_trace(trace: Iterable[TransitionLabel]) -> str:
    return "\n".join(str(lab) for lab in trace)


# -- expression evaluation ---------------------------------------------------


def expeval(e, regs) -> tuple:
    """Evaluate an expression to ``(value, view)``.

    ``regs`` maps registers to ``(value, view)``; a :class:`TState` is
    accepted too.  Boolean expressions yield a ``bool`` value.
    """
    if isinstance(regs, TState):
        regs = dict(regs.regs)
    if isinstance(e, Const):
        return e.value, 0
    if isinstance(e, Reg):
        return regs[e.name]
    if isinstance(e, BinOp):
        k1, v1 = expeval(e.left, regs)
        k2, v2 = expeval(e.right, regs)
        return apply_op(e.op, k1, k2), max(v1, v2)
    if isinstance(e, BConst):
        return e.value, 0
    if isinstance(e, Cmp):
        k1, v1 = expeval(e.left, regs)
        k2, v2 = expeval(e.right, regs)
        return compare(e.op, k1, k2), max(v1, v2)
    if isinstance(e, Not):
        k, v = expeval(e.arg, regs)
        return not k, v
    if isinstance(e, (And, Or)):
        k1, v1 = expeval(e.left, regs)
        k2, v2 = expeval(e.right, regs)
        k = (k1 and k2) if isinstance(e, And) else (k1 or k2)
        return k, max(v1, v2)
    raise TypeError(f"not an expression: {e!r}")


# -- structural decomposition ------------------------------------------------


def finishes(s: Statement) -> bool:
    """Whether ``s`` can reach skip by resolving choices alone."""
    if isinstance(s, Skip):
        return True
    if isinstance(s, Seq):
        return finishes(s.first) and finishes(s.second)
    if isinstance(s, Choice):
        return finishes(s.left) or finishes(s.right)
    if isinstance(s, Iterate):
        return True
    return False


def _then(rest: Statement, after: Statement) -> Statement:
    return after if isinstance(rest, Skip) else Seq(rest, after)


def heads(s: Statement) -> list[tuple[Statement, Statement]]:
    """All (atomic statement, continuation) pairs that can execute next."""
    if isinstance(s, Skip):
        return []
    if isinstance(s, Seq):
        out = [(a, _then(r, s.second)) for a, r in heads(s.first)]
        if finishes(s.first):
            out += heads(s.second)
        return out
    if isinstance(s, Choice):
        return heads(s.left) + heads(s.right)
    if isinstance(s, Iterate):
        raise ValueError("iterate must be elaborated before execution")
    return [(s, SKIP)]


# -- atomic rules ------------------------------------------------------------


def step_atomic(st: Statement, ts: TState, memory: Memory, tid: int) -> list[tuple[TransitionLabel, TState]]:
    """Non-promise rule applications for one atomic statement."""
    out = []
    if isinstance(st, Load):
        x = st.loc
        bound = max(ts.v_read, ts.coh_of(x))
        for t, m in enumerate(memory):
            if not msg_on(m, x):
                continue
            if any(msg_on(memory[u], x) for u in range(t + 1, min(bound, len(memory) - 1) + 1)):
                continue
            v_post = max(ts.v_read, t)
            ts2 = ts.with_reg(st.reg, msg_val(m), v_post)
            ts2 = ts2.with_coh(x, max(ts.coh_of(x), v_post)).evolve(v_read=v_post)
            out.append((TransitionLabel("rd", tid, x, msg_val(m), t, reg=st.reg), ts2))
    elif isinstance(st, Store):
        x = st.loc
        k, v_rv = expeval(st.value, ts)
        floor = max(ts.v_wNew, ts.v_C, ts.coh_of(x), v_rv)
        for t in sorted(ts.prom):
            m = memory[t]
            if m.loc == x and m.val == k and m.tid == tid and floor < t:
                ts2 = ts.with_coh(x, t).evolve(prom=ts.prom - {t}, v_wOld=max(ts.v_wOld, t))
                out.append((TransitionLabel("ff", tid, x, k, t, expr=st.value), ts2))
    elif isinstance(st, Dmb):
        v = max(ts.v_read, ts.v_wOld)
        out.append((TransitionLabel("fnc", tid), ts.evolve(v_read=v, v_wNew=v)))
    elif isinstance(st, Assign):
        _, u = ts.reg(st.reg)
        k, v = expeval(st.expr, ts)
        out.append((TransitionLabel("lst", tid, reg=st.reg, expr=st.expr), ts.with_reg(st.reg, k, max(u, v))))
    elif isinstance(st, Asm):
        b, v = expeval(st.cond, ts)
        if b:
            out.append((TransitionLabel("asm", tid, expr=st.cond), ts.evolve(v_C=max(ts.v_C, v))))
    return out


def thread_step(
    thread: tuple[Statement, TState],
    memory: Memory,
    tid: int,
    promises: Iterable[tuple[str, int]] = (),
    max_memory: int | None = None,
) -> list[tuple[TransitionLabel, tuple[Statement, TState], Memory]]:
    """All one-step successors of a thread.

    ``promises`` lists the (location, value) pairs the Promise rule may
    append; a new promise lands at timestamp ``len(memory)``.
    """
    stmt, ts = thread
    out = []
    for atom, rest in heads(stmt):
        for label, ts2 in step_atomic(atom, ts, memory, tid):
            out.append((label, (rest, ts2), memory))
    if max_memory is None or len(memory) < max_memory + 1:
        t = len(memory)
        for x, k in sorted(set(promises)):
            ts2 = ts.evolve(prom=ts.prom | {t})
            out.append((TransitionLabel("prm", tid, x, k, t), (stmt, ts2), memory + (Write(x, k, tid),)))
    return out


def certifiable(thread: tuple[Statement, TState], memory: Memory, tid: int) -> bool:
    """Whether the thread can discharge all its promises on its own.

    Promise steps are allowed, but only for the value a store at the head
    of the program would write next; any other promise is an extra
    obligation that never helps.  Each store fulfils at most one promise,
    so the memory never needs to grow by more than the remaining stores.
    """
    cap = len(memory) + max_stores(thread[0])
    seen = set()
    stack = [(thread, memory)]
    while stack:
        cur, mem = stack.pop()
        if not cur[1].prom:
            return True
        if (cur, mem) in seen:
            continue
        seen.add((cur, mem))
        stmt, ts = cur
        wanted = set()
        if len(mem) < cap:
            for atom, _ in heads(stmt):
                if isinstance(atom, Store):
                    wanted.add((atom.loc, expeval(atom.value, ts)[0]))
        for _, nxt, mem2 in thread_step(cur, mem, tid, wanted):
            if (nxt, mem2) not in seen:
                stack.append((nxt, mem2))
    return False


# -- program states ----------------------------------------------------------


@dataclass(frozen=True)
class ProgState:
    pool: tuple   # (tid, Statement, TState) per thread
    memory: Memory


def initial_state(test: LitmusTest) -> ProgState:
    pool = tuple((tid, s, ts_ini(statement_registers(s))) for tid, s in test.threads)
    return ProgState(pool, (INI,))


@dataclass(frozen=True)
class FinalState:
    regs: tuple      # (tid, ((reg, value), ...)) per thread
    memory: Memory

    def valuation(self) -> dict[str, int]:
        return {r: v for _, rs in self.regs for r, v in rs}

    def key(self) -> tuple:
        return valuation_key(self.valuation())

    def __str__(self) -> str:
        vals = ", ".join(f"{r}={v}" for r, v in self.key())
        return f"{{{vals}}} memory={format_memory(self.memory)}"


def valuation_key(valuation: dict[str, int]) -> tuple:
    return tuple(sorted(valuation.items()))


@dataclass
class ExploreResult:
    finals: set = field(default_factory=set)
    witnesses: dict = field(default_factory=dict)   # FinalState -> trace
    incomplete: bool = False
    reasons: list = field(default_factory=list)
    edges_checked: int = 0
    states: int = 0

    def valuations(self) -> set:
        return {f.key() for f in self.finals}


@dataclass
class Verdict:
    reachable: bool
    final: FinalState | None = None
    witness: tuple | None = None
    incomplete: bool = False

    @property
    def label(self) -> str:
        if self.reachable:
            return "reachable"
        return "bounded-unknown" if self.incomplete else "unreachable"


def max_states_from_env(default: int | None = None) -> int | None:
    raw = os.environ.get("WMMR_MAX_STATES")
    if raw is None or raw == "":
        return default
    return int(raw)


class _Budget:
    def __init__(self, limit: int | None):
        self.limit = limit
        self.used = 0
        self.hit = False

    def spend(self, n: int = 1) -> bool:
        self.used += n
        if self.limit is not None and self.used > self.limit:
            self.hit = True
        return not self.hit


def store_profiles(s: Statement, values: frozenset[int]) -> set[tuple]:
    """Sorted (loc, value) multisets of the stores along each path of ``s``."""
    if isinstance(s, Store):
        if isinstance(s.value, Const):
            return {((s.loc, s.value.value),)}
        return {((s.loc, v),) for v in values}
    if isinstance(s, Seq):
        a = store_profiles(s.first, values)
        b = store_profiles(s.second, values)
        return {tuple(sorted(p + q)) for p in a for q in b}
    if isinstance(s, Choice):
        return store_profiles(s.left, values) | store_profiles(s.right, values)
    if isinstance(s, Iterate):
        raise ValueError("iterate must be elaborated first")
    return {()}


def max_stores(s: Statement) -> int:
    if isinstance(s, Store):
        return 1
    if isinstance(s, Seq):
        return max_stores(s.first) + max_stores(s.second)
    if isinstance(s, Choice):
        return max(max_stores(s.left), max_stores(s.right))
    return 0


def store_writes(s: Statement, values: frozenset[int]) -> set[tuple[str, int]]:
    """(loc, value) pairs some store of ``s`` can write."""
    out = set()
    for p in store_profiles(s, values):
        out |= set(p)
    return out


def default_memory_bound(test: LitmusTest) -> int:
    return sum(max_stores(s) for _, s in test.threads)


def store_sequences(s: Statement, values: frozenset[int]) -> set[tuple]:
    """Program-order (loc, value) sequences of the stores along each path of ``s``."""
    if isinstance(s, Store):
        if isinstance(s.value, Const):
            return {((s.loc, s.value.value),)}
        return {((s.loc, v),) for v in values}
    if isinstance(s, Seq):
        a = store_sequences(s.first, values)
        b = store_sequences(s.second, values)
        return {p + q for p in a for q in b}
    if isinstance(s, Choice):
        return store_sequences(s.left, values) | store_sequences(s.right, values)
    if isinstance(s, Iterate):
        raise ValueError("iterate must be elaborated first")
    return {()}


def _per_location(seq: tuple) -> tuple:
    chains: dict[str, list[int]] = {}
    for x, k in seq:
        chains.setdefault(x, []).append(k)
    return tuple(sorted((x, tuple(ks)) for x, ks in chains.items()))


def _interleavings(chains: list[tuple]) -> Iterator[tuple]:
    pos = [0] * len(chains)
    total = sum(len(c) for c in chains)
    cur: list = []

    def rec():
        if len(cur) == total:
            yield tuple(cur)
            return
        for i, c in enumerate(chains):
            if pos[i] < len(c):
                cur.append(c[pos[i]])
                pos[i] += 1
                yield from rec()
                pos[i] -= 1
                cur.pop()

    yield from rec()


def candidate_memories(test: LitmusTest, values: frozenset[int], bound: int) -> Iterator[Memory]:
    """Memories whose per-thread messages match the stores of some path.

    A thread fulfils its writes to one location at increasing timestamps
    (fulfilling needs ``t > coh(x)`` and then sets ``coh(x) = t``), so only
    interleavings keeping each thread's per-location order are produced.
    """
    profiles = [sorted({_per_location(q) for q in store_sequences(s, values)}) for _, s in test.threads]
    for choice in itertools.product(*profiles):
        chains = [tuple(Write(x, k, tid) for k in ks)
                  for (tid, _), prof in zip(test.threads, choice) for x, ks in prof]
        if sum(len(c) for c in chains) > bound:
            continue
        for order in _interleavings(chains):
            yield (INI,) + order


def _visible(memory: Memory, tid: int, loads: frozenset[str]) -> tuple[Memory, tuple[int, ...]]:
    """Messages ``tid`` can read or fulfil, with their original timestamps.

    Views are maxima of such timestamps and rules only compare them, so a
    run on the compacted memory is a run on the full one, renumbered.
    """
    keep = [t for t, m in enumerate(memory) if m is INI or m.tid == tid or m.loc in loads]
    return tuple(memory[t] for t in keep), tuple(keep)


def _renumber(trace: tuple, positions: tuple[int, ...]) -> tuple:
    return tuple(lab if lab.ts is None else replace(lab, ts=positions[lab.ts]) for lab in trace)


def _prepare(test: LitmusTest, unroll: int) -> LitmusTest:
    if any(has_iterate(s) for _, s in test.threads):
        test = elaborate(test, unroll)
    return test


def local_runs(
    tid: int,
    stmt: Statement,
    registers: Iterable[str],
    memory: Memory,
    debug: bool = False,
    budget: _Budget | None = None,
    counter: list | None = None,
) -> dict[tuple, tuple[tuple, TState]]:
    """Final register valuations of one thread on a fixed memory.

    The thread starts with all its messages in ``memory`` as open
    promises.  Returns valuation -> (first trace found, final state).
    """
    start = (stmt, replace(ts_ini(registers), prom=tids_of(memory, tid)))
    results: dict[tuple, tuple[tuple, TState]] = {}
    seen = set()
    stack = [(start, ())]
    while stack:
        cur, trace = stack.pop()
        if cur in seen:
            continue
        seen.add(cur)
        if budget is not None and not budget.spend():
            break
        s, ts = cur
        if not ts.prom and finishes(s):
            key = tuple(sorted(ts.values().items()))
            results.setdefault(key, (trace, ts))
        succ = thread_step(cur, memory, tid)
        for label, nxt, _ in reversed(succ):
            if debug:
                check_monotone(ts, nxt[1])
                if counter is not None:
                    counter[0] += 1
            if nxt not in seen:
                stack.append((nxt, trace + (label,)))
    return results


def explore(
    test: LitmusTest,
    unroll: int = 2,
    max_memory: int | None = None,
    debug: bool = False,
    max_states: int | None = None,
) -> ExploreResult:
    """All reachable final states, by promises-first enumeration."""
    test = _prepare(test, unroll)
    values = value_universe(test, unroll)
    needed = default_memory_bound(test)
    bound = needed if max_memory is None else max_memory
    result = ExploreResult()
    if bound < needed:
        result.incomplete = True
        result.reasons.append(f"memory bound {bound} below store count {needed}")
    if test.unrolled:
        result.incomplete = True
        result.reasons.append(f"loops unrolled {unroll} times")
    budget = _Budget(max_states if max_states is not None else max_states_from_env())
    counter = [0]
    regs_of = {tid: statement_registers(s) for tid, s in test.threads}
    loads_of = {tid: frozenset(a.loc for a in walk(s) if isinstance(a, Load)) for tid, s in test.threads}
    cache: dict = {}
    for memory in candidate_memories(test, values, bound):
        per_thread = []
        for tid, s in test.threads:
            visible, positions = _visible(memory, tid, loads_of[tid])
            runs = cache.get((tid, visible))
            if runs is None:
                runs = cache[(tid, visible)] = local_runs(tid, s, regs_of[tid], visible, debug, budget, counter)
            if not runs:
                break
            per_thread.append((tid, runs, positions))
        if budget.hit:
            break
        if len(per_thread) < len(test.threads):
            continue
        prm = tuple(TransitionLabel("prm", m.tid, m.loc, m.val, t) for t, m in enumerate(memory) if t)
        for combo in itertools.product(*(sorted(r.items()) for _, r, _ in per_thread)):
            final = FinalState(tuple((tid, key) for (tid, _, _), (key, _) in zip(per_thread, combo)), memory)
            if final not in result.finals:
                result.finals.add(final)
                result.witnesses[final] = prm + tuple(
                    lab for (_, _, pos), (_, (tr, _)) in zip(per_thread, combo) for lab in _renumber(tr, pos))
    if budget.hit:
        result.incomplete = True
        result.reasons.append(f"state cap {budget.limit} reached")
    result.edges_checked = counter[0]
    result.states = budget.used
    return result


def check_outcome(results: ExploreResult | Iterable[FinalState], outcome: OutcomePredicate) -> Verdict:
    if isinstance(results, ExploreResult):
        finals, witnesses, incomplete = results.finals, results.witnesses, results.incomplete
    else:
        finals, witnesses, incomplete = set(results), {}, False
    for f in sorted(finals, key=lambda f: (f.key(), len(f.memory), str(f.memory))):
        if outcome.holds(f.valuation(), last_values(f.memory)):
            return Verdict(True, f, witnesses.get(f), incomplete)
    return Verdict(False, incomplete=incomplete)


def explore_unrestricted(
    test: LitmusTest,
    unroll: int = 2,
    max_memory: int | None = None,
    debug: bool = False,
    max_states: int | None = None,
) -> ExploreResult:
    """Reference scheduler: promises anywhere, every step certified."""
    test = _prepare(test, unroll)
    values = value_universe(test, unroll)
    bound = default_memory_bound(test) if max_memory is None else max_memory
    writes = {tid: sorted(store_writes(s, values)) for tid, s in test.threads}
    init = initial_state(test)
    result = ExploreResult()
    cert_cache: dict = {}
    step_cache: dict = {}
    seen = {init}
    stack = [(init, ())]
    counter = 0
    budget = _Budget(max_states if max_states is not None else max_states_from_env())
    while stack:
        if not budget.spend():
            result.incomplete = True
            result.reasons.append(f"state cap {budget.limit} reached")
            break
        state, trace = stack.pop()
        pool = state.pool
        if all(not ts.prom and finishes(s) for _, s, ts in pool):
            final = FinalState(tuple((tid, tuple(sorted(ts.values().items()))) for tid, _, ts in pool), state.memory)
            if final not in result.finals:
                result.finals.add(final)
                result.witnesses[final] = trace
        for i, (tid, s, ts) in enumerate(pool):
            skey = (tid, s, ts, state.memory)
            succ = step_cache.get(skey)
            if succ is None:
                succ = []
                for label, (s2, ts2), mem2 in thread_step((s, ts), state.memory, tid, writes[tid], bound):
                    key = (tid, s2, ts2, mem2)
                    ok = cert_cache.get(key)
                    if ok is None:
                        ok = cert_cache[key] = certifiable((s2, ts2), mem2, tid)
                    if ok:
                        succ.append((label, s2, ts2, mem2))
                step_cache[skey] = succ
            for label, s2, ts2, mem2 in succ:
                if debug:
                    check_monotone(ts, ts2)
                    counter += 1
                pool2 = pool[:i] + ((tid, s2, ts2),) + pool[i + 1:]
                nxt = ProgState(pool2, mem2)
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append((nxt, trace + (label,)))
    result.edges_checked = counter
    result.states = len(seen)
    return result
