"""Location-coloured flow event structures.

A structure is a set of labelled events with a flow relation, a symmetric
conflict relation and a location restriction ``lam(d, f)`` on pairs of
events.  Local (per-thread) structures use dense integer ids with the
ini event at 0; composite events are tuples with :data:`STAR` in the
slots of threads that do not take part.

The restriction map is total on ``E x E`` with default empty set; only
non-empty entries are stored.  Entries may sit on pairs that are not
direct flow edges (see :func:`restrict`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Iterator, Sequence

from .litmus import BExpr, Expr, expr_registers, format_bexpr, format_expr


class _Star:
    __slots__ = ()

    def __repr__(self) -> str:
        return "*"

    def __reduce__(self):
        return (_star, ())


def _star():
    return STAR


STAR = _Star()


# -- labels ------------------------------------------------------------------


@dataclass(frozen=True)
class Ini:
    def __str__(self) -> str:
        return "ini"


@dataclass(frozen=True)
class Prm:
    """Read of a promise made by thread ``tid``."""

    tid: int
    loc: str
    val: int
    ts: int | None = None

    def __str__(self) -> str:
        t = "" if self.ts is None else f"@{self.ts}"
        return f"prm{self.tid}({self.loc},{self.val}){t}"


@dataclass(frozen=True)
class Ff:
    tid: int
    loc: str
    val: int
    ts: int | None = None

    def __str__(self) -> str:
        t = "" if self.ts is None else f"@{self.ts}"
        return f"ff{self.tid}({self.loc},{self.val}){t}"


@dataclass(frozen=True)
class BarLoc:
    tid: int
    reg: str
    loc: str

    def __str__(self) -> str:
        return f"bar({self.reg},{self.loc})"


@dataclass(frozen=True)
class BarExp:
    tid: int
    reg: str
    expr: Expr

    def __str__(self) -> str:
        return f"bar({self.reg},{format_expr(self.expr)})"


@dataclass(frozen=True)
class Fnc:
    tid: int

    def __str__(self) -> str:
        return f"fnc{self.tid}"


@dataclass(frozen=True)
class Tst:
    tid: int
    cond: BExpr

    def __str__(self) -> str:
        return f"tst{self.tid}({format_bexpr(self.cond)})"


INI_LABEL = Ini()
Label = object


def is_memory(lab) -> bool:
    return isinstance(lab, (Ini, Prm, Ff))


def is_bar(lab) -> bool:
    return isinstance(lab, (BarLoc, BarExp))


def on_loc(lab, x: str) -> bool:
    """Membership in Act^x; ini acts on every location."""
    return isinstance(lab, Ini) or (isinstance(lab, (Prm, Ff)) and lab.loc == x)


def complement(lab):
    """The read label that synchronises with a fulfill label."""
    return Prm(lab.tid, lab.loc, lab.val, lab.ts)


def label_tid(lab) -> int | None:
    return getattr(lab, "tid", None)


# -- structures --------------------------------------------------------------


def event_sort_key(e):
    if isinstance(e, tuple):
        return tuple(-1 if x is STAR else x for x in e)
    return (e,)


class EventStructure:
    """Immutable event structure.  Derived relations are cached lazily."""

    def __init__(self, labels: dict, flow: Iterable = (), lam: dict | None = None, conflict: Iterable = ()):
        self.labels: dict = dict(labels)
        self.flow: frozenset = frozenset(flow)
        self.lam: dict = {k: frozenset(v) for k, v in (lam or {}).items() if v}
        conf = set()
        for d, f in conflict:
            conf.add((d, f))
            conf.add((f, d))
        self.conflict: frozenset = frozenset(conf)

    @property
    def events(self) -> list:
        return sorted(self.labels, key=event_sort_key)

    def label(self, e):
        return self.labels[e]

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, e) -> bool:
        return e in self.labels

    def restriction(self, d, f) -> frozenset:
        return self.lam.get((d, f), frozenset())

    @cached_property
    def preds(self) -> dict:
        out = {e: set() for e in self.labels}
        for d, f in self.flow:
            out[f].add(d)
        return out

    @cached_property
    def succs(self) -> dict:
        out = {e: set() for e in self.labels}
        for d, f in self.flow:
            out[d].add(f)
        return out

    @cached_property
    def ancestors(self) -> dict:
        """e -> events strictly flow+-before e."""
        out: dict = {}
        for e in self.labels:
            seen = set()
            stack = list(self.preds[e])
            while stack:
                d = stack.pop()
                if d in seen:
                    continue
                seen.add(d)
                stack.extend(self.preds[d])
            out[e] = frozenset(seen)
        return out

    def before(self, d, f) -> bool:
        return d in self.ancestors[f]

    def is_acyclic(self, subset: Iterable | None = None) -> bool:
        nodes = set(self.labels) if subset is None else set(subset)
        indeg = {e: 0 for e in nodes}
        for d, f in self.flow:
            if d in nodes and f in nodes:
                indeg[f] += 1
        ready = [e for e, k in indeg.items() if k == 0]
        n = 0
        while ready:
            e = ready.pop()
            n += 1
            for f in self.succs[e]:
                if f in nodes:
                    indeg[f] -= 1
                    if indeg[f] == 0:
                        ready.append(f)
        return n == len(nodes)

    def of(self, pred: Callable) -> list:
        return [e for e in self.events if pred(self.labels[e])]

    @cached_property
    def memory_events(self) -> list:
        return self.of(is_memory)

    @cached_property
    def ini(self):
        inis = self.of(lambda lab: isinstance(lab, Ini))
        if len(inis) != 1:
            raise ValueError(f"expected exactly one ini event, found {len(inis)}")
        return inis[0]

    def is_local(self) -> bool:
        return not self.conflict

    def key(self) -> tuple:
        """Canonical form used to deduplicate identically built structures."""
        return (
            tuple(sorted((event_sort_key(e), str(l), repr(l)) for e, l in self.labels.items())),
            tuple(sorted((event_sort_key(d), event_sort_key(f)) for d, f in self.flow)),
            tuple(sorted((event_sort_key(d), event_sort_key(f), tuple(sorted(L))) for (d, f), L in self.lam.items())),
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, EventStructure) and (self.labels, self.flow, self.lam, self.conflict) == (
            other.labels, other.flow, other.lam, other.conflict)

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"EventStructure({format_structure(self)})"

    def restricted_to(self, subset: Iterable) -> "EventStructure":
        keep = set(subset)
        return EventStructure(
            {e: l for e, l in self.labels.items() if e in keep},
            [(d, f) for d, f in self.flow if d in keep and f in keep],
            {(d, f): L for (d, f), L in self.lam.items() if d in keep and f in keep},
            [(d, f) for d, f in self.conflict if d in keep and f in keep],
        )


def format_event(es: EventStructure, e) -> str:
    if isinstance(e, tuple):
        name = "(" + ",".join("*" if x is STAR else f"e{i + 1}.{x}" for i, x in enumerate(e)) + ")"
    else:
        name = f"e{e}"
    return f"{name}:{es.labels[e]}"


def format_structure(es: EventStructure) -> str:
    """One-line text form: events then flow edges with restrictions."""
    parts = [format_event(es, e) for e in es.events]
    edges = []
    for d, f in sorted(es.flow, key=lambda p: (event_sort_key(p[0]), event_sort_key(p[1]))):
        L = es.restriction(d, f)
        tag = "{" + ",".join(sorted(L)) + "}" if L else ""
        edges.append(f"{_short(d)}->{tag}{_short(f)}")
    extra = [
        f"{_short(d)}~{{{','.join(sorted(L))}}}~{_short(f)}"
        for (d, f), L in sorted(es.lam.items(), key=lambda p: (event_sort_key(p[0][0]), event_sort_key(p[0][1])))
        if (d, f) not in es.flow
    ]
    return "; ".join(parts) + " | " + ", ".join(edges + extra)


def _short(e) -> str:
    if isinstance(e, tuple):
        return "(" + ",".join("*" if x is STAR else str(x) for x in e) + ")"
    return f"e{e}"


def to_dot(es: EventStructure, highlight: Iterable = (), name: str = "es") -> str:
    """Graphviz rendering: flow edges solid, restrictions as edge labels,
    restrictions on non-flow pairs dotted, conflicts as dashed red lines."""
    ids = {e: f"n{i}" for i, e in enumerate(es.events)}
    hl = set(highlight)
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=box, fontname=monospace];"]
    for e in es.events:
        style = ", style=bold" if e in hl else ""
        text = format_event(es, e).replace('"', '\\"')
        lines.append(f'  {ids[e]} [label="{text}"{style}];')
    for d, f in sorted(es.flow, key=lambda p: (event_sort_key(p[0]), event_sort_key(p[1]))):
        L = es.restriction(d, f)
        attr = f' [label="{{{",".join(sorted(L))}}}", color=red]' if L else ""
        lines.append(f"  {ids[d]} -> {ids[f]}{attr};")
    for (d, f), L in sorted(es.lam.items(), key=lambda p: (event_sort_key(p[0][0]), event_sort_key(p[0][1]))):
        if (d, f) not in es.flow:
            lines.append(f'  {ids[d]} -> {ids[f]} [label="{{{",".join(sorted(L))}}}", style=dotted, color=red];')
    done = set()
    for d, f in sorted(es.conflict, key=lambda p: (event_sort_key(p[0]), event_sort_key(p[1]))):
        if (f, d) in done:
            continue
        done.add((d, f))
        lines.append(f"  {ids[d]} -> {ids[f]} [dir=none, style=dashed, color=gray];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- last --------------------------------------------------------------------


def last(es: EventStructure, *patterns: Callable) -> set:
    """Flow-maximal events of each pattern class, united over patterns.

    A pattern is a predicate on labels.  For a class that is totally
    ordered by flow this is the single last event; classes such as tests
    on unrelated registers may have several maximal events.
    """
    out = set()
    for pat in patterns:
        cls = [e for e, l in es.labels.items() if pat(l)]
        cls_set = set(cls)
        for e in cls:
            if not any(e in es.ancestors[f] for f in cls_set if f != e):
                out.add(e)
    return out


def last_one(es: EventStructure, pattern: Callable):
    """The unique last event of a pattern, or None when the class is empty."""
    found = last(es, pattern)
    if len(found) > 1:
        raise ValueError(f"no unique last event: {sorted(found, key=event_sort_key)}")
    return next(iter(found), None)


def act_x(x: str) -> Callable:
    return lambda l: on_loc(l, x)


def fnc_of(tid: int) -> Callable:
    return lambda l: isinstance(l, Fnc) and l.tid == tid


def any_fnc(l) -> bool:
    return isinstance(l, Fnc)


def tst_of(tid: int) -> Callable:
    return lambda l: isinstance(l, Tst) and l.tid == tid


def bar_of(reg: str) -> Callable:
    return lambda l: is_bar(l) and l.reg == reg


def any_bar(l) -> bool:
    return is_bar(l)


def ff_on(x: str) -> Callable:
    return lambda l: isinstance(l, Ff) and l.loc == x


# -- construction ------------------------------------------------------------


def ini_structure() -> EventStructure:
    return EventStructure({0: INI_LABEL})


def _fresh(es: EventStructure) -> int:
    return max(es.labels) + 1 if es.labels else 0


def _add(es: EventStructure, label, preds: Iterable) -> EventStructure:
    e = _fresh(es)
    labels = dict(es.labels)
    labels[e] = label
    return EventStructure(labels, es.flow | {(d, e) for d in preds}, es.lam, es.conflict)


def extend(es: EventStructure, label, via: str | None = None) -> EventStructure:
    """Add one event by the matching plus-operation.

    ``via`` names the register of a register store; the new fulfill then
    also flows from the last bar on that register.
    """
    if es.conflict:
        raise ValueError("extend needs a conflict-free structure")
    if isinstance(label, Ff):
        pats = [act_x(label.loc), fnc_of(label.tid), tst_of(label.tid)]
        if via is not None:
            pats.append(bar_of(via))
        return _add(es, label, last(es, *pats))
    if isinstance(label, BarLoc):
        return _add(es, label, last(es, act_x(label.loc), fnc_of(label.tid), any_bar))
    if isinstance(label, BarExp):
        regs = set(expr_registers(label.expr)) | {label.reg}
        return _add(es, label, last(es, *(bar_of(r) for r in sorted(regs))))
    if isinstance(label, Fnc):
        return _add(es, label, last(es, lambda l: not isinstance(l, Tst)))
    if isinstance(label, Tst):
        regs = sorted(expr_registers(label.cond))
        return _add(es, label, last(es, *(bar_of(r) for r in regs)))
    raise TypeError(f"cannot extend with {label!r}")


def is_sequential(es: EventStructure) -> bool:
    evs = es.events
    return all(a == b or es.before(a, b) or es.before(b, a) for a in evs for b in evs)


def chain_structure(labels: Sequence, start: int = 0) -> EventStructure:
    """A sequential structure ``l0 -> l1 -> ...`` with ids from ``start``."""
    ids = list(range(start, start + len(labels)))
    return EventStructure(dict(zip(ids, labels)), list(zip(ids, ids[1:])))


def append_read_chain(es: EventStructure, chain: EventStructure | Sequence,
                      anchor: str = "views") -> EventStructure:
    """Append a sequential chain of reads after ``es``.

    With ``anchor="views"`` each chain event on ``x`` flows from the last
    fence, the last bars and the last of ini or a fulfill on ``x``.  With
    ``anchor="location"`` it flows only from the last event on ``x``
    (ini, read or fulfill).  A list of labels is turned into a chain with
    fresh ids.
    """
    if not isinstance(chain, EventStructure):
        chain = chain_structure(list(chain), _fresh(es))
    if not chain.labels:
        return es
    if set(chain.labels) & set(es.labels):
        raise ValueError("chain event ids clash with the structure")
    if not is_sequential(chain):
        raise ValueError("read chain must be sequential")
    for l in chain.labels.values():
        if not isinstance(l, Prm):
            raise ValueError(f"read chain may only contain reads, got {l}")
    labels = dict(es.labels)
    labels.update(chain.labels)
    flow = set(es.flow) | set(chain.flow)
    lam = dict(es.lam)
    lam.update(chain.lam)
    if anchor not in ("views", "location"):
        raise ValueError(f"unknown anchor {anchor!r}")
    common = last(es, any_fnc, any_bar) if anchor == "views" else set()
    for c, l in chain.labels.items():
        x = l.loc
        if anchor == "views":
            src = common | last(es, lambda m, x=x: isinstance(m, Ini) or (isinstance(m, Ff) and m.loc == x))
        else:
            src = last(es, act_x(x))
        flow |= {(d, c) for d in src}
    return EventStructure(labels, flow, lam, es.conflict)


# -- priors ------------------------------------------------------------------


def memory_before(es: EventStructure, targets: Iterable) -> set:
    out = set()
    for t in targets:
        out |= {d for d in es.ancestors[t] if is_memory(es.labels[d])}
    return out


def ff_events(es: EventStructure, tid: int, x: str | None = None) -> set:
    return {e for e, l in es.labels.items() if isinstance(l, Ff) and l.tid == tid and (x is None or l.loc == x)}


def thread_registers(es: EventStructure, tid: int) -> set:
    return {l.reg for l in es.labels.values() if is_bar(l) and l.tid == tid}


def pr_fnc(es: EventStructure, tid: int) -> set:
    return memory_before(es, last(es, fnc_of(tid)))


def pr_bar_reg(es: EventStructure, reg: str) -> set:
    return memory_before(es, last(es, bar_of(reg)))


def pr_bar(es: EventStructure, tid: int, registers: Iterable[str] | None = None) -> set:
    regs = set(registers) if registers is not None else thread_registers(es, tid)
    out = set()
    for a in regs:
        out |= pr_bar_reg(es, a)
    return out


def pr_bar_loc(es: EventStructure, tid: int, x: str, registers: Iterable[str] | None = None) -> set:
    """prBar restricted to events on ``x``."""
    return {e for e in pr_bar(es, tid, registers) if on_loc(es.labels[e], x)}


def pr_tst(es: EventStructure, tid: int) -> set:
    return memory_before(es, last(es, tst_of(tid)))


def restrict(es: EventStructure, e, x: str, tid: int, registers: Iterable[str] | None = None,
             direct_only: bool = False) -> EventStructure:
    """Forbid writes to ``x`` between ``e`` and the events a read depends on.

    Targets are (prFnc n Ff) u prBar u Ff^x of thread ``tid``.  By default
    every target not flow-before ``e`` receives ``x`` in ``lam(e, f)``;
    with ``direct_only`` only targets that are direct flow successors of
    ``e`` do, which loses constraints on indirect successors.
    """
    ffs = ff_events(es, tid)
    targets = (pr_fnc(es, tid) & ffs) | pr_bar(es, tid, registers) | ff_events(es, tid, x)
    lam = dict(es.lam)
    for f in targets:
        if f == e or f in es.ancestors[e]:
            continue
        if direct_only and (e, f) not in es.flow:
            continue
        lam[(e, f)] = lam.get((e, f), frozenset()) | {x}
    return EventStructure(es.labels, es.flow, lam, es.conflict)


# -- parallel composition ----------------------------------------------------


def local_reads(es: EventStructure) -> list:
    return es.of(lambda l: isinstance(l, Prm))


def parallel_compose(locals_: Sequence[EventStructure]) -> EventStructure:
    """Synchronising product of conflict-free local structures."""
    n = len(locals_)
    labels: dict = {}
    inis = tuple(es.ini for es in locals_)
    labels[inis] = INI_LABEL
    for i, es in enumerate(locals_):
        for e in es.events:
            if e != es.ini:
                labels[tuple(e if j == i else STAR for j in range(n))] = es.labels[e]
    for i, es in enumerate(locals_):
        for f in es.events:
            lab = es.labels[f]
            if not isinstance(lab, Ff):
                continue
            want = complement(lab)
            options = []
            for j, other in enumerate(locals_):
                if j == i:
                    options.append([f])
                else:
                    options.append([STAR] + [r for r in other.events if other.labels[r] == want])
            for combo in itertools.product(*options):
                if sum(1 for x in combo if x is not STAR) >= 2:
                    labels[combo] = lab
    return _compose_relations(locals_, labels)


def _compose_relations(locals_: Sequence[EventStructure], labels: dict) -> EventStructure:
    n = len(locals_)
    by_slot = [dict() for _ in range(n)]
    for ev in labels:
        for i, x in enumerate(ev):
            if x is not STAR:
                by_slot[i].setdefault(x, []).append(ev)
    flow = set()
    lam: dict = {}
    for i, es in enumerate(locals_):
        for a, b in es.flow:
            for d in by_slot[i].get(a, ()):
                for f in by_slot[i].get(b, ()):
                    flow.add((d, f))
        for (a, b), L in es.lam.items():
            for d in by_slot[i].get(a, ()):
                for f in by_slot[i].get(b, ()):
                    lam[(d, f)] = lam.get((d, f), frozenset()) | L
    conflict = set()
    for i, es in enumerate(locals_):
        for (a, b) in es.conflict:
            for d in by_slot[i].get(a, ()):
                for f in by_slot[i].get(b, ()):
                    conflict.add((d, f))
        for x, evs in by_slot[i].items():
            for d, f in itertools.combinations(evs, 2):
                conflict.add((d, f))
    return EventStructure(labels, flow, lam, conflict)


def compose_subset(locals_: Sequence[EventStructure], tuples: Iterable[tuple]) -> EventStructure:
    """The composition restricted to the given composite events.

    Equal to ``parallel_compose(locals_).restricted_to(tuples)`` but built
    without the full product.
    """
    labels = {}
    for ev in tuples:
        labels[ev] = composite_label(locals_, ev)
    return _compose_relations(locals_, labels)


def composite_label(locals_: Sequence[EventStructure], ev: tuple):
    labs = [locals_[i].labels[x] for i, x in enumerate(ev) if x is not STAR]
    if all(isinstance(l, Ini) for l in labs) and len(labs) == len(locals_):
        return INI_LABEL
    if len(labs) == 1:
        return labs[0]
    ffs = [l for l in labs if isinstance(l, Ff)]
    if len(ffs) != 1:
        raise ValueError(f"not a composite event: {ev}")
    return ffs[0]


def synchronizable(locals_: Sequence[EventStructure]) -> bool:
    """Every read of every thread has some matching fulfill elsewhere."""
    ffs = set()
    for es in locals_:
        ffs |= {complement(l) for l in es.labels.values() if isinstance(l, Ff)}
    return all(l in ffs for es in locals_ for l in es.labels.values() if isinstance(l, Prm))


# -- configurations ----------------------------------------------------------


def is_configuration(es: EventStructure, C: Iterable) -> bool:
    C = set(C)
    if not C <= set(es.labels):
        return False
    if not es.is_acyclic(C):
        return False
    if any((d, f) in es.conflict for d in C for f in C):
        return False
    for f in C:
        for d in es.preds[f]:
            if d in C:
                continue
            if not any((d, d2) in es.conflict and (d2, f) in es.flow for d2 in C):
                return False
    return True


def thread_covering(locals_: Sequence[EventStructure], C: Iterable) -> bool:
    for i, es in enumerate(locals_):
        proj = {ev[i] for ev in C if ev[i] is not STAR}
        if proj != set(es.labels):
            return False
    return True


def unsynchronised_reads(locals_: Sequence[EventStructure], C: Iterable) -> list:
    out = []
    for ev in C:
        slots = [(i, x) for i, x in enumerate(ev) if x is not STAR]
        if len(slots) == 1:
            i, x = slots[0]
            if isinstance(locals_[i].labels[x], Prm):
                out.append(ev)
    return out


def check_linearization(es: EventStructure, order: Sequence) -> list[str]:
    """Problems with ``order`` as a memory-consistent linearization of ``es``.

    ``order`` must list every memory event of ``es`` once, respect flow+
    and keep writes to restricted locations out of every restricted pair.
    """
    problems = []
    mem = set(es.memory_events)
    if set(order) != mem or len(order) != len(mem):
        problems.append("order is not a permutation of the memory events")
        return problems
    pos = {e: i for i, e in enumerate(order)}
    for f in order:
        for d in es.ancestors[f]:
            if d in pos and pos[d] > pos[f]:
                problems.append(f"{_short(d)} flows before {_short(f)} but is ordered after it")
    for (d, f), L in es.lam.items():
        if d not in pos or f not in pos:
            continue
        for i in range(pos[d] + 1, pos[f]):
            lab = es.labels[order[i]]
            if isinstance(lab, Ini) or lab.loc in L:
                problems.append(f"{_short(order[i])} writes {sorted(L)} between {_short(d)} and {_short(f)}")
    return problems


def find_linearization(es: EventStructure, accept: Callable | None = None) -> list | None:
    """A memory-consistent linearization of the memory events, if any.

    Backtracking topological enumeration; without ``accept`` failed sets
    of placed events are memoised, since the open restrictions depend on
    that set alone.
    """
    mem = es.memory_events
    mem_set = set(mem)
    before = {e: es.ancestors[e] & mem_set for e in mem}
    loc = {}
    for e in mem:
        lab = es.labels[e]
        loc[e] = None if isinstance(lab, Ini) else lab.loc
    cons = [(d, f, L) for (d, f), L in es.lam.items() if d in mem_set and f in mem_set]
    cons_from: dict = {}
    for d, f, L in cons:
        cons_from.setdefault(d, []).append((f, L))
    if not es.is_acyclic():
        return None
    failed: set = set()
    order: list = []
    placed: set = set()
    open_cons: list = []   # (f, L) restrictions whose source is placed but target is not

    def rec() -> bool:
        if len(order) == len(mem):
            return accept is None or accept(list(order))
        key = frozenset(placed)
        if accept is None and key in failed:
            return False
        for e in mem:
            if e in placed or not before[e] <= placed:
                continue
            x = loc[e]
            bad = False
            for f, L in open_cons:
                if f != e and (x is None or x in L):
                    bad = True
                    break
            if bad:
                continue
            closed = [(f, L) for f, L in open_cons if f == e]
            for c in closed:
                open_cons.remove(c)
            new = [(f, L) for f, L in cons_from.get(e, ()) if f not in placed]
            open_cons.extend(new)
            placed.add(e)
            order.append(e)
            if rec():
                return True
            order.pop()
            placed.discard(e)
            for c in new:
                open_cons.remove(c)
            open_cons.extend(closed)
        if accept is None:
            failed.add(key)
        return False

    return list(order) if rec() else None


@dataclass
class InterferenceFree:
    config: list           # composite events of C
    structure: EventStructure   # the composition restricted to C
    order: list            # memory events of C in linearization order


def candidate_configurations(locals_: Sequence[EventStructure]) -> Iterator[list]:
    """Thread-covering, conflict-free candidates without unsynchronised reads.

    Each is determined by assigning every read a matching fulfill, with at
    most one reader per thread for each fulfill.
    """
    n = len(locals_)
    reads = [(j, r, locals_[j].labels[r]) for j in range(n) for r in local_reads(locals_[j])]
    fulfills: dict = {}
    for i, es in enumerate(locals_):
        for f in es.events:
            lab = es.labels[f]
            if isinstance(lab, Ff):
                fulfills.setdefault(complement(lab), []).append((i, f))
    options = []
    for j, r, lab in reads:
        opts = [(i, f) for i, f in fulfills.get(lab, ()) if i != j]
        if not opts:
            return
        options.append(opts)
    assign: dict = {}   # (i, f) -> {j: r}

    def build() -> list:
        tuples = [tuple(es.ini for es in locals_)]
        for i, es in enumerate(locals_):
            for e in es.events:
                lab = es.labels[e]
                if isinstance(lab, (Ini, Prm)):
                    continue
                slots = [STAR] * n
                slots[i] = e
                for j, r in assign.get((i, e), {}).items():
                    slots[j] = r
                tuples.append(tuple(slots))
        return tuples

    def rec(k: int):
        if k == len(reads):
            yield build()
            return
        j, r, _ = reads[k]
        for i, f in options[k]:
            slot = assign.setdefault((i, f), {})
            if j in slot:
                continue
            slot[j] = r
            yield from rec(k + 1)
            del slot[j]

    yield from rec(0)


def find_interference_free(
    composition: EventStructure | None,
    locals_: Sequence[EventStructure],
    accept: Callable | None = None,
) -> InterferenceFree | None:
    """First interference-free configuration in enumeration order.

    ``composition`` may be None; candidates are then built directly from
    the local structures.  ``accept(structure, order)`` can reject a
    witness and continue the search.
    """
    for C in candidate_configurations(locals_):
        if composition is not None and not all(ev in composition.labels for ev in C):
            continue
        sub = compose_subset(locals_, C)
        if not sub.is_acyclic():
            continue
        inner = None if accept is None else (lambda order, sub=sub: accept(sub, order))
        order = find_linearization(sub, inner)
        if order is not None:
            return InterferenceFree(sorted(C, key=event_sort_key), sub, order)
    return None


def all_interference_free(locals_: Sequence[EventStructure]) -> Iterator[InterferenceFree]:
    for C in candidate_configurations(locals_):
        sub = compose_subset(locals_, C)
        if not sub.is_acyclic():
            continue
        order = find_linearization(sub)
        if order is not None:
            yield InterferenceFree(sorted(C, key=event_sort_key), sub, order)
