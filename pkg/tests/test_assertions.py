import random

from wmmr.assertions import (
    enumerate_psi, final_states, matches, priors, register_value, validate_psi, views_from,
)
from wmmr.events import BarLoc, EventStructure, Ff, Ini, Prm, append_read_chain, extend, ini_structure
from wmmr.gen import Shape, random_test
from wmmr.promising import INI, TState, Write, check_monotone, explore, ts_ini
from wmmr.proof import _ts_of, check_reachable, outline_steps_from_trace


def reference():
    """ini ->{x} ff1(y,1) -> bar(a,y) -> bar(b,x), ini -> bar(b,x), with a ten-slot memory."""
    es = EventStructure(
        {0: Ini(), 1: Ff(1, "y", 1), 2: BarLoc(1, "a", "y"), 3: BarLoc(1, "b", "x")},
        [(0, 1), (1, 2), (0, 3), (2, 3)],
        {(0, 1): {"x"}},
    )
    filler = Write("z", 0, 2)
    mem = (INI,) + (filler,) * 5 + (Write("y", 1, 1), filler, filler, Write("z", 3, 1))
    return es, mem


def test_reference_built_by_operators():
    es, _ = reference()
    built = extend(extend(extend(ini_structure(), Ff(1, "y", 1)), BarLoc(1, "a", "y")), BarLoc(1, "b", "x"))
    assert built.flow == es.flow


def test_priors():
    es, _ = reference()
    assert priors(es, "bar_reg", reg="a") == {0, 1}
    assert priors(es, "fnc", tid=1) == set()
    assert priors(es, "tst", tid=1) == set()


def test_enumerate_psi_reference():
    es, mem = reference()
    assert enumerate_psi(es, mem) == [{0: 0, 1: 6}]
    bad = mem[:3] + (Write("x", 2, 2),) + mem[4:]
    assert enumerate_psi(es, bad) == []


def test_enumerate_psi_ini():
    for mem in [(INI,), (INI, Write("x", 1, 1)), (INI, Write("y", 2, 3), Write("x", 1, 1))]:
        assert enumerate_psi(ini_structure(), mem) == [{0: 0}]


def test_views_reference():
    es, mem = reference()
    ts = views_from(es, {0: 0, 1: 6}, mem, 1, ["a", "b"])
    assert ts.prom == {9}
    assert ts.v_C == ts.v_wNew == ts.coh_of("z") == 0
    assert ts.reg("a")[1] == ts.reg("b")[1] == ts.coh_of("y") == ts.coh_of("x") == 6
    assert ts.v_wOld == ts.v_read == 6
    assert ts.values() == {"a": 1, "b": 0}


def test_views_ini():
    assert views_from(ini_structure(), {0: 0}, (INI,), 1, ["a"]) == ts_ini(["a"])


def test_views_read_chain():
    es = extend(append_read_chain(ini_structure(), [Prm(1, "y", 1)]), BarLoc(2, "a", "y"))
    ts = views_from(es, {0: 0, 1: 1}, (INI, Write("y", 1, 1)), 2, ["a"])
    assert ts.reg("a") == (1, 1) and ts.v_read == 1
    assert register_value(es, "a") == 1


def test_matches():
    es, mem = reference()
    ts = views_from(es, {0: 0, 1: 6}, mem, 1, ["a", "b"])
    regs = {1: ["a", "b"]}
    assert matches(es, {1: ts}, mem, regs)
    assert matches(ini_structure(), {1: ts_ini()}, (INI,))
    assert not matches(es, {1: ts.evolve(prom=frozenset())}, mem, regs)


def test_validate_psi_reports():
    es, mem = reference()
    assert validate_psi(es, mem, {0: 0, 1: 6}) == []
    assert validate_psi(es, mem, {0: 0}) == ["mapping is not total on the memory events"]
    assert any("mapped to" in p for p in validate_psi(es, mem, {0: 0, 1: 9}))


def test_enumerated_psi_revalidate(corpus):
    for name in ("MP", "LB", "WRC"):
        res = check_reachable(corpus[name], full=True)
        for w in res.witnesses.values():
            for es in w.structures:
                memory = w.final.memory
                for psi in enumerate_psi(es, memory):
                    assert validate_psi(es, memory, psi) == []


def _final_regs(corpus, name):
    t = corpus[name]
    w = check_reachable(t).witness
    regs = {tid: t.registers(tid) for tid in t.tids}
    final, states = final_states(w.structures, w.config, t.tids, regs)
    assert all(not s.prom for s in states)
    return final.valuation()


def test_final_states_examples(corpus):
    assert _final_regs(corpus, "MP") == {"a": 1, "b": 0}
    v = _final_regs(corpus, "WRC")
    assert (v["a"], v["b"], v["c"]) == (1, 1, 0)
    assert _final_regs(corpus, "LB") == {"a": 1, "b": 1}


def test_views_monotone_along_prefixes(corpus):
    rng = random.Random(3)
    tests = list(corpus.values()) + [random_test(rng, Shape(), f"m{i}") for i in range(30)]
    for t in tests:
        for final, trace in explore(t).witnesses.items():
            memory = (INI,) + tuple(Write(l.loc, l.val, l.tid) for l in trace if l.kind == "prm")
            prev: dict = {}
            for _, tid, es in outline_steps_from_trace(trace, t.tids, "extended"):
                psi = {e: _ts_of(es, e) for e in es.memory_events}
                ts = views_from(es, psi, memory, tid, t.registers(tid))
                check_monotone(prev.get(tid, TState(regs=ts.regs)), ts)
                prev[tid] = ts
