import itertools
import random

import pytest

from wmmr.gen import Shape, random_test
from wmmr.litmus import (
    BinOp, Const, Dmb, LitmusTest, Load, OutcomePredicate, Reg, SKIP, Store, parse_litmus,
    value_universe,
)
from wmmr.promising import (
    INI, FinalState, TState, ViewMonotonicityError, Write, certifiable, check_monotone,
    check_outcome, expeval, explore, explore_unrestricted, initial_state, local_runs,
    statement_registers, store_profiles, thread_step, ts_ini,
)


def test_initial_state_lb(corpus):
    st = initial_state(corpus["LB"])
    assert st.memory == (INI,)
    assert [tid for tid, _, _ in st.pool] == [1, 2]
    for _, _, ts in st.pool:
        assert ts.prom == frozenset()
        assert (ts.v_read, ts.v_wOld, ts.v_wNew, ts.v_C, ts.coh) == (0, 0, 0, 0, ())
        assert all(vv == (0, 0) for _, vv in ts.regs)


def test_initial_state_single_skip():
    st = initial_state(LitmusTest("t", ((1, SKIP),)))
    assert len(st.pool) == 1 and st.memory == (INI,)


def test_expeval():
    regs = {"a": (2, 3), "b": (1, 7)}
    assert expeval(Const(5), regs) == (5, 0)
    assert expeval(Reg("a"), regs) == (2, 3)
    assert expeval(BinOp("+", Reg("a"), Reg("b")), regs) == (3, 7)


def test_read_from_ini():
    ts = ts_ini(["a"])
    succ = thread_step((Load("a", "y"), ts), (INI,), 1)
    assert len(succ) == 1
    label, (_, ts2), mem = succ[0]
    assert label.kind == "rd" and label.ts == 0
    assert ts2.reg("a") == (0, 0)
    assert mem == (INI,)


def test_fulfill_promise():
    ts = TState(prom=frozenset({1}))
    mem = (INI, Write("x", 1, 1))
    succ = [s for s in thread_step((Store("x", Const(1)), ts), mem, 1) if s[0].kind == "ff"]
    assert len(succ) == 1
    _, (_, ts2), _ = succ[0]
    assert ts2.coh_of("x") == 1 and ts2.v_wOld == 1 and ts2.prom == frozenset()


def test_fence_joins_views():
    ts = TState(v_read=2, v_wOld=6)
    (label, (_, ts2), _), = [s for s in thread_step((Dmb(), ts), (INI,), 1) if s[0].kind == "fnc"]
    assert ts2.v_read == 6 and ts2.v_wNew == 6


def test_promise_appends_at_end():
    succ = [s for s in thread_step((Store("x", Const(1)), ts_ini()), (INI,), 1, [("x", 1)])
            if s[0].kind == "prm"]
    assert len(succ) == 1
    label, (_, ts2), mem = succ[0]
    assert label.ts == 1 and mem == (INI, Write("x", 1, 1)) and ts2.prom == {1}


def test_read_blocked_by_coherence():
    # coh(x)=2 forbids reading the older message at 1
    ts = TState(coh=(("x", 2),), regs=(("a", (0, 0)),))
    mem = (INI, Write("x", 1, 2), Write("x", 2, 2))
    seen = {lab.ts for lab, _, _ in thread_step((Load("a", "x"), ts), mem, 1) if lab.kind == "rd"}
    assert seen == {2}


def test_certifiable_examples(corpus):
    assert certifiable((SKIP, TState()), (INI,), 1)
    assert not certifiable((SKIP, TState(prom=frozenset({1}))), (INI, Write("x", 1, 1)), 1)
    lb1 = corpus["LB"].thread(1)
    ts = ts_ini(["a"]).evolve(prom=frozenset({1}))
    assert certifiable((lb1, ts), (INI, Write("x", 1, 1)), 1)


def _vals(res, regs):
    return {tuple(dict(k)[r] for r in regs) for k in res.valuations()}


def test_explore_lb(corpus):
    assert (1, 1) in _vals(explore(corpus["LB"]), "ab")
    assert (1, 1) not in _vals(explore(corpus["LB+dmb"]), "ab")


def test_sb_oracle_set(corpus):
    # frozen oracle: every schedule and promise placement, enumerated by hand
    oracle = {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert _vals(explore(corpus["SB"]), "ab") == oracle
    assert {tuple(dict(f.key())[r] for r in "ab") for f in explore_unrestricted(corpus["SB"]).finals} == oracle


def test_check_outcome(corpus):
    assert check_outcome(explore(corpus["MP"]), corpus["MP"].outcome).reachable
    v = check_outcome(explore(corpus["MP+dmb"]), corpus["MP+dmb"].outcome)
    assert not v.reachable and v.label == "unreachable"
    assert not check_outcome(set(), OutcomePredicate((("a", 1),))).reachable


def test_witness_trace_is_promises_first(corpus):
    res = explore(corpus["LB"])
    v = check_outcome(res, corpus["LB"].outcome)
    kinds = [lab.kind for lab in v.witness]
    first_other = next(i for i, k in enumerate(kinds) if k != "prm")
    assert "prm" not in kinds[first_other:]


def test_memory_bound_flagged(corpus):
    res = explore(corpus["LB"], max_memory=1)
    assert res.incomplete and "memory bound" in res.reasons[0]


def test_unrolled_flagged():
    t = parse_litmus("thread 1:\n  loop { x := 1 }\nthread 2:\n  a := x\n")
    res = explore(t, unroll=1)
    assert res.incomplete
    assert {dict(k)["a"] for k in res.valuations()} == {0, 1}


def test_state_cap_flagged(corpus):
    res = explore(corpus["IRIW"], max_states=5)
    assert res.incomplete and any("state cap" in r for r in res.reasons)


def test_check_monotone():
    check_monotone(TState(v_read=1), TState(v_read=2))
    with pytest.raises(ViewMonotonicityError):
        check_monotone(TState(v_read=3), TState(v_read=2))
    with pytest.raises(ViewMonotonicityError):
        check_monotone(TState(), TState(regs=(("a", (1, 4)),), v_read=2))


def test_explore_debug_checks_monotonicity(corpus):
    for t in corpus.values():
        assert explore(t, debug=True).edges_checked > 0


# -- the memory enumeration prunes soundly -------------------------------------

def _naive_explore(test: LitmusTest) -> set:
    """Every permutation of every store profile, each thread run on the full memory."""
    values = value_universe(test)
    regs = {tid: statement_registers(s) for tid, s in test.threads}
    out = set()
    profiles = [sorted(store_profiles(s, values)) for _, s in test.threads]
    for choice in itertools.product(*profiles):
        msgs = [Write(x, k, tid) for (tid, _), prof in zip(test.threads, choice) for x, k in prof]
        for perm in set(itertools.permutations(msgs)):
            memory = (INI,) + perm
            runs = [local_runs(tid, s, regs[tid], memory) for tid, s in test.threads]
            for combo in itertools.product(*(sorted(r) for r in runs)):
                out.add(FinalState(tuple(zip(test.tids, combo)), memory))
    return out


def test_explore_matches_naive_enumeration(corpus):
    rng = random.Random(11)
    tests = [corpus[n] for n in ("LB", "SB", "MP", "WRC")]
    tests += [random_test(rng, Shape(max_stmts=3), f"n{i}") for i in range(25)]
    for t in tests:
        assert explore(t).finals == _naive_explore(t), t.name
