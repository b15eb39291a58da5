import pytest
from hypothesis import given, settings, strategies as st

from wmmr.litmus import (
    And, Asm, Assign, BConst, BinOp, Choice, Cmp, Const, Dmb, Iterate, LitmusError, LitmusTest,
    Load, Not, Or, OutcomePredicate, Reg, SKIP, Seq, Skip, Store, ValueUniverseOverflow,
    corpus_names, elaborate, statement_constants, format_litmus, normalize, parse_litmus, seq, value_universe,
)

LB = """\
name: LB
thread 1:
  a := y
  x := 1
thread 2:
  b := x
  y := 1
exists (a=1 /\\ b=1)
expected: reachable
"""


def test_parse_lb():
    t = parse_litmus(LB)
    assert t.name == "LB"
    assert t.tids == [1, 2]
    assert t.thread(1) == Seq(Load("a", "y"), Store("x", Const(1)))
    assert t.thread(2) == Seq(Load("b", "x"), Store("y", Const(1)))
    assert t.outcome == OutcomePredicate((("a", 1), ("b", 1)))
    assert t.expected == "reachable"


def test_skip_body():
    t = parse_litmus("thread 1:\n  skip\n")
    assert t.thread(1) == SKIP
    assert isinstance(t.thread(1), Skip)


def test_missing_store_value_position():
    with pytest.raises(LitmusError) as exc:
        parse_litmus("thread 1:\n  x := ;\n")
    assert (exc.value.line, exc.value.col) == (2, 8)


@pytest.mark.parametrize("text, fragment", [
    ("locations: x y\nthread 1:\n  a := x\nthread 2:\n  a := y\n", "register 'a'"),
    ("thread 1:\n  a := x\nexists (q=1)\n", "unknown identifier"),
    ("thread 2:\n  a := x\n", "1..n"),
    ("name: t\n", "no threads"),
    ("thread 1:\n  a := x $\n", "unexpected character"),
    ("locations: x\nthread 1:\n  x := a + 1\n", "constant or a register"),
    ("thread 1:\n  a := x\nexpected: maybe\n", "reachable or unreachable"),
    ("thread 1:\n  a := x\nexists (a=1)\nexists (a=0)\n", "duplicate exists"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(LitmusError) as exc:
        parse_litmus(text)
    assert fragment in str(exc.value)


def test_if_and_while_sugar():
    t = parse_litmus("locations: x y\nthread 1:\n  a := x\n  if a = 1 { y := 1 } else { y := 2 }\n")
    cond = Cmp("=", Reg("a"), Const(1))
    assert t.thread(1) == Seq(Load("a", "x"), Choice(
        Seq(Asm(cond), Store("y", Const(1))),
        Seq(Asm(Not(cond)), Store("y", Const(2)))))
    w = parse_litmus("thread 1:\n  a := x\n  while a = 0 { a := x }\n")
    loop = w.thread(1).second
    assert loop == Seq(Iterate(Seq(Asm(Cmp("=", Reg("a"), Const(0))), Load("a", "x"))),
                       Asm(Not(Cmp("=", Reg("a"), Const(0)))))


def test_location_outcome_clause():
    t = parse_litmus("locations: x\nthread 1:\n  x := 1\nexists (x=1)\n")
    assert t.outcome.locations == (("x", 1),)
    assert t.outcome.holds({}, {"x": 1})
    assert not t.outcome.holds({}, {"x": 2})


def test_corpus_complete(corpus):
    assert corpus_names() == ["IRIW", "LB", "LB+dmb", "MP", "MP+dmb", "RRC", "SB", "WRC"]
    assert {t.expected for t in corpus.values()} == {"reachable", "unreachable"}


# -- elaboration --------------------------------------------------------------

S = Store("x", Const(1))


def _single(stmt) -> LitmusTest:
    return LitmusTest("t", ((1, stmt),))


def test_elaborate_zero():
    assert elaborate(_single(Iterate(S)), 0).thread(1) == SKIP


def test_elaborate_two():
    out = elaborate(_single(Iterate(S)), 2)
    assert out.thread(1) == Choice(SKIP, Choice(S, Seq(S, S)))
    assert out.unrolled


def test_elaborate_idempotent_without_iterate(corpus):
    for t in corpus.values():
        assert elaborate(t, 2) == t
        assert not elaborate(t, 2).unrolled


def test_elaborate_rejects_negative():
    with pytest.raises(ValueError):
        elaborate(_single(S), -1)


def test_value_universe_examples(corpus):
    assert value_universe(corpus["LB"]) == {0, 1}
    assert value_universe(corpus["MP"]) == {0, 1, 5}
    t = parse_litmus("thread 1:\n  b := x\n  a := b + 1\n")
    assert {0, 1, 2} <= value_universe(t, 1)


def test_value_universe_overflow():
    t = parse_litmus("thread 1:\n  a := x\n  a := a * a * a * 1000\n  b := a * 999\n")
    with pytest.raises(ValueUniverseOverflow):
        value_universe(t, 2, cap=16)


# -- round trip ---------------------------------------------------------------

LOCS = ("x", "y")


def _exprs(regs):
    leaf = st.one_of(st.integers(-3, 9).map(Const), st.sampled_from(regs).map(Reg))
    return st.recursive(leaf, lambda kids: st.builds(BinOp, st.sampled_from("+-*"), kids, kids), max_leaves=4)


def _bexprs(regs):
    cmp = st.builds(Cmp, st.sampled_from(["=", "!=", "<", "<="]), _exprs(regs), _exprs(regs))
    leaf = st.one_of(cmp, st.booleans().map(BConst))
    return st.recursive(leaf, lambda k: st.one_of(
        st.builds(Not, k), st.builds(And, k, k), st.builds(Or, k, k)), max_leaves=3)


def _stmts(regs):
    atom = st.one_of(
        st.builds(Load, st.sampled_from(regs), st.sampled_from(LOCS)),
        st.builds(Store, st.sampled_from(LOCS), st.one_of(st.integers(0, 5).map(Const), st.sampled_from(regs).map(Reg))),
        st.builds(Assign, st.sampled_from(regs), _exprs(regs)),
        st.just(Dmb()),
        st.builds(Asm, _bexprs(regs)),
    )
    return st.recursive(atom, lambda k: st.one_of(
        st.lists(k, min_size=2, max_size=3).map(lambda xs: seq(*xs)),
        st.builds(Choice, k, k),
        st.builds(Iterate, k)), max_leaves=6)


@st.composite
def litmus_tests(draw):
    n = draw(st.integers(1, 3))
    threads = []
    for tid in range(1, n + 1):
        regs = [f"r{tid}{i}" for i in range(2)]
        body = draw(_stmts(regs))
        # every register must occur so the ownership check sees it
        body = seq(Load(regs[0], "x"), Load(regs[1], "y"), body)
        threads.append((tid, normalize(body)))
    outcome = OutcomePredicate(tuple((f"r{t}0", draw(st.integers(0, 3))) for t in range(1, n + 1)))
    expected = draw(st.sampled_from(["reachable", "unreachable", "unspecified"]))
    return LitmusTest("rt", tuple(threads), outcome, expected, LOCS)


@settings(max_examples=150, deadline=None)
@given(litmus_tests())
def test_round_trip(t):
    assert parse_litmus(format_litmus(t)) == t


def test_round_trip_corpus(corpus):
    for t in corpus.values():
        assert parse_litmus(format_litmus(t)) == t


@settings(max_examples=60, deadline=None)
@given(litmus_tests())
def test_value_universe_contains_literals(t):
    try:
        vals = value_universe(t, 1)
    except ValueUniverseOverflow:
        return
    assert 0 in vals
    for _, s in t.threads:
        for c in statement_constants(s):
            assert c in vals
