import random

from wmmr.gen import SCHEDULER_SHAPE, Shape, compare_engines, compare_schedulers, crosscheck, random_test
from wmmr.litmus import Asm, Load, Store, expr_registers, format_litmus, parse_litmus, walk
from wmmr.promising import explore, last_values
from wmmr.proof import check_reachable


def test_random_test_respects_shape():
    rng = random.Random(5)
    shape = Shape()
    for i in range(100):
        t = random_test(rng, shape, f"g{i}")
        assert shape.min_threads <= len(t.threads) <= shape.max_threads
        for _, s in t.threads:
            atoms = list(walk(s))
            loaded = set()
            for a in atoms:
                if isinstance(a, (Load, Store)):
                    assert a.loc in shape.locations
                if isinstance(a, Load):
                    loaded.add(a.reg)
                if isinstance(a, Asm):
                    assert expr_registers(a.cond) <= loaded
        assert parse_litmus(format_litmus(t)) == t


def test_random_test_deterministic():
    a = [random_test(random.Random(9)) for _ in range(3)]
    b = [random_test(random.Random(9)) for _ in range(3)]
    assert a == b


def test_count_zero():
    rep = crosscheck(1, 0)
    assert rep.ok and rep.programs == 0 and rep.to_json()["discrepancies"] == []


def test_single_thread_stores_only():
    shape = Shape(min_threads=1, max_threads=1, loads=False, asserts=False, register_stores=False, fences=False)
    rng = random.Random(2)
    for i in range(10):
        t = random_test(rng, shape, f"s{i}")
        ops = explore(t)
        # memory orders may differ across locations; final values may not
        assert len({tuple(sorted(last_values(f.memory).items())) for f in ops.finals}) == 1
        assert ops.valuations() == check_reachable(t, full=True).valuations
    rep = crosscheck(2, 10, shape)
    assert rep.ok


def test_small_crosscheck_clean():
    rep = crosscheck(2, 40, calculus="extended")
    assert rep.ok, "\n".join(d.dump() for d in rep.discrepancies)
    assert rep.engine_checks == 40 and rep.scheduler_checks == 40
    assert rep.transitions_checked > 0 and rep.witnesses_checked > 0


def test_discrepancy_dump_has_program():
    t = parse_litmus("thread 1:\n  r0 := y\n  r1 := x\nthread 2:\n  y := 1\n"
                     "thread 3:\n  x := 2\n  dmb\n  r2 := y\n")
    found = compare_engines(t, calculus="base")
    assert [d.kind for d in found] == ["engines"]
    dump = found[0].dump()
    assert dump.startswith("-- engines:") and "thread 3:" in dump
    assert "# operational trace for {'r0': 1, 'r1': 0, 'r2': 1}" in dump and "rd(" in dump
    assert compare_engines(t, calculus="extended") == []


def test_scheduler_shape_agrees():
    rng = random.Random(4)
    for i in range(10):
        assert compare_schedulers(random_test(rng, SCHEDULER_SHAPE, f"u{i}")) == []
