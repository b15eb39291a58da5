import pytest

from wmmr.events import (
    STAR, BarLoc, EventStructure, Ff, Fnc, Ini, Prm, act_x, any_bar, append_read_chain,
    chain_structure, check_linearization, extend, find_interference_free, ff_on, ini_structure,
    is_configuration, last, parallel_compose, restrict, synchronizable, thread_covering, to_dot,
    unsynchronised_reads,
)


def lb_local(tid, reg, rloc, wloc, other, fence=False):
    """ini -> prm(other, rloc, 1) -> bar(reg, rloc) [-> fnc] ; ff(tid, wloc, 1)."""
    es = append_read_chain(ini_structure(), [Prm(other, rloc, 1)])
    es = extend(es, BarLoc(tid, reg, rloc))
    if fence:
        es = extend(es, Fnc(tid))
    return extend(es, Ff(tid, wloc, 1))


def test_ini_structure():
    es = ini_structure()
    assert len(es) == 1 and not es.flow and not es.lam
    assert last(es, lambda l: isinstance(l, Ini)) == {0}
    assert last(es, ff_on("x")) == set()
    assert is_configuration(es, {0})


def test_last():
    es = lb_local(1, "a", "y", "x", 2)
    ff = [e for e, l in es.labels.items() if l == Ff(1, "x", 1)]
    assert last(es, ff_on("x")) == set(ff)
    chain = chain_structure([Prm(2, "y", 1), BarLoc(1, "a", "y")])
    assert last(chain, act_x("y")) == {0}
    assert last(chain, any_bar) == {1}


def test_extend_write_after_ini():
    es = extend(ini_structure(), Ff(1, "x", 5))
    assert es.flow == {(0, 1)}
    es2 = extend(es, Ff(1, "y", 1))
    assert es2.preds[2] == {0}


def test_extend_fence_after_read_chain():
    es = append_read_chain(ini_structure(), [Prm(2, "y", 1)])
    es = extend(es, BarLoc(1, "a", "y"))
    es = extend(es, Fnc(1))
    assert es.preds[3] == {2}
    assert es.before(1, 3)


def test_append_read_chain():
    es = append_read_chain(ini_structure(), [Prm(1, "x", 5), Prm(1, "y", 1)])
    assert es.flow == {(0, 1), (1, 2), (0, 2)}
    base = extend(ini_structure(), Ff(1, "x", 5))
    es2 = append_read_chain(base, [Prm(2, "x", 7)])
    assert (1, 2) in es2.flow
    assert append_read_chain(base, []) == base


def test_append_read_chain_errors():
    with pytest.raises(ValueError):
        append_read_chain(ini_structure(), EventStructure({0: Prm(1, "x", 1)}))
    two = EventStructure({5: Prm(1, "x", 1), 6: Prm(1, "y", 1)})
    with pytest.raises(ValueError):
        append_read_chain(ini_structure(), two)
    with pytest.raises(ValueError):
        append_read_chain(ini_structure(), [Ff(1, "x", 1)])


def test_append_read_chain_location_anchor():
    es = extend(append_read_chain(ini_structure(), [Prm(2, "y", 1)]), BarLoc(1, "a", "y"))
    es = extend(es, Fnc(1))
    views = append_read_chain(es, [Prm(2, "x", 1)])
    loc = append_read_chain(es, [Prm(2, "x", 1)], anchor="location")
    assert views.preds[4] == {0, 2, 3}
    assert loc.preds[4] == {0}


def test_restrict_example():
    es = append_read_chain(ini_structure(), [Prm(1, "y", 1)])
    es = extend(es, BarLoc(2, "a", "y"))
    r = restrict(es, 0, "x", 2)
    assert r.restriction(0, 1) == {"x"}
    assert restrict(r, 0, "x", 2) == r
    assert restrict(ini_structure(), 0, "x", 1) == ini_structure()


def test_restrict_reaches_indirect_targets():
    # the y-read is reached from ini only through the z-read
    es = EventStructure({0: Ini(), 1: Prm(1, "z", 1), 2: Prm(1, "y", 1), 3: BarLoc(2, "a", "y")},
                        [(0, 1), (1, 2), (2, 3)])
    full = restrict(es, 0, "x", 2)
    direct = restrict(es, 0, "x", 2, direct_only=True)
    assert full.restriction(0, 2) == {"x"}
    assert direct.restriction(0, 2) == frozenset()
    # memory ini, z, x, y: the x-write sits between ini and the y-read
    from wmmr.assertions import enumerate_psi
    from wmmr.promising import INI, Write
    mem = (INI, Write("z", 1, 1), Write("x", 5, 1), Write("y", 1, 1))
    assert enumerate_psi(full, mem) == []
    assert enumerate_psi(direct, mem) != []


def test_compose_lb():
    e = lb_local(1, "a", "y", "x", 2)
    f = lb_local(2, "b", "x", "y", 1)
    comp = parallel_compose([e, f])
    # e: 0 ini, 1 prm2(y,1), 2 bar, 3 ff1(x,1); f likewise
    assert comp.labels[(1, 3)] == Ff(2, "y", 1)
    assert comp.labels[(3, 1)] == Ff(1, "x", 1)
    assert ((1, 3), (1, STAR)) in comp.conflict
    assert ((1, 3), (STAR, 3)) in comp.conflict
    assert not is_configuration(comp, {(0, 0), (1, 3), (1, STAR)})
    w = find_interference_free(comp, [e, f])
    assert w is not None
    assert thread_covering([e, f], w.config) and not unsynchronised_reads([e, f], w.config)
    assert check_linearization(w.structure, w.order) == []
    assert is_configuration(comp, w.config)


def test_compose_lb_dmb_has_cycle():
    e = lb_local(1, "a", "y", "x", 2, fence=True)
    f = lb_local(2, "b", "x", "y", 1, fence=True)
    comp = parallel_compose([e, f])
    # 0 ini, 1 prm, 2 bar, 3 fnc, 4 ff
    cyc = {(0, 0), (1, 4), (4, 1), (2, STAR), (3, STAR), (STAR, 2), (STAR, 3)}
    assert not is_configuration(comp, cyc)
    assert find_interference_free(comp, [e, f]) is None


def test_compose_single():
    e = lb_local(1, "a", "y", "x", 2)
    comp = parallel_compose([e])
    assert set(comp.labels) == {(x,) for x in e.labels}
    assert all(comp.labels[(x,)] == e.labels[x] for x in e.labels)


def mp_dmb_locals():
    w = extend(ini_structure(), Ff(1, "x", 5))
    w = extend(w, Fnc(1))
    w = extend(w, Ff(1, "y", 1))
    r = append_read_chain(ini_structure(), [Prm(1, "y", 1)])
    r = extend(r, BarLoc(2, "a", "y"))
    r = restrict(extend(r, BarLoc(2, "b", "x")), 0, "x", 2)
    return w, r


def test_mp_dmb_example():
    w, r = mp_dmb_locals()
    comp = parallel_compose([w, r])
    # writer: 0 ini, 1 ff(x,5), 2 fnc, 3 ff(y,1); reader: 0 ini, 1 prm(y,1), 2 bar a, 3 bar b
    assert comp.labels[(3, 1)] == Ff(1, "y", 1)
    assert ((3, 1), (3, STAR)) in comp.conflict
    assert ((3, 1), (STAR, 1)) in comp.conflict
    assert r.restriction(0, 1) == {"x"}
    assert synchronizable([w, r])
    assert find_interference_free(comp, [w, r]) is None


def test_mp_without_restriction_is_linearizable():
    w, r = mp_dmb_locals()
    loose = EventStructure(r.labels, r.flow, {}, r.conflict)
    assert find_interference_free(None, [w, loose]) is not None


def test_conflicts_share_a_slot():
    e = lb_local(1, "a", "y", "x", 2)
    f = lb_local(2, "b", "x", "y", 1)
    comp = parallel_compose([e, f])
    for d, g in comp.conflict:
        assert any(a == b and a is not STAR for a, b in zip(d, g))


def test_to_dot():
    dot = to_dot(lb_local(1, "a", "y", "x", 2), name="lb")
    assert dot.startswith("digraph lb") and "->" in dot
