"""Base points, morphisms of points and base-point assignment."""

import pytest
from hypothesis import given, strategies as st

import oracles
from helpers import instance
from catschemes.errors import AxiomViolation, EmptyPointSet
from catschemes.instances.finab import FREE, FinAbObj
from catschemes.instances.fincring import zmod
from catschemes.instances.finset import FinSetObj
from catschemes.points import (BasePointConfig, Point, fix_basepoints, point_id, point_image,
                               point_morphisms, pts)


def test_point_count_is_sum_of_hom_sizes(sets):
    cfg = BasePointConfig(sets, [FinSetObj([0]), FinSetObj([0, 1])])
    X = FinSetObj(range(3))
    assert len(pts(X, cfg)) == 3 + 9 == sum(len(sets.hom(P, X)) for P in cfg.base_objects)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_vector_space_points(n):
    for q in (2, 3):
        inst = instance("FinVect", n, field=q)
        assert len(pts(inst.X, inst.cfg)) == q ** n == oracles.vect_hom_count(q, 1, n)


@pytest.mark.parametrize("orders", [(), (2,), (6,), (2, 2), (12,)])
def test_group_points_are_elements(orders):
    inst = instance("FinAb", list(orders) or [1])
    P = pts(inst.X, inst.cfg)
    assert sorted(p.arrow.data[0] for p in P) == sorted(inst.X.elements)


def test_z6_has_two_ring_points():
    inst = instance("FinCRing", "Z/6")
    P = pts(inst.X, inst.cfg)
    assert sorted(p.base.size for p in P) == [2, 3]
    assert all(p.target == inst.X for p in P)


def test_empty_set_has_no_points(sets):
    cfg = BasePointConfig(sets, [FinSetObj([0])])
    assert len(pts(FinSetObj([]), cfg)) == 0


def test_config_validation(sets):
    with pytest.raises(AxiomViolation):
        BasePointConfig(sets, [])
    with pytest.raises(AxiomViolation):
        BasePointConfig(sets, [FinSetObj([0]), FinSetObj([0])])
    with pytest.raises(AxiomViolation):
        BasePointConfig(sets, [FinSetObj([0])], "sideways")


def test_point_morphisms_swap(sets):
    cfg = BasePointConfig(sets, [FinSetObj([0])])
    X = FinSetObj([0, 1])
    x, y = pts(X, cfg).points
    found = point_morphisms(x, y, X, cfg)
    assert len(found) == 2
    assert all(phi(0) == 1 for phi, _ in found)


def test_point_morphisms_between_different_residue_fields_empty():
    inst = instance("FinCRing", "Z/6")
    x, y = pts(inst.X, inst.cfg).points
    assert point_morphisms(x, y, inst.X, inst.cfg) == []
    assert point_morphisms(y, x, inst.X, inst.cfg) == []


def _cases():
    out = []
    for kind, obj, kw in (("FinAb", [6], {}), ("FinAb", [2, 2], {}), ("FinVect", 2, {"field": 2}),
                          ("FinSet", 3, {}), ("FinCRing", "Z/2 x Z/2", {})):
        out.append(instance(kind, obj, **kw))
    return out


CASES = _cases()


@pytest.mark.parametrize("inst", CASES, ids=lambda i: f"{i.kind}:{i.category.describe(i.X)}")
def test_point_morphisms_reflexive(inst):
    W = inst.cfg.working
    for x in pts(inst.X, inst.cfg):
        pairs = point_morphisms(x, x, inst.X, inst.cfg)
        assert (W.identity(inst.X), W.identity(x.base)) in pairs


@given(st.sampled_from(CASES), st.data())
def test_point_morphisms_paste(inst, data):
    W = inst.cfg.working
    P = pts(inst.X, inst.cfg).points
    x, y, z = (data.draw(st.sampled_from(P)) for _ in range(3))
    a = point_morphisms(x, y, inst.X, inst.cfg)
    b = point_morphisms(y, z, inst.X, inst.cfg)
    xz = point_morphisms(x, z, inst.X, inst.cfg)
    for phi, s in a[:4]:
        for psi, t in b[:4]:
            assert (W.compose(psi, phi), W.compose(t, s)) in xz


def test_point_image_along_identity():
    inst = instance("FinAb", [4])
    W = inst.cfg.working
    for p in pts(inst.X, inst.cfg):
        assert point_image(W.identity(inst.X), p, inst.cfg) == p


def test_point_image_along_group_map(groups):
    cfg = BasePointConfig(groups, [FREE])
    U, X = FinAbObj((2,)), FinAbObj((4,))
    u = groups.morphism(U, X, [(2,)])
    p = next(q for q in pts(U, cfg) if q.arrow.data == ((1,),))
    assert point_image(u, p, cfg).arrow.data == ((2,),)


def test_fix_basepoints_default_and_rule(groups):
    cfg = BasePointConfig(groups, [FREE])
    objs = [FinAbObj((2,)), FinAbObj((6,))]
    first = fix_basepoints(objs, cfg)
    assert all(first[A].arrow.data == ((0,),) for A in objs)
    gen = fix_basepoints(objs, cfg, rule=lambda p: p.arrow.data == ((1,),))
    assert all(gen[A].arrow.data == ((1,),) for A in objs)
    over = fix_basepoints(objs, cfg, overrides={objs[1]: 3})
    assert over[objs[1]].arrow.data == ((3,),) and over[objs[0]].arrow.data == ((0,),)


def test_fix_basepoints_errors(sets, rings):
    cfg = BasePointConfig(sets, [FinSetObj([0])])
    with pytest.raises(EmptyPointSet):
        fix_basepoints([FinSetObj([])], cfg)
    cfg = BasePointConfig(rings, [zmod(2)], "contravariant")
    with pytest.raises(EmptyPointSet):
        fix_basepoints([zmod(3)], cfg)
    with pytest.raises(AxiomViolation):
        other = Point(zmod(2), rings.identity(zmod(2)), "contravariant")
        fix_basepoints([zmod(4)], cfg, overrides={zmod(4): other})


def test_point_ids_are_distinct():
    inst = instance("FinVect", 2, field=3)
    ids = [repr(point_id(p, inst.cfg)) for p in pts(inst.X, inst.cfg)]
    assert len(set(ids)) == len(ids)


def test_contravariant_working_arrow_direction():
    inst = instance("FinCRing", "Z/6")
    for p in pts(inst.X, inst.cfg):
        assert p.working.dom == p.base and p.working.cod == inst.X
