import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from flatlab.constructions import ZTableParams, regular_2n_gon, square_torus, z_table
from flatlab.errors import (
    BadMatching,
    CollisionBeyondBoundary,
    EdgeMismatch,
    InexactSurface,
    NonSimplePolygon,
    NotUnimodular,
    UnclosedPolygon,
    WrongStratum,
)
from flatlab.exactfield import QuadNum
from flatlab.mesh import _incircle_filter, incircle
from flatlab.rel import DegenerationReport, rel_translate
from flatlab.saddles import enumerate_saddle_connections, holonomy_multiset
from flatlab.surface import (
    H2,
    H11,
    apply_sl2,
    area,
    build_surface,
    canonical_key,
    cone_data,
    delaunay_canonicalize,
    period_lattice,
    same_geometry,
    stratum,
    u_matrix,
)

from conftest import R2


def gauss_bonnet_ok(S):
    return sum(c.angle_multiple - 1 for c in S.cone_data()) == 2 * S.genus() - 2


def shoelace(S):
    total = 0
    for poly in S.polygons:
        x = y = 0
        for e in poly:
            total += x * e[1] - y * e[0]
            x, y = x + e[0], y + e[1]
    return total / 2


def test_octagon_and_decagon_strata():
    octo = regular_2n_gon(4)
    assert stratum(octo) == H2
    assert [c.angle_multiple for c in cone_data(octo)] == [3]
    dec = regular_2n_gon(5)
    assert stratum(dec) == H11
    assert sorted(c.angle_multiple for c in cone_data(dec)) == [2, 2]
    assert not octo.exact


def test_small_polygons():
    assert square_torus().genus() == 1
    hexagon = regular_2n_gon(3)
    assert hexagon.genus() == 1
    assert gauss_bonnet_ok(hexagon)


def test_validation_errors():
    with pytest.raises(UnclosedPolygon):
        build_surface([[(1, 0), (0, 1), (-1, 0)]], [(0, 0, 0, 2)])
    with pytest.raises(EdgeMismatch):
        build_surface([[(1, 0), (0, 1), (-1, 0), (0, -1)]], [(0, 0, 0, 1), (0, 2, 0, 3)])
    with pytest.raises(BadMatching):
        build_surface([[(1, 0), (0, 1), (-1, 0), (0, -1)]], [(0, 0, 0, 2)])
    with pytest.raises(NonSimplePolygon):
        build_surface([[(1, 0), (0, -1), (-1, 0), (0, 1)]], [(0, 0, 0, 2), (0, 1, 0, 3)])
    with pytest.raises(NotUnimodular):
        apply_sl2(square_torus(), ((2, 0), (0, 1)))


def test_area_is_exact_and_matches_shoelace(lm_surface):
    assert area(lm_surface) == shoelace(lm_surface)
    # sum of w_i h_i with h = (sqrt2-1/2, 1/2, 1/2), w3 = 1+sqrt2
    assert area(lm_surface) == 1 * (R2 - F(1, 2)) + R2 * F(1, 2) + (1 + R2) * F(1, 2)


@given(st.fractions(-5, 5, max_denominator=9), st.fractions(-5, 5, max_denominator=9))
def test_sl2_action_composes(t1, t2):
    S = z_table(ZTableParams(1, 2, 1, F(1, 2), F(3, 2), F(1, 3)))
    g1 = ((1, t1), (0, 1))
    g2 = ((1, 0), (t2, 1))
    prod = ((1, t1), (t2, t2 * t1 + 1))  # g2 @ g1
    a = apply_sl2(apply_sl2(S, g1), g2)
    b = apply_sl2(S, prod)
    assert a.polygons == b.polygons


def test_stratum_area_preserved_by_action(unit_z):
    g = ((2, 3), (1, 2))
    S2 = apply_sl2(unit_z, g)
    assert area(S2) == area(unit_z)
    assert stratum(S2) == stratum(unit_z)


def test_canonical_form_of_sheared_torus():
    T100 = delaunay_canonicalize(apply_sl2(square_torus(), u_matrix(100)))
    for poly in T100.polygons:
        for e in poly:
            assert e[0] ** 2 + e[1] ** 2 <= 2
    assert same_geometry(T100, square_torus())


def test_canonicalize_idempotent_and_invariant(lm_surface):
    C = delaunay_canonicalize(lm_surface)
    assert delaunay_canonicalize(C).polygons == C.polygons
    assert area(C) == area(lm_surface)
    assert stratum(C) == stratum(lm_surface)
    L = 3
    assert holonomy_multiset(enumerate_saddle_connections(C, L)) == holonomy_multiset(
        enumerate_saddle_connections(lm_surface, L)
    )


def test_same_geometry_detects_orbit_points(lm_surface):
    t = F(7, 3)
    back = apply_sl2(apply_sl2(lm_surface, u_matrix(t)), u_matrix(-t))
    assert same_geometry(back, lm_surface)
    assert not same_geometry(apply_sl2(lm_surface, u_matrix(F(1, 2))), lm_surface)


def _legal_flip(mesh, t, e):
    from flatlab.mesh import cross, sgn, vsub

    V = mesh.verts(t)
    a, b, c = V[e], V[(e + 1) % 3], V[(e + 2) % 3]
    W = mesh.opposite_point(t, e)
    return sgn(cross(vsub(a, c), vsub(W, c))) > 0 and sgn(cross(vsub(b, W), vsub(c, W))) > 0


def test_canonical_key_independent_of_presentation(unit_z):
    from flatlab.surface import TranslationSurface

    rng = random.Random(42)
    mesh = unit_z.mesh.copy()
    flips = 0
    for _ in range(40):
        t, e = rng.randrange(mesh.ntri), rng.randrange(3)
        if mesh.glue[t][e][0] != t and _legal_flip(mesh, t, e):
            mesh.flip(t, e)
            flips += 1
    assert flips > 5
    assert all(mesh.area2(t).sign() > 0 for t in range(mesh.ntri))
    S2 = TranslationSurface.from_mesh(mesh)
    assert canonical_key(S2) == canonical_key(unit_z)


def test_incircle_filter_agrees_with_exact():
    rng = random.Random(42)
    for _ in range(2000):
        pts = [
            (QuadNum(F(rng.randint(-40, 40), rng.randint(1, 9)), F(rng.randint(-9, 9), rng.randint(1, 5)), 2),
             QuadNum(F(rng.randint(-40, 40), rng.randint(1, 9)), F(rng.randint(-9, 9), rng.randint(1, 5)), 2))
            for _ in range(4)
        ]
        s = _incircle_filter(*pts)
        if s is not None:
            a, b, c, p = pts
            ax, ay = a[0] - p[0], a[1] - p[1]
            bx, by = b[0] - p[0], b[1] - p[1]
            cx, cy = c[0] - p[0], c[1] - p[1]
            det = ((ax * ax + ay * ay) * (bx * cy - by * cx) - (bx * bx + by * by) * (ax * cy - ay * cx)
                   + (cx * cx + cy * cy) * (ax * by - ay * bx))
            assert s == det.sign()
    # cocircular points must reach the exact path
    z = QuadNum(0)
    one = QuadNum(1)
    assert incircle((z, z), (one, z), (one, one), (z, one)) == 0


def test_inexact_surfaces_rejected_by_exact_operations():
    with pytest.raises(InexactSurface):
        enumerate_saddle_connections(regular_2n_gon(4), 2)


# -- rel --------------------------------------------------------------------------------------------


def test_rel_preserves_absolute_periods(lm_surface):
    v = (F(1, 5), F(1, 7))
    S2 = rel_translate(lm_surface, v)
    assert period_lattice(S2) == period_lattice(lm_surface)
    assert area(S2) == area(lm_surface)
    assert stratum(S2) == H11


def test_rel_additivity(unit_z):
    v1 = (F(1, 5), F(1, 9))
    v2 = (F(-1, 3), F(1, 4))
    a = rel_translate(rel_translate(unit_z, v1), v2)
    b = rel_translate(unit_z, (v1[0] + v2[0], v1[1] + v2[1]))
    assert same_geometry(a, b)


def test_rel_zero_is_identity(unit_z):
    assert rel_translate(unit_z, (0, 0)) is unit_z


def test_rel_round_trip(unit_z):
    S2 = rel_translate(unit_z, (F(1, 4), 0))
    assert not same_geometry(S2, unit_z)
    back = rel_translate(S2, (F(-1, 4), 0))
    assert same_geometry(back, unit_z)


def test_rel_needs_two_cones(ltable22):
    with pytest.raises(WrongStratum):
        rel_translate(ltable22, (F(1, 10), 0))


def test_rel_collision_before_end(two_tori_fixture):
    with pytest.raises(CollisionBeyondBoundary):
        rel_translate(two_tori_fixture, (-1, 0))


def test_rel_degeneration_report(ltable_fixture):
    res = rel_translate(ltable_fixture, (F(1, 3), 0))
    assert isinstance(res, DegenerationReport)
    assert res.kind == "H2_surface"
    assert stratum(res.result) == H2
    assert area(res.result) == area(ltable_fixture)


def test_long_rel_moves_through_collinear_configurations():
    # rational heights produce moments with four collinear vertices along the way
    from conftest import lm_fixture_params

    S = z_table(lm_fixture_params(F(1, 4)))
    chain = S
    for _ in range(4):
        chain = rel_translate(chain, (F(31, 4), 0))
    direct = rel_translate(S, (31, 0))
    assert same_geometry(chain, direct)
    assert period_lattice(direct) == period_lattice(S)
    assert stratum(direct) == H11


def test_surfaces_pickle(lm_surface):
    import pickle

    back = pickle.loads(pickle.dumps(lm_surface))
    assert back.polygons == lm_surface.polygons
    assert canonical_key(back) == canonical_key(lm_surface)
