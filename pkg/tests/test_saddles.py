from fractions import Fraction as F
from math import gcd, isqrt

import pytest

from flatlab.constructions import ZTableParams, square_torus, z_table
from flatlab.errors import BoundTooLarge, NotOnBoundary, WrongStratum
from flatlab.saddles import (
    classify_degeneration,
    enumerate_saddle_connections,
    hc_membership,
    horizontal_interval,
)
from flatlab.surface import apply_sl2, area, stratum, u_matrix

from conftest import R2


def primitive_vectors(L):
    out = []
    for a in range(-L, L + 1):
        for b in range(-L, L + 1):
            if (a, b) != (0, 0) and gcd(a, b) == 1 and a * a + b * b <= L * L:
                out.append((a, b))
    return out


def hol_key(sc):
    return (sc.holonomy[0], sc.holonomy[1], sc.from_cone, sc.to_cone)


def keys(scs):
    return sorted((float(x), float(y), a, b) for x, y, a, b in map(hol_key, scs))


def test_square_torus_small_bounds():
    scs = enumerate_saddle_connections(square_torus(), 1)
    assert sorted((int(s.holonomy[0]), int(s.holonomy[1])) for s in scs) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    scs = enumerate_saddle_connections(square_torus(), R2)
    assert len(scs) == 8


def test_square_torus_matches_primitive_count():
    scs = enumerate_saddle_connections(square_torus(), 10)
    got = sorted((int(s.holonomy[0]), int(s.holonomy[1])) for s in scs)
    assert got == sorted(primitive_vectors(10))
    assert len(got) == 192  # [DERIVED] lattice count


def ray_trace_oracle(S, L):
    """Every saddle connection of a square-tiled surface lies in a rational direction."""
    mesh = S.mesh
    found = []
    for p in primitive_vectors(L):
        for (t, i) in mesh.corners_with_direction(p):
            r = mesh.trace(t, i, p, max_len2=L * L)
            if r is not None:
                found.append((r.holonomy[0], r.holonomy[1], mesh.lab[t][i], mesh.lab[r.end[0]][r.end[1]]))
    return sorted((float(x), float(y), a, b) for x, y, a, b in found)


def test_z_table_against_ray_trace_oracle():
    S = z_table(ZTableParams(1, 2, 1, 1, 2, 0, 1, 1))
    got = keys(enumerate_saddle_connections(S, 3))
    assert got == ray_trace_oracle(S, 3)
    assert len(got) > 20


def test_closed_under_reversal(lm_surface):
    scs = enumerate_saddle_connections(lm_surface, 3)
    fwd = sorted(hol_key(s) for s in scs)
    rev = sorted((-x, -y, b, a) for x, y, a, b in map(hol_key, scs))
    assert keys(scs) == sorted((float(x), float(y), a, b) for x, y, a, b in rev)
    assert len(fwd) == len(rev)


def test_monotone_in_bound(lm_surface):
    small = enumerate_saddle_connections(lm_surface, 2)
    big = enumerate_saddle_connections(lm_surface, 3)
    bigset = set(map(hol_key, big))
    assert set(map(hol_key, small)) <= bigset
    assert len(big) > len(small)


def test_equivariance_under_shear(lm_surface):
    g = u_matrix(1)
    L0 = 3
    # |g^-1| < 1.62, so every image of length <= 3 comes from a preimage of length <= 5
    before = enumerate_saddle_connections(lm_surface, 5)
    mapped = []
    for s in before:
        x, y = s.holonomy
        gx, gy = x + y, y
        if gx * gx + gy * gy <= L0 * L0:
            mapped.append((float(gx), float(gy), s.from_cone, s.to_cone))
    after = keys(enumerate_saddle_connections(apply_sl2(lm_surface, g), L0))
    assert after == sorted(mapped)


def test_node_cap():
    with pytest.raises(BoundTooLarge):
        enumerate_saddle_connections(square_torus(), 50, max_nodes=100)


# -- horizontal interval and degenerations -----------------------------------------------------------


def test_interval_two_tori_fixture(two_tori_fixture):
    iv = horizontal_interval(two_tori_fixture)
    assert (iv.left, iv.right) == (F(-1, 2), F(1, 2))
    assert iv.contains(0) and not iv.contains(F(1, 2))


def test_interval_ltable_fixture(ltable_fixture):
    iv = horizontal_interval(ltable_fixture)
    assert (iv.left, iv.right) == (F(-1, 2), F(1, 3))
    assert iv.left_witness.holonomy[0] == F(-1, 2)


def test_interval_mirrors_under_half_turn(ltable_fixture):
    iv = horizontal_interval(apply_sl2(ltable_fixture, ((-1, 0), (0, -1))))
    assert (iv.left, iv.right) == (F(-1, 3), F(1, 2))


def test_interval_needs_h11(ltable22):
    with pytest.raises(WrongStratum):
        horizontal_interval(ltable22)


def test_hc_membership(two_tori_fixture, ltable_fixture, unit_z):
    m = hc_membership(two_tori_fixture)
    assert m.kind == "HC" and m.s == F(1, 2) and str(m) == "HC(1/2)"
    assert hc_membership(ltable_fixture).s == F(1, 3)
    assert hc_membership(unit_z).kind == "in_LmX"


def test_hc_membership_u_invariant(ltable_fixture):
    sheared = apply_sl2(ltable_fixture, u_matrix(F(5, 7)))
    assert hc_membership(sheared).s == F(1, 3)


def test_degeneration_two_tori(two_tori_fixture):
    rep = classify_degeneration(two_tori_fixture, F(-1, 2))
    assert rep.kind == "two_tori_wedge"
    assert sorted(area(T) for T in rep.result) == [1, 1]
    assert all(T.genus() == 1 for T in rep.result)


def test_degeneration_to_h2(ltable_fixture):
    rep = classify_degeneration(ltable_fixture, F(1, 3))
    assert rep.kind == "H2_surface"
    assert str(stratum(rep.result)) == "H(2)"
    assert area(rep.result) == area(ltable_fixture) == F(11, 6)
    left = classify_degeneration(ltable_fixture, F(-1, 2))
    assert left.kind == "two_tori_wedge"
    assert sorted(area(T) for T in left.result) == [F(5, 6), 1]


def test_degeneration_requires_endpoint(ltable_fixture):
    with pytest.raises(NotOnBoundary):
        classify_degeneration(ltable_fixture, F(1, 6))


def test_double_collapse_is_reported(two_tori_fixture):
    with pytest.raises(WrongStratum):
        classify_degeneration(two_tori_fixture, F(1, 2))
