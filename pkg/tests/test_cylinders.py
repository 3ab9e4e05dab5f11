import random
from fractions import Fraction as F

import pytest

from flatlab.constructions import ZTableParams, decagon_eigenform_model, square_torus, z_table
from flatlab.cylinders import (
    HORIZONTAL,
    Cylinder,
    Direction,
    NormalizedParams,
    NotPeriodic,
    check_lm,
    check_lm_surface,
    normalize_params,
    periodic_direction_decompose,
    periodicity_probe,
)
from flatlab.errors import InexactSurface, MixedField, NoSumRelation, TraceBudgetExceeded, WrongCylinderCount
from flatlab.exactfield import QuadNum, sqrt_d
from flatlab.constructions import regular_2n_gon
from flatlab.surface import apply_sl2, area, u_matrix

from conftest import R2, lm_fixture_params


def rand_pos(rng, d=2):
    while True:
        x = QuadNum(F(rng.randint(-6, 12), rng.randint(1, 6)), F(rng.randint(-4, 4), rng.randint(1, 4)), d)
        if x.sign() > 0:
            return x


def rand_any(rng, d=2):
    return QuadNum(F(rng.randint(-6, 6), rng.randint(1, 6)), F(rng.randint(-4, 4), rng.randint(1, 4)), d)


def random_z_params(rng):
    return ZTableParams(*(rand_pos(rng) for _ in range(5)), *(rand_any(rng) for _ in range(3)))


def reduce_mod(t, w):
    k = (t / w).__floor__()
    return t - k * w


def expected_cylinders(p):
    return sorted(
        ((w, h, reduce_mod(t, w)) for w, h, t in zip(p.widths(), p.heights(), p.twists())),
        key=lambda c: (float(c[0]), float(c[1]), float(c[2])),
    )


def found_cylinders(dec):
    return sorted(((c.w, c.h, c.t) for c in dec.cylinders), key=lambda c: (float(c[0]), float(c[1]), float(c[2])))


def test_square_torus_horizontal():
    dec = periodic_direction_decompose(square_torus())
    assert [(c.w, c.h, c.t) for c in dec.cylinders] == [(1, 1, 0)]


def test_irrational_slope_exhausts_budget():
    with pytest.raises(TraceBudgetExceeded):
        periodic_direction_decompose(square_torus(), Direction.of(1, sqrt_d(2)), budget=2000)
    rep = periodic_direction_decompose(square_torus(), Direction.of(1, sqrt_d(2)), budget=2000, on_budget="report")
    assert isinstance(rep, NotPeriodic) and not rep.proven


def test_inexact_rejected():
    with pytest.raises(InexactSurface):
        periodic_direction_decompose(regular_2n_gon(5))


def test_direction_canonical_representative():
    assert Direction.of(2, 4) == Direction.of(1, 2) == Direction.of(F(1, 3), F(2, 3))
    assert Direction.of(-2, -4).v == (-1, -2)
    assert Direction.of(0, 5).v == (0, 1)
    d = Direction.of(2, 2 * sqrt_d(2))
    assert d.v == (1, sqrt_d(2))


def test_round_trip_random_z_tables():
    rng = random.Random(42)
    for _ in range(25):
        p = random_z_params(rng)
        S = z_table(p)
        dec = periodic_direction_decompose(S)
        assert found_cylinders(dec) == expected_cylinders(p)
        assert sum(c.w * c.h for c in dec.cylinders) == area(S)


def test_decomposition_commutes_with_shear():
    rng = random.Random(7)
    p = random_z_params(rng)
    S = z_table(p)
    t = F(5, 3) - sqrt_d(2) / 4
    dec = periodic_direction_decompose(apply_sl2(S, u_matrix(t)))
    want = sorted(
        ((w, h, reduce_mod(tw + t * h, w)) for w, h, tw in zip(p.widths(), p.heights(), p.twists())),
        key=lambda c: (float(c[0]), float(c[1]), float(c[2])),
    )
    assert found_cylinders(dec) == want


def test_other_direction():
    # the quarter-turned Z-table decomposes vertically into the original cylinders
    p = ZTableParams(1, 2, F(1, 2), 1, F(1, 3), F(1, 4))
    S = apply_sl2(z_table(p), ((0, -1), (1, 0)))
    dec = periodic_direction_decompose(S, Direction.of(0, 1))
    assert sorted((c.w, c.h) for c in dec.cylinders) == sorted(zip(p.widths(), p.heights()))


def test_normalize_examples():
    cyl = lambda w: Cylinder(QuadNum.coerce(w) if not isinstance(w, QuadNum) else w, QuadNum(1), QuadNum(0))
    np_ = normalize_params([cyl(2), cyl(1), cyl(1)])
    assert (np_.w1, np_.w2, np_.w3) == (1, 1, 2)
    np_ = normalize_params([cyl(1 + R2), cyl(R2), cyl(1)])
    assert np_.w3 == 1 + R2
    with pytest.raises(NoSumRelation):
        normalize_params([cyl(1), cyl(1), cyl(3)])
    with pytest.raises(WrongCylinderCount):
        normalize_params([cyl(1), cyl(1)])


def NP(w1, w2, s1, s2, tau1=0, tau2=0):
    q = lambda x: x if isinstance(x, QuadNum) else QuadNum.coerce(F(x))
    w1, w2, s1, s2, tau1, tau2 = map(q, (w1, w2, s1, s2, tau1, tau2))
    return NormalizedParams(w1, w2, w1 + w2, s1, s2, tau1, tau2, w1 * s1 + w2 * s2, (0, 1, 2))


def test_check_lm_member_fixture():
    v = check_lm(NP(1, R2, R2, 1))
    assert v.member and v.m == 2 * R2
    assert str(v) == f"member(m={2 * R2})"


def test_check_lm_rational_violates_eq1():
    v = check_lm(NP(1, 1, 1, 1))
    assert not v.member and v.violated == 1 and v.residual == 2


def test_check_lm_perturbation_residual():
    v = check_lm(NP(1, R2, R2, 1 + F(1, 1000)))
    # oracle: 1*conj(sqrt2) + sqrt2*(1 + 1/1000) = sqrt2/1000
    assert v.violated == 1
    assert v.residual == R2 / 1000


def test_check_lm_twist_equation():
    v = check_lm(NP(1, R2, R2, 1, F(1, 2), 0))
    assert v.violated == 2 and v.residual == F(1, 2)


def test_check_lm_mixed_fields():
    with pytest.raises(MixedField):
        check_lm(NP(1, R2, sqrt_d(3), 1))


def test_check_lm_surface_fixture(lm_surface):
    v = check_lm_surface(lm_surface)
    assert v.member and v.m == 2 * R2


def test_check_lm_surface_with_twists():
    # tau = 0 with nonzero individual twists; the twist lift must find the member representative
    p = lm_fixture_params()
    S = z_table(ZTableParams(p.w1, p.w2, p.h1, p.h2, p.h3, F(-1, 3), F(-1, 3), F(1, 3)))
    assert check_lm_surface(S).member


def test_check_lm_shear_invariant_on_surface(lm_surface):
    S = apply_sl2(lm_surface, u_matrix(F(3, 7) + R2))
    v = check_lm_surface(S)
    assert v.member and v.m == 2 * R2


def test_probe_square_torus():
    rep = periodicity_probe(square_torus(), 3)
    assert rep.all_periodic and len(rep.directions) > 4


def test_probe_decagon_all_periodic():
    rep = periodicity_probe(decagon_eigenform_model(), 5)
    assert rep.all_periodic
    assert len(rep.directions) == 122


def test_probe_finds_non_closing_direction_off_the_locus():
    S = z_table(ZTableParams(1, R2, 1, 1, 1))
    assert not check_lm_surface(S).member
    rep = periodicity_probe(S, 3, budget=3000)
    assert rep.non_closing
