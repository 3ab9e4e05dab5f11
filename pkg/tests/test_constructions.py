import runpy
from fractions import Fraction as F
from pathlib import Path

import pytest

from flatlab.constructions import (
    DECAGON_PARAMS,
    LTableParams,
    ZTableParams,
    decagon_eigenform_model,
    l_table,
    regular_2n_gon,
    z_table,
)
from flatlab.cylinders import check_lm_surface, periodic_direction_decompose
from flatlab.errors import InvalidParams
from flatlab.exactfield import sqrt_d
from flatlab.surface import H2, H11, area, stratum

ROOT = Path(__file__).resolve().parents[1]


@pytest.mark.parametrize("n,angles", [(2, [1]), (3, [1, 1]), (4, [3]), (5, [2, 2])])
def test_regular_polygons_cone_pattern(n, angles):
    S = regular_2n_gon(n)
    assert sorted(c.angle_multiple for c in S.cone_data()) == angles
    assert not S.exact


def test_regular_polygon_needs_n_at_least_two():
    with pytest.raises(InvalidParams):
        regular_2n_gon(1)


def test_unit_z_table():
    S = z_table(ZTableParams(1, 1, 1, 1, 1))
    assert stratum(S) == H11
    assert area(S) == 4  # 1*1 + 1*1 + 2*1


def test_z_table_rejects_degenerate_heights():
    with pytest.raises(InvalidParams):
        z_table(ZTableParams(1, 1, 1, 1, 0))
    with pytest.raises(InvalidParams):
        z_table(ZTableParams(-1, 1, 1, 1, 1))


def test_z_table_has_three_horizontal_cylinders():
    p = ZTableParams(1, sqrt_d(2), F(1, 3), F(2, 3), 1, F(1, 5), F(1, 7), F(1, 2))
    dec = periodic_direction_decompose(z_table(p))
    widths = sorted(float(c.w) for c in dec.cylinders)
    assert len(widths) == 3
    assert abs(widths[2] - widths[0] - widths[1]) < 1e-12


def test_l_table():
    S = l_table(LTableParams(2, 2))
    assert stratum(S) == H2
    assert area(S) == 3  # a + b - 1
    with pytest.raises(InvalidParams):
        l_table(LTableParams(2, 1))
    r2 = sqrt_d(2)
    S2 = l_table(LTableParams(1 + r2, 2))
    assert S2.exact and S2.d == 2
    assert stratum(S2) == H2
    assert area(S2) == 1 + r2 + 2 - 1


def test_decagon_eigenform_model():
    S = decagon_eigenform_model()
    assert S.d == 5
    assert stratum(S) == H11
    dec = periodic_direction_decompose(S)
    np_ = dec.normalized
    assert np_.w3 == np_.w1 + np_.w2
    v = check_lm_surface(S)
    assert v.member
    assert v.m == F(5, 2)


def test_decagon_parameters_rederived_from_float_decagon():
    # the derivation script rebuilds the parameters from the floating decagon and asserts equality
    ns = runpy.run_path(str(ROOT / "scripts" / "derive_decagon_model.py"))
    ns["main"]()
    assert set(DECAGON_PARAMS) == {"w1", "w2", "h1", "h2", "h3", "t1", "t2", "t3"}
