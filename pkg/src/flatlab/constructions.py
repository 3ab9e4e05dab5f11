"""Factories for the named example surfaces.

Z-table convention (declared here, since no polygon model is fixed
elsewhere): three horizontal cylinders drawn as parallelograms with side
vectors ``(t_i, h_i)``. C2 (width ``w2``) sits at the bottom right, the wide
cylinder C3 (width ``w3 = w1 + w2``) in the middle, and C1 (width ``w1``) on
top at the left. C1's top is glued to the exposed left part of C3's bottom,
C2's bottom to the exposed right part of C3's top.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .errors import InvalidParams
from .exactfield import QuadNum, sqrt_d
from .mesh import sgn
from .surface import TranslationSurface, build_surface


def _q(x: Any) -> Any:
    if isinstance(x, float):
        return x
    return QuadNum.coerce(x)


@dataclass(frozen=True)
class ZTableParams:
    w1: Any
    w2: Any
    h1: Any
    h2: Any
    h3: Any
    t1: Any = 0
    t2: Any = 0
    t3: Any = 0

    @property
    def w3(self) -> Any:
        return self.w1 + self.w2

    def widths(self) -> tuple:
        return (self.w1, self.w2, self.w3)

    def heights(self) -> tuple:
        return (self.h1, self.h2, self.h3)

    def twists(self) -> tuple:
        return (self.t1, self.t2, self.t3)


@dataclass(frozen=True)
class LTableParams:
    a: Any
    b: Any


# Regular decagon as a Z-table over Q(sqrt 5): each entry is (a, b) meaning
# a + b*phi with phi the golden ratio. Produced and re-checked by
# scripts/derive_decagon_model.py.
DECAGON_PARAMS = {
    "w1": (Fraction(-1), Fraction(1)),
    "w2": (Fraction(1), Fraction(0)),
    "h1": (Fraction(-1, 2), Fraction(1, 2)),
    "h2": (Fraction(1), Fraction(0)),
    "h3": (Fraction(0), Fraction(1, 2)),
    "t1": (Fraction(-1, 2), Fraction(1, 2)),
    "t2": (Fraction(0), Fraction(0)),
    "t3": (Fraction(0), Fraction(1, 2)),
}


def square_torus() -> TranslationSurface:
    return torus((1, 0), (0, 1), label="square torus")


def torus(u: Any, v: Any, label: str = "torus") -> TranslationSurface:
    """Parallelogram spanned by ``u`` then ``v`` (must be positively oriented)."""
    u = (_q(u[0]), _q(u[1]))
    v = (_q(v[0]), _q(v[1]))
    poly = [u, v, (-u[0], -u[1]), (-v[0], -v[1])]
    return build_surface([poly], [(0, 0, 0, 2), (0, 1, 0, 3)], label)


def regular_2n_gon(n: int) -> TranslationSurface:
    """Regular 2n-gon with unit sides and parallel sides identified (float coordinates)."""
    if n < 2:
        raise InvalidParams("need n >= 2", n=n)
    edges = [(math.cos(k * math.pi / n), math.sin(k * math.pi / n)) for k in range(2 * n)]
    gluing = [(0, k, 0, k + n) for k in range(n)]
    names = {2: "square", 3: "hexagon", 4: "octagon", 5: "decagon"}
    return build_surface([edges], gluing, f"regular {names.get(n, str(2 * n) + '-gon')}")


def z_table(p: ZTableParams, label: str = "z-table") -> TranslationSurface:
    w1, w2, h1, h2, h3 = (_q(x) for x in (p.w1, p.w2, p.h1, p.h2, p.h3))
    t1, t2, t3 = (_q(x) for x in (p.t1, p.t2, p.t3))
    for name, val in (("w1", w1), ("w2", w2), ("h1", h1), ("h2", h2), ("h3", h3)):
        if sgn(val) <= 0:
            raise InvalidParams(f"{name} must be positive", **{name: str(val)})
    z = w1 * 0
    edges = [
        (w2, z),  # 0: C2 bottom
        (t2, h2),  # 1: C2 right
        (t3, h3),  # 2: C3 right
        (-w2, z),  # 3: C3 top, right part
        (t1, h1),  # 4: C1 right
        (-w1, z),  # 5: C1 top
        (-t1, -h1),  # 6: C1 left
        (-t3, -h3),  # 7: C3 left
        (w1, z),  # 8: C3 bottom, left part
        (-t2, -h2),  # 9: C2 left
    ]
    gluing = [(0, 0, 0, 3), (0, 1, 0, 9), (0, 2, 0, 7), (0, 4, 0, 6), (0, 5, 0, 8)]
    return build_surface([edges], gluing, label)


def l_table(p: LTableParams, label: str = "l-table") -> TranslationSurface:
    """L-shaped table: an ``a x 1`` rectangle with a ``1 x (b-1)`` arm on its left end."""
    a, b = _q(p.a), _q(p.b)
    if sgn(a - 1) <= 0 or sgn(b - 1) <= 0:
        raise InvalidParams("L-table needs a > 1 and b > 1", a=str(a), b=str(b))
    z = a * 0
    one = z + 1
    edges = [
        (one, z),  # 0: bottom, left part
        (a - 1, z),  # 1: bottom, right part
        (z, one),  # 2: right side of the long arm
        (1 - a, z),  # 3: top of the long arm
        (z, b - 1),  # 4: right side of the tall arm
        (-one, z),  # 5: top
        (z, 1 - b),  # 6: left side, upper part
        (z, -one),  # 7: left side, lower part
    ]
    gluing = [(0, 0, 0, 5), (0, 1, 0, 3), (0, 2, 0, 7), (0, 4, 0, 6)]
    return build_surface([edges], gluing, label)


def decagon_eigenform_model() -> TranslationSurface:
    """Exact Z-table affinely equivalent to the regular decagon surface."""
    phi = (1 + sqrt_d(5)) / 2
    vals = {k: a + b * phi for k, (a, b) in DECAGON_PARAMS.items()}
    return z_table(ZTableParams(**vals), label="decagon eigenform")
