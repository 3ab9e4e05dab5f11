"""Saddle connections, the horizontal rel interval, and rel degenerations.

Enumeration develops the triangulation into the plane around every corner,
carrying an open window of directions that are still unobstructed. A window
crossing an edge sees the far vertex of the next triangle (a saddle
connection when it lies strictly inside the window) and splits there. A
branch is dropped once the part of the crossed edge inside the window is
farther than ``L``; all tests are exact in the field of the surface.

Rel conventions: cone class 0 is the one that moves. A horizontal saddle
connection from class 0 to class 1 with holonomy ``(l, 0)`` ends the interval
on the right when ``l > 0`` and on the left when ``l < 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Union

from .errors import BoundTooLarge, NotOnBoundary, WrongStratum
from .exactfield import QuadNum
from .mesh import cross, dot, sgn, vadd, vneg, vsub
from .rel import DegenerationReport, rel_translate
from .surface import TranslationSurface, Vec2

DEFAULT_MAX_NODES = 2_000_000
DEFAULT_HORIZONTAL_BOUND = 100


def _exact_bound(L: Any) -> Any:
    if isinstance(L, float):
        return Fraction(L)
    return L


@dataclass(frozen=True)
class SaddleConnection:
    holonomy: Vec2
    from_cone: int
    to_cone: int

    def sort_key(self) -> tuple:
        return (_nk(self.holonomy[0]), _nk(self.holonomy[1]), self.from_cone, self.to_cone)

    def to_json(self) -> dict:
        return {
            "holonomy": [_jn(c) for c in self.holonomy],
            "from": self.from_cone,
            "to": self.to_cone,
        }


def _nk(x: Any) -> tuple:
    if isinstance(x, QuadNum):
        return (float(x), x.a, x.b)
    return (float(x), x, 0)


def _jn(x: Any) -> Any:
    return x.to_json() if isinstance(x, QuadNum) else x


def _seg_dist2(a: tuple, b: tuple) -> Any:
    """Squared distance from the origin to segment [a, b]."""
    ab = vsub(b, a)
    if sgn(dot(a, ab)) >= 0:
        return dot(a, a)
    if sgn(dot(b, ab)) <= 0:
        return dot(b, b)
    c = cross(a, b)
    return c * c / dot(ab, ab)


def _clip(a: tuple, b: tuple, r: tuple) -> tuple:
    """Where ray ``r`` from the origin meets line ``ab`` (clamped to the segment)."""
    ab = vsub(b, a)
    den = cross(r, ab)
    if sgn(den) == 0:
        return a
    s = -cross(r, a) / den
    if sgn(s) <= 0:
        return a
    if sgn(s - 1) >= 0:
        return b
    return vadd(a, (s * ab[0], s * ab[1]))


def _from_corner(mesh: Any, t: int, i: int, L2: Any, out: list, budget: list) -> None:
    vec = mesh.vec[t]
    lab = mesh.lab
    src = lab[t][i]
    e_i = vec[i]
    if sgn(dot(e_i, e_i) - L2) <= 0:
        out.append(SaddleConnection(Vec2(*e_i), src, lab[t][(i + 1) % 3]))
    A = e_i
    B = vneg(vec[(i - 1) % 3])
    # stack items: (triangle, edge to cross, developed start A, end B, dl, dr)
    stack = [(t, (i + 1) % 3, A, B, A, B)]
    while stack:
        t0, k, A, B, dl, dr = stack.pop()
        budget[0] -= 1
        if budget[0] < 0:
            raise BoundTooLarge("saddle connection search exceeded its node cap")
        # prune when the visible part of the edge is out of reach
        pa = _clip(A, B, dl)
        pb = _clip(A, B, dr)
        if sgn(_seg_dist2(pa, pb) - L2) > 0:
            continue
        t2, k2 = mesh.glue[t0][k]
        v2 = mesh.vec[t2]
        # edge k2 of t2 runs from B to A; its far vertex W follows A
        W = vadd(A, v2[(k2 + 1) % 3])
        cl = sgn(cross(dl, W))
        cr = sgn(cross(W, dr))
        if cl > 0 and cr > 0:
            if sgn(dot(W, W) - L2) <= 0:
                out.append(SaddleConnection(Vec2(*W), src, lab[t2][(k2 + 2) % 3]))
            stack.append((t2, (k2 + 1) % 3, A, W, dl, W))
            stack.append((t2, (k2 + 2) % 3, W, B, W, dr))
        elif cl <= 0:
            stack.append((t2, (k2 + 2) % 3, W, B, dl, dr))
        else:
            stack.append((t2, (k2 + 1) % 3, A, W, dl, dr))


def enumerate_saddle_connections(
    S: TranslationSurface, L: Any, max_nodes: int = DEFAULT_MAX_NODES
) -> list[SaddleConnection]:
    """All saddle connections with ``|holonomy| <= L``, sorted by holonomy."""
    S.require_exact()
    L = _exact_bound(L)
    L2 = L * L
    mesh = S.mesh
    out: list[SaddleConnection] = []
    budget = [max_nodes]
    for t in range(mesh.ntri):
        for i in range(3):
            _from_corner(mesh, t, i, L2, out, budget)
    out.sort(key=SaddleConnection.sort_key)
    return out


def holonomy_multiset(scs: list[SaddleConnection]) -> list:
    return sorted((_nk(s.holonomy[0])[1:], _nk(s.holonomy[1])[1:]) for s in scs)


@dataclass(frozen=True)
class HorizontalInterval:
    left: Any  # None means -infinity (up to ``bound``)
    right: Any  # None means +infinity (up to ``bound``)
    left_witness: Optional[SaddleConnection] = None
    right_witness: Optional[SaddleConnection] = None
    bound: Any = None

    @property
    def finite(self) -> bool:
        return self.left is not None or self.right is not None

    def contains(self, x: Any) -> bool:
        return (self.left is None or sgn(x - self.left) > 0) and (self.right is None or sgn(self.right - x) > 0)

    def to_json(self) -> dict:
        return {
            "left": "-inf" if self.left is None else _jn(self.left),
            "right": "+inf" if self.right is None else _jn(self.right),
            "left_witness": self.left_witness.to_json() if self.left_witness else None,
            "right_witness": self.right_witness.to_json() if self.right_witness else None,
            "bound": _jn(self.bound),
        }


def _require_h11(S: TranslationSurface) -> None:
    if len(S.cone_data()) != 2 or S.genus() != 2:
        raise WrongStratum("needs a surface in H(1,1)", stratum=str(S.stratum()))


def horizontal_saddle_connections(S: TranslationSurface, bound: Any) -> list[SaddleConnection]:
    """Horizontal saddle connections up to ``bound``, by tracing horizontal separatrices."""
    S.require_exact()
    bound = _exact_bound(bound)
    mesh = S.mesh
    out = []
    for d in ((1, 0), (-1, 0)):
        for (t, i) in mesh.corners_with_direction(d):
            r = mesh.trace(t, i, d, budget=10**6, max_len2=bound * bound)
            if r is not None:
                out.append(SaddleConnection(Vec2(*r.holonomy), mesh.lab[t][i], mesh.lab[r.end[0]][r.end[1]]))
    out.sort(key=SaddleConnection.sort_key)
    return out


def horizontal_interval(S: TranslationSurface, bound: Any = DEFAULT_HORIZONTAL_BOUND) -> HorizontalInterval:
    """The maximal open interval of horizontal rel moves of cone class 0."""
    _require_h11(S)
    left = right = None
    lw = rw = None
    for sc in horizontal_saddle_connections(S, bound):
        if sc.from_cone != 0 or sc.to_cone != 1:
            continue
        x = sc.holonomy[0]
        if sgn(x) > 0 and (right is None or sgn(x - right) < 0):
            right, rw = x, sc
        elif sgn(x) < 0 and (left is None or sgn(x - left) > 0):
            left, lw = x, sc
    return HorizontalInterval(left, right, lw, rw, bound)


@dataclass(frozen=True)
class HCMembership:
    kind: str  # "in_LmX" or "HC"
    s: Any = None
    bound: Any = None
    interval: Optional[HorizontalInterval] = None

    def __str__(self) -> str:
        if self.kind == "HC":
            return f"HC({self.s})"
        return f"in_LmX(bound={self.bound})"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "s": _jn(self.s) if self.s is not None else None,
            "bound": _jn(self.bound),
            "interval": self.interval.to_json() if self.interval else None,
        }


def hc_membership(S: TranslationSurface, bound: Any = DEFAULT_HORIZONTAL_BOUND) -> HCMembership:
    iv = horizontal_interval(S, bound)
    if not iv.finite:
        return HCMembership("in_LmX", bound=iv.bound, interval=iv)
    sides = [abs(x) for x in (iv.left, iv.right) if x is not None]
    s = min(sides, key=float)
    for x in sides:
        if sgn(x - s) < 0:
            s = x
    return HCMembership("HC", s=s, bound=iv.bound, interval=iv)


def classify_degeneration(
    S: TranslationSurface, x: Any, bound: Any = DEFAULT_HORIZONTAL_BOUND
) -> DegenerationReport:
    """Move class 0 by the endpoint ``(x, 0)`` of the interval and classify the result."""
    iv = horizontal_interval(S, bound)
    xq = x if isinstance(x, QuadNum) else QuadNum.coerce(Fraction(x))
    if not any(e is not None and sgn(xq - e) == 0 for e in (iv.left, iv.right)):
        raise NotOnBoundary("vector is not an endpoint of the horizontal interval", x=str(xq))
    zero = xq * 0
    res = rel_translate(S, (xq, zero), 0)
    if not isinstance(res, DegenerationReport):
        raise NotOnBoundary("translation did not degenerate", x=str(xq))
    return res
