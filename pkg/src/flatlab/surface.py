"""Translation surfaces as glued polygons.

The public value type is :class:`TranslationSurface`: a list of polygons
(each a cyclic list of edge vectors, counter-clockwise) plus a perfect
matching of edges. Everything geometric is computed on a triangulated
:class:`~flatlab.mesh.Mesh` that is built lazily and cached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Optional, Sequence

from .errors import (
    BadMatching,
    EdgeMismatch,
    InexactSurface,
    NonSimplePolygon,
    NotUnimodular,
    UnclosedPolygon,
)
from .exactfield import QuadNum, field_of
from .mesh import Mesh, cross, dot, sgn, vadd, vneg, vsub


class Vec2(tuple):
    """A plane vector ``(x, y)``; a tuple so it hashes and compares cheaply."""

    __slots__ = ()

    def __new__(cls, x: Any, y: Any) -> Vec2:
        return tuple.__new__(cls, (x, y))

    def __reduce__(self) -> tuple:
        # tuple subclasses pickle through __new__(cls, tuple) otherwise
        return (Vec2, (self[0], self[1]))

    @property
    def x(self) -> Any:
        return self[0]

    @property
    def y(self) -> Any:
        return self[1]

    def __add__(self, other: Any) -> Vec2:  # type: ignore[override]
        return Vec2(self[0] + other[0], self[1] + other[1])

    def __sub__(self, other: Any) -> Vec2:
        return Vec2(self[0] - other[0], self[1] - other[1])

    def __neg__(self) -> Vec2:
        return Vec2(-self[0], -self[1])

    def __mul__(self, c: Any) -> Vec2:  # type: ignore[override]
        return Vec2(self[0] * c, self[1] * c)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Vec2({self[0]}, {self[1]})"

    def norm2(self) -> Any:
        return self[0] * self[0] + self[1] * self[1]


@dataclass(frozen=True)
class ConePoint:
    id: int
    angle_multiple: int  # total angle / (2*pi)

    @property
    def angle(self) -> float:
        return 2 * math.pi * self.angle_multiple

    @property
    def order(self) -> int:
        return self.angle_multiple - 1


@dataclass(frozen=True)
class Stratum:
    partition: tuple[int, ...]

    @property
    def genus(self) -> int:
        return sum(self.partition) // 2 + 1

    def __str__(self) -> str:
        return "H(" + ",".join(str(m) for m in self.partition) + ")"


H2 = Stratum((2,))
H11 = Stratum((1, 1))


def _to_number(x: Any, d: int) -> Any:
    if isinstance(x, QuadNum):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, (int, Fraction)):
        return QuadNum.coerce(x, d)
    raise TypeError(f"unsupported coordinate type {type(x).__name__}")


class TranslationSurface:
    """Polygons glued by translations along parallel, equal, opposite edges.

    ``gluing`` maps ``(polygon, edge)`` to ``(polygon', edge')`` and must be
    an involution without fixed points. Construction validates everything;
    use :func:`build_surface` for the checked public entry point.
    """

    def __init__(
        self,
        polygons: Sequence[Sequence[Any]],
        gluing: Any,
        label: Optional[str] = None,
        *,
        validate: bool = True,
    ) -> None:
        exact = all(
            not isinstance(c, float) for poly in polygons for e in poly for c in e
        )
        d = 1
        if exact:
            d = field_of(*(c for poly in polygons for e in poly for c in e))
        self.exact = exact
        self.d = d
        self.polygons: tuple[tuple[Vec2, ...], ...] = tuple(
            tuple(Vec2(_to_number(e[0], d), _to_number(e[1], d)) for e in poly)
            for poly in polygons
        )
        self.gluing: dict[tuple[int, int], tuple[int, int]] = _normalize_gluing(gluing)
        self.label = label
        self._mesh: Optional[Mesh] = None
        self._edge_map: Optional[dict] = None
        if validate:
            self._validate()

    # -- validation ---------------------------------------------------------------
    def _validate(self) -> None:
        edges = {(p, e) for p, poly in enumerate(self.polygons) for e in range(len(poly))}
        for p, poly in enumerate(self.polygons):
            if len(poly) < 3:
                raise NonSimplePolygon("polygon with fewer than 3 edges", polygon=p)
            sx = sum((e[0] for e in poly[1:]), poly[0][0])
            sy = sum((e[1] for e in poly[1:]), poly[0][1])
            if sgn(sx) != 0 or sgn(sy) != 0:
                raise UnclosedPolygon("edge vectors do not sum to zero", polygon=p)
            _check_simple(poly, p)
        if set(self.gluing) != edges:
            missing = sorted(edges - set(self.gluing))
            extra = sorted(set(self.gluing) - edges)
            raise BadMatching("gluing is not a perfect matching of edges", missing=missing, extra=extra)
        for a, b in self.gluing.items():
            if a == b:
                raise BadMatching("edge glued to itself", edge=list(a))
            if self.gluing.get(b) != a:
                raise BadMatching("gluing is not an involution", edge=list(a))
            u = self.polygons[a[0]][a[1]]
            v = self.polygons[b[0]][b[1]]
            if sgn(u[0] + v[0]) != 0 or sgn(u[1] + v[1]) != 0:
                raise EdgeMismatch("glued edges are not opposite", edge=list(a), partner=list(b))

    # -- mesh -----------------------------------------------------------------------
    @property
    def mesh(self) -> Mesh:
        if self._mesh is None:
            polys = [list(p) for p in self.polygons]
            mesh, emap = Mesh.from_polygons(polys, self.gluing)
            # cone ids follow the order in which classes first appear at polygon vertices
            order: dict[int, int] = {}
            for p, poly in enumerate(self.polygons):
                for i in range(len(poly)):
                    t, k = emap[(p, i)]
                    order.setdefault(mesh.lab[t][k], len(order))
            mesh.lab = [[order[c] for c in row] for row in mesh.lab]
            self._mesh, self._edge_map = mesh, emap
        return self._mesh

    @property
    def edge_map(self) -> dict:
        self.mesh
        return self._edge_map  # type: ignore[return-value]

    def require_exact(self) -> None:
        if not self.exact:
            raise InexactSurface("operation needs exact coordinates", label=self.label)

    # -- basic invariants ---------------------------------------------------------------
    def cone_data(self) -> list[ConePoint]:
        mesh = self.mesh
        return [
            ConePoint(cid, mesh.winding(*members[0])) for cid, members in enumerate(mesh.classes())
        ]

    def euler_characteristic(self) -> int:
        mesh = self.mesh
        v = len(mesh.classes())
        f = mesh.ntri
        return v - 3 * f // 2 + f

    def genus(self) -> int:
        return (2 - self.euler_characteristic()) // 2

    def stratum(self) -> Stratum:
        return Stratum(tuple(sorted((c.order for c in self.cone_data() if c.order > 0), reverse=True)))

    def area(self) -> Any:
        total = None
        for poly in self.polygons:
            a = _polygon_area2(poly)
            total = a if total is None else total + a
        return total / 2

    def n_edges(self) -> int:
        return sum(len(p) for p in self.polygons)

    def vertex_class(self, polygon: int, vertex: int) -> int:
        """Cone id of polygon vertex ``vertex`` (the start of edge ``vertex``)."""
        t, k = self.edge_map[(polygon, vertex)]
        return self.mesh.lab[t][k]

    # -- value semantics ------------------------------------------------------------------
    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, TranslationSurface):
            return NotImplemented
        return self.polygons == other.polygons and self.gluing == other.gluing

    def __hash__(self) -> int:
        return hash((self.polygons, tuple(sorted(self.gluing.items()))))

    def __repr__(self) -> str:
        name = f" {self.label!r}" if self.label else ""
        return f"<TranslationSurface{name}: {len(self.polygons)} polygons, {self.n_edges()} edges, d={self.d}>"

    @classmethod
    def from_mesh(cls, mesh: Mesh, label: Optional[str] = None) -> TranslationSurface:
        polys = [list(v) for v in mesh.vec]
        gluing = {(t, k): tuple(mesh.glue[t][k]) for t in range(mesh.ntri) for k in range(3)}
        return cls(polys, gluing, label, validate=False)


def _normalize_gluing(gluing: Any) -> dict[tuple[int, int], tuple[int, int]]:
    out: dict[tuple[int, int], tuple[int, int]] = {}
    if isinstance(gluing, dict):
        items: Iterable = gluing.items()
        for a, b in items:
            out[tuple(a)] = tuple(b)  # type: ignore[assignment]
        return out
    for entry in gluing:
        p, e, p2, e2 = entry
        if (p, e) in out or (p2, e2) in out:
            raise BadMatching("edge appears twice in gluing", entry=list(entry))
        out[(p, e)] = (p2, e2)
        out[(p2, e2)] = (p, e)
    return out


def _polygon_points(poly: Sequence[Vec2]) -> list:
    pts = [(poly[0][0] * 0, poly[0][1] * 0)]
    for e in poly[:-1]:
        pts.append(vadd(pts[-1], e))
    return pts


def _polygon_area2(poly: Sequence[Vec2]) -> Any:
    pts = _polygon_points(poly)
    n = len(pts)
    total = cross(pts[0], pts[1 % n])
    for i in range(1, n):
        total = total + cross(pts[i], pts[(i + 1) % n])
    return total


def _segments_intersect(p1, p2, q1, q2) -> bool:
    d1 = sgn(cross(vsub(p2, p1), vsub(q1, p1)))
    d2 = sgn(cross(vsub(p2, p1), vsub(q2, p1)))
    d3 = sgn(cross(vsub(q2, q1), vsub(p1, q1)))
    d4 = sgn(cross(vsub(q2, q1), vsub(p2, q1)))
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True

    def on_seg(a, b, c) -> bool:
        return (
            sgn(cross(vsub(b, a), vsub(c, a))) == 0
            and sgn(dot(vsub(c, a), vsub(c, b))) <= 0
        )

    return (
        (d1 == 0 and on_seg(p1, p2, q1))
        or (d2 == 0 and on_seg(p1, p2, q2))
        or (d3 == 0 and on_seg(q1, q2, p1))
        or (d4 == 0 and on_seg(q1, q2, p2))
    )


def _check_simple(poly: Sequence[Vec2], p: int) -> None:
    n = len(poly)
    for e in poly:
        if sgn(e[0]) == 0 and sgn(e[1]) == 0:
            raise NonSimplePolygon("zero-length edge", polygon=p)
    if sgn(_polygon_area2(poly)) <= 0:
        raise NonSimplePolygon("polygon is not positively oriented", polygon=p)
    pts = _polygon_points(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if sgn(cross(a, b)) == 0 and sgn(dot(a, b)) < 0:
            raise NonSimplePolygon("edge folds back on its neighbour", polygon=p, vertex=(i + 1) % n)
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if _segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]):
                raise NonSimplePolygon("polygon edges cross", polygon=p, edges=[i, j])


# -- operations ------------------------------------------------------------------------


def build_surface(polygons: Sequence[Sequence[Any]], gluing: Any, label: Optional[str] = None) -> TranslationSurface:
    S = TranslationSurface(polygons, gluing, label)
    S.mesh  # triangulate eagerly so non-triangulable input fails here
    return S


def cone_data(S: TranslationSurface) -> list[ConePoint]:
    return S.cone_data()


def stratum(S: TranslationSurface) -> Stratum:
    return S.stratum()


def area(S: TranslationSurface) -> Any:
    return S.area()


def matrix_det(g: Sequence[Sequence[Any]]) -> Any:
    return g[0][0] * g[1][1] - g[0][1] * g[1][0]


def _check_unimodular(g: Sequence[Sequence[Any]]) -> None:
    det = matrix_det(g)
    if isinstance(det, float):
        if abs(det - 1) > 1e-12:
            raise NotUnimodular("determinant is not 1", det=det)
    elif det != 1:
        raise NotUnimodular("determinant is not 1", det=str(det))


def apply_matrix_to_vec(g: Sequence[Sequence[Any]], v: Sequence[Any]) -> Vec2:
    return Vec2(g[0][0] * v[0] + g[0][1] * v[1], g[1][0] * v[0] + g[1][1] * v[1])


def apply_sl2(S: TranslationSurface, g: Sequence[Sequence[Any]]) -> TranslationSurface:
    """Act by a determinant-one matrix on every edge vector."""
    _check_unimodular(g)
    polys = [[apply_matrix_to_vec(g, e) for e in poly] for poly in S.polygons]
    return TranslationSurface(polys, S.gluing, S.label, validate=False)


def u_matrix(t: Any) -> tuple:
    return ((1, t), (0, 1))


def v_matrix(t: Any) -> tuple:
    return ((1, 0), (t, 1))


def a_matrix_from_exp(lam: Any) -> tuple:
    return ((lam, 0), (0, 1 / lam))


def same_geometry(S1: TranslationSurface, S2: TranslationSurface) -> bool:
    return canonical_key(S1) == canonical_key(S2)


def canonical_key(S: TranslationSurface) -> tuple:
    from .canonical import canonical_key as _ck

    return _ck(S)


def absolute_periods(S: TranslationSurface) -> list[Vec2]:
    """Holonomies of fundamental cycles of the 1-skeleton; they span hol(H_1(S; Z))."""
    mesh = S.mesh
    nclass = len(mesh.classes())
    # edge list between vertex classes
    edges = []
    seen = set()
    for t in range(mesh.ntri):
        for k in range(3):
            if (t, k) in seen:
                continue
            seen.add((t, k))
            seen.add(tuple(mesh.glue[t][k]))
            edges.append((mesh.lab[t][k], mesh.lab[t][(k + 1) % 3], mesh.vec[t][k]))
    pos: dict[int, Any] = {0: None}
    zero = mesh.vec[0][0][0] * 0
    pos[0] = (zero, zero)
    tree = set()
    changed = True
    while changed and len(pos) < nclass:
        changed = False
        for idx, (a, b, v) in enumerate(edges):
            if a in pos and b not in pos:
                pos[b] = vadd(pos[a], v)
                tree.add(idx)
                changed = True
            elif b in pos and a not in pos:
                pos[a] = vsub(pos[b], v)
                tree.add(idx)
                changed = True
    out = []
    for idx, (a, b, v) in enumerate(edges):
        if idx in tree:
            continue
        h = vsub(v, vsub(pos[b], pos[a]))
        if sgn(h[0]) != 0 or sgn(h[1]) != 0:
            out.append(Vec2(*h))
    return out


def period_lattice(S: TranslationSurface) -> tuple:
    """Hermite normal form of the Z-span of the absolute periods (exact surfaces)."""
    S.require_exact()
    d = S.d
    rows = []
    for v in absolute_periods(S):
        x = QuadNum.coerce(v[0], d)
        y = QuadNum.coerce(v[1], d)
        rows.append([x.a, x.b, y.a, y.b])
    return _hnf_rational(rows)


def _hnf_rational(rows: list[list[Fraction]]) -> tuple:
    if not rows:
        return ()
    den = 1
    for r in rows:
        for c in r:
            den = den * c.denominator // math.gcd(den, c.denominator)
    M = [[int(c * den) for c in r] for r in rows]
    ncol = len(M[0])
    basis: list[list[int]] = []
    col = 0
    rowsleft = M
    for col in range(ncol):
        rowsleft = [r for r in rowsleft if any(r)]
        piv = [r for r in rowsleft if r[col] != 0]
        rest = [r for r in rowsleft if r[col] == 0]
        while len(piv) > 1:
            piv.sort(key=lambda r: abs(r[col]))
            p = piv[0]
            new = [p]
            for r in piv[1:]:
                q = r[col] // p[col]
                r2 = [a - q * b for a, b in zip(r, p)]
                if r2[col] != 0:
                    new.append(r2)
                else:
                    rest.append(r2)
            piv = new
        if piv:
            p = piv[0]
            if p[col] < 0:
                p = [-a for a in p]
            basis.append(p)
        rowsleft = rest
    # reduce entries above pivots
    for i, b in enumerate(basis):
        pc = next(j for j, a in enumerate(b) if a != 0)
        for k in range(i):
            q = basis[k][pc] // b[pc]
            basis[k] = [a - q * c for a, c in zip(basis[k], b)]
    return tuple(tuple(Fraction(a, den) for a in b) for b in basis)


def delaunay_canonicalize(S: TranslationSurface) -> TranslationSurface:
    """Canonical Delaunay triangulation: equal for cut-and-paste equivalent inputs."""
    from .canonical import canonical_mesh

    mesh = S.mesh.copy()
    mesh.make_delaunay()
    if not S.exact:
        return TranslationSurface.from_mesh(mesh, S.label)
    out, _ = canonical_mesh(mesh)
    return TranslationSurface.from_mesh(out, S.label)


def rel_translate(S: TranslationSurface, v: Any, cls: int = 0) -> Any:
    from .rel import rel_translate as _rel

    return _rel(S, v, cls)
