"""Triangulated translation surfaces: the mutable workhorse behind the kernel.

A :class:`Mesh` stores, per triangle ``t``, three edge vectors ``vec[t]``
(counter-clockwise, summing to zero), the gluing ``glue[t][i] = (t', i')``
and vertex-class labels ``lab[t][i]`` for the corner at the start of edge
``i``. Local coordinates put vertex 0 of each triangle at the origin.

Number type is generic: exact :class:`~flatlab.exactfield.QuadNum` values or
floats. All predicates go through :func:`sgn`, which is exact for QuadNum
and uses a small absolute tolerance for floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator, Optional

from .errors import BadMatching, NonSimplePolygon, NonTerminatingFlips, TraceBudgetExceeded
from .exactfield import QuadNum

FLOAT_EPS = 1e-9

Vec = tuple  # (x, y)


def sgn(x: Any) -> int:
    if isinstance(x, QuadNum):
        return x.sign()
    if x > FLOAT_EPS:
        return 1
    if x < -FLOAT_EPS:
        return -1
    return 0


def vadd(u: Vec, v: Vec) -> Vec:
    return (u[0] + v[0], u[1] + v[1])


def vsub(u: Vec, v: Vec) -> Vec:
    return (u[0] - v[0], u[1] - v[1])


def vneg(u: Vec) -> Vec:
    return (-u[0], -u[1])


def vscale(c: Any, u: Vec) -> Vec:
    return (c * u[0], c * u[1])


def cross(u: Vec, v: Vec) -> Any:
    return u[0] * v[1] - u[1] * v[0]


def dot(u: Vec, v: Vec) -> Any:
    return u[0] * v[0] + u[1] * v[1]


def is_zero(u: Vec) -> bool:
    return sgn(u[0]) == 0 and sgn(u[1]) == 0


def in_sector(u: Vec, w: Vec, d: Vec) -> bool:
    """Is direction ``d`` in the half-open sector ``[u, w)`` (CCW, angle < pi)?"""
    c = sgn(cross(u, d))
    if c == 0:
        return sgn(dot(u, d)) > 0
    return c > 0 and sgn(cross(d, w)) > 0


def _incircle_filter(a: Vec, b: Vec, c: Vec, p: Vec) -> Optional[int]:
    """Float evaluation of the in-circle sign, or None when rounding could flip it."""
    try:
        vals = [x.approx() for x in (a[0], a[1], b[0], b[1], c[0], c[1], p[0], p[1])]
    except (AttributeError, OverflowError):
        return None
    f = [v for v, _ in vals]
    mag = max(m for _, m in vals)
    ax, ay = f[0] - f[6], f[1] - f[7]
    bx, by = f[2] - f[6], f[3] - f[7]
    cx, cy = f[4] - f[6], f[5] - f[7]
    det = (
        (ax * ax + ay * ay) * (bx * cy - by * cx)
        - (bx * bx + by * by) * (ax * cy - ay * cx)
        + (cx * cx + cy * cy) * (ax * by - ay * bx)
    )
    # every term is a product of four differences bounded by 2*mag
    bound = 1e-11 * (2 * mag) ** 4
    if det > bound:
        return 1
    if det < -bound:
        return -1
    return None


def incircle(a: Vec, b: Vec, c: Vec, p: Vec) -> int:
    """+1 if ``p`` is strictly inside the circumcircle of CCW ``abc``, 0 on it, -1 outside."""
    if isinstance(p[0], QuadNum):
        s = _incircle_filter(a, b, c, p)
        if s is not None:
            return s
    ax, ay = a[0] - p[0], a[1] - p[1]
    bx, by = b[0] - p[0], b[1] - p[1]
    cx, cy = c[0] - p[0], c[1] - p[1]
    det = (
        (ax * ax + ay * ay) * (bx * cy - by * cx)
        - (bx * bx + by * by) * (ax * cy - ay * cx)
        + (cx * cx + cy * cy) * (ax * by - ay * bx)
    )
    return sgn(det)


def triangulate_polygon(points: list[Vec]) -> list[tuple[int, int, int]]:
    """Ear clipping on a simple CCW polygon given by its vertex positions.

    Returns vertex-index triples (CCW). Straight (angle pi) vertices are
    allowed; they are never used as ear tips.
    """
    idx = list(range(len(points)))
    out: list[tuple[int, int, int]] = []
    guard = 0
    while len(idx) > 3:
        n = len(idx)
        for k in range(n):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % n]
            a, b, c = points[i0], points[i1], points[i2]
            if sgn(cross(vsub(b, a), vsub(c, b))) <= 0:
                continue
            blocked = False
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                p = points[j]
                if (
                    sgn(cross(vsub(b, a), vsub(p, a))) >= 0
                    and sgn(cross(vsub(c, b), vsub(p, b))) >= 0
                    and sgn(cross(vsub(a, c), vsub(p, c))) >= 0
                ):
                    blocked = True
                    break
            if not blocked:
                out.append((i0, i1, i2))
                del idx[k]
                break
        else:
            raise NonSimplePolygon("ear clipping found no ear")
        guard += 1
        if guard > 10 * len(points):
            raise NonSimplePolygon("ear clipping did not terminate")
    out.append((idx[0], idx[1], idx[2]))
    return out


@dataclass
class TraceResult:
    end: tuple[int, int]  # corner (triangle, vertex) where the ray stopped
    holonomy: Vec
    steps: int
    pieces: list = field(default_factory=list)  # (triangle, entry_local, exit_local)


class Mesh:
    def __init__(self, vec: list, glue: list, lab: Optional[list] = None) -> None:
        self.vec = vec
        self.glue = glue
        self.lab = lab if lab is not None else [[-1, -1, -1] for _ in vec]

    # -- construction --------------------------------------------------------
    @classmethod
    def from_polygons(
        cls, polygons: list[list[Vec]], gluing: dict[tuple[int, int], tuple[int, int]]
    ) -> tuple[Mesh, dict[tuple[int, int], tuple[int, int]]]:
        """Triangulate every polygon; return the mesh and the map polygon edge -> triangle edge."""
        vec: list = []
        glue: list = []
        edge_map: dict[tuple[int, int], tuple[int, int]] = {}
        for pi, poly in enumerate(polygons):
            pts = [(poly[0][0] * 0, poly[0][1] * 0)]
            for e in poly[:-1]:
                pts.append(vadd(pts[-1], e))
            n = len(poly)
            owner: dict[tuple[int, int], Any] = {}
            for i in range(n):
                owner[(i, (i + 1) % n)] = ("poly", pi, i)
            for (i0, i1, i2) in triangulate_polygon(pts):
                t = len(vec)
                corners = (i0, i1, i2)
                vs = []
                gl = []
                for k in range(3):
                    a, b = corners[k], corners[(k + 1) % 3]
                    vs.append(vsub(pts[b], pts[a]))
                    gl.append(None)
                    key = (a, b)
                    if key in owner:
                        tag = owner.pop(key)
                        if tag[0] == "poly":
                            edge_map[(tag[1], tag[2])] = (t, k)
                        else:
                            t2, k2 = tag[1], tag[2]
                            gl[k] = (t2, k2)
                            glue[t2][k2] = (t, k)
                    else:
                        owner[(b, a)] = ("tri", t, k)
                vec.append(vs)
                glue.append(gl)
        for (p, e), (p2, e2) in gluing.items():
            t, k = edge_map[(p, e)]
            t2, k2 = edge_map[(p2, e2)]
            glue[t][k] = (t2, k2)
        for t in range(len(vec)):
            for k in range(3):
                if glue[t][k] is None:
                    raise BadMatching("triangulation left an unglued edge", triangle=t, edge=k)
        mesh = cls(vec, glue)
        mesh.compute_classes()
        return mesh, edge_map

    def copy(self) -> Mesh:
        return Mesh([list(v) for v in self.vec], [list(g) for g in self.glue], [list(l) for l in self.lab])

    @property
    def ntri(self) -> int:
        return len(self.vec)

    # -- local geometry ---------------------------------------------------------
    def verts(self, t: int) -> tuple[Vec, Vec, Vec]:
        e0, e1, _ = self.vec[t]
        z = e0[0] * 0
        return ((z, z), e0, vadd(e0, e1))

    def area2(self, t: int) -> Any:
        e0, e1, _ = self.vec[t]
        return cross(e0, e1)

    # -- corners ----------------------------------------------------------------
    def ccw_next(self, t: int, i: int) -> tuple[int, int]:
        return self.glue[t][(i - 1) % 3]

    def cw_next(self, t: int, i: int) -> tuple[int, int]:
        t2, k2 = self.glue[t][i]
        return (t2, (k2 + 1) % 3)

    def corners_around(self, t: int, i: int) -> Iterator[tuple[int, int]]:
        start = (t, i)
        c = start
        while True:
            yield c
            c = self.ccw_next(*c)
            if c == start:
                return

    def corner_sector(self, t: int, i: int) -> tuple[Vec, Vec]:
        v = self.vec[t]
        return v[i], vneg(v[(i - 1) % 3])

    def compute_classes(self) -> list[list[tuple[int, int]]]:
        """Label corners by vertex class; classes ordered by their first corner."""
        self.lab = [[-1, -1, -1] for _ in self.vec]
        classes: list[list[tuple[int, int]]] = []
        for t in range(self.ntri):
            for i in range(3):
                if self.lab[t][i] >= 0:
                    continue
                cid = len(classes)
                members = []
                for (t2, i2) in self.corners_around(t, i):
                    self.lab[t2][i2] = cid
                    members.append((t2, i2))
                classes.append(members)
        return classes

    def classes(self) -> list[list[tuple[int, int]]]:
        out: dict[int, list] = {}
        for t in range(self.ntri):
            for i in range(3):
                out.setdefault(self.lab[t][i], []).append((t, i))
        return [out[k] for k in sorted(out)]

    def winding(self, t: int, i: int) -> int:
        """Total angle at the vertex of corner (t, i) divided by 2*pi."""
        count = 0
        for (t2, i2) in self.corners_around(t, i):
            u, w = self.corner_sector(t2, i2)
            if sgn(u[1]) < 0 and sgn(w[1]) >= 0:
                count += 1
        return count

    def find_corner(self, t: int, i: int, d: Vec) -> tuple[int, int]:
        """The corner around the vertex of (t, i) whose half-open sector holds ``d``."""
        for c in self.corners_around(t, i):
            u, w = self.corner_sector(*c)
            if in_sector(u, w, d):
                return c
        raise ValueError("direction not found around vertex")

    def corners_with_direction(self, d: Vec) -> list[tuple[int, int]]:
        out = []
        for t in range(self.ntri):
            for i in range(3):
                u, w = self.corner_sector(t, i)
                if in_sector(u, w, d):
                    out.append((t, i))
        return out

    # -- flips --------------------------------------------------------------------
    def opposite_point(self, t: int, e: int) -> Vec:
        """Position, in triangle t's local frame, of the far vertex of the neighbour across edge e."""
        t2, k2 = self.glue[t][e]
        a = self.verts(t)[e]
        # neighbour vertex k2 sits at b = a + vec[t][e]; its vertex k2+2 = a + vec[t2][(k2+1)%3]
        return vadd(a, self.vec[t2][(k2 + 1) % 3])

    def delaunay_sign(self, t: int, e: int) -> int:
        # frame centred at the start of edge e
        t2, k2 = self.glue[t][e]
        b = self.vec[t][e]
        c = vneg(self.vec[t][(e + 2) % 3])
        p = self.vec[t2][(k2 + 1) % 3]
        z = b[0] * 0
        return incircle((z, z), b, c, p)

    def flip(self, t: int, e: int) -> None:
        t2, e2 = self.glue[t][e]
        if t2 == t:
            raise ValueError("cannot flip an edge glued to its own triangle")
        A = self.vec[t]
        B = self.vec[t2]
        la = self.lab[t]
        lb = self.lab[t2]
        # t = (a, b, c) starting at vertex e; t2 = (b, a, W) starting at vertex e2
        ab, bc, ca = A[e], A[(e + 1) % 3], A[(e + 2) % 3]
        ba, aW, Wb = B[e2], B[(e2 + 1) % 3], B[(e2 + 2) % 3]
        lab_a, lab_b, lab_c = la[e], la[(e + 1) % 3], la[(e + 2) % 3]
        lab_W = lb[(e2 + 2) % 3]
        cW = vadd(ca, aW)
        old = {
            (t, (e + 1) % 3): (t2, 1),  # b->c
            (t, (e + 2) % 3): (t, 0),  # c->a
            (t2, (e2 + 1) % 3): (t, 1),  # a->W
            (t2, (e2 + 2) % 3): (t2, 0),  # W->b
        }
        partners = {k: self.glue[k[0]][k[1]] for k in old}
        self.vec[t] = [ca, aW, vneg(cW)]
        self.vec[t2] = [Wb, bc, cW]
        self.lab[t] = [lab_c, lab_a, lab_W]
        self.lab[t2] = [lab_W, lab_b, lab_c]
        self.glue[t] = [None, None, (t2, 2)]
        self.glue[t2] = [None, None, (t, 2)]
        for k, new in old.items():
            p = partners[k]
            p_new = old.get(p, p)
            self.glue[new[0]][new[1]] = p_new
            if p not in old:
                self.glue[p[0]][p[1]] = new

    def make_delaunay(self, max_flips: Optional[int] = None) -> int:
        if max_flips is None:
            max_flips = 10000 + 1000 * self.ntri
        stack = [(t, e) for t in range(self.ntri) for e in range(3)]
        flips = 0
        while stack:
            t, e = stack.pop()
            if self.delaunay_sign(t, e) > 0:
                t2, _ = self.glue[t][e]
                self.flip(t, e)
                flips += 1
                if flips > max_flips:
                    raise NonTerminatingFlips("Delaunay flip bound exceeded", flips=flips)
                for tt in (t, t2):
                    for k in range(3):
                        stack.append((tt, k))
        return flips

    def is_delaunay(self) -> bool:
        return all(self.delaunay_sign(t, e) <= 0 for t in range(self.ntri) for e in range(3))

    # -- straight-line tracing -------------------------------------------------------
    def walk(self, t: int, i: int, d: Vec) -> Iterator[tuple]:
        """Yield the pieces of the ray leaving corner (t, i) in direction ``d``.

        Each item is ``(triangle, entry, exit, offset, hit)`` in the triangle's
        local frame; ``offset`` is the developed position of that triangle's
        vertex 0 relative to the ray's start, and ``hit`` is the corner reached
        when the piece ends at a vertex (else ``None``, and the walk goes on).
        """
        V = self.verts(t)
        start = V[i]
        offset = vneg(start)
        vi = self.vec[t]
        if sgn(cross(vi[i], d)) == 0:
            k = (i + 1) % 3
            yield (t, start, V[k], offset, (t, k))
            return
        k = (i + 1) % 3
        p = start
        while True:
            Vk = V[k]
            ek = self.vec[t][k]
            alpha = cross(vsub(p, Vk), d) / cross(ek, d)
            q = vadd(Vk, vscale(alpha, ek))
            t2, k2 = self.glue[t][k]
            V2 = self.verts(t2)
            q2 = vadd(V2[k2], vscale(1 - alpha, self.vec[t2][k2]))
            far = (k2 + 2) % 3
            s = sgn(cross(d, vsub(V2[far], q2)))
            yield (t, p, q, offset, None)
            offset = vsub(vadd(offset, q), q2)
            t, p, V = t2, q2, V2
            if s == 0:
                yield (t, p, V[far], offset, (t, far))
                return
            k = (k2 + 1) % 3 if s > 0 else (k2 + 2) % 3

    def trace(
        self,
        t: int,
        i: int,
        d: Vec,
        budget: int = 10**6,
        record: bool = False,
        max_len2: Any = None,
    ) -> Optional[TraceResult]:
        """Follow the ray leaving corner (t, i) in direction ``d`` until it hits a vertex.

        ``d`` must lie in the corner's half-open sector. Returns ``None`` when
        ``max_len2`` is given and the ray travels farther than its square root
        without meeting a vertex; raises :class:`TraceBudgetExceeded` after
        ``budget`` triangle crossings.
        """
        V = self.verts(t)
        start = V[i]
        offset = (start[0] * 0 - start[0], start[1] * 0 - start[1])  # developed pos of vertex 0
        pieces = []
        vi = self.vec[t]
        if sgn(cross(vi[i], d)) == 0:
            k = (i + 1) % 3
            hol = vi[i]
            if record:
                pieces.append((t, start, V[k]))
            if max_len2 is not None and sgn(dot(hol, hol) - max_len2) > 0:
                return None
            return TraceResult((t, k), hol, 0, pieces)
        # leave through the opposite edge (i+1)
        k = (i + 1) % 3
        p = start
        steps = 0
        while True:
            Vk = V[k]
            ek = self.vec[t][k]
            alpha = cross(vsub(p, Vk), d) / cross(ek, d)
            q = vadd(Vk, vscale(alpha, ek))
            if record:
                pieces.append((t, p, q))
            if max_len2 is not None:
                h = vsub(vadd(offset, q), (0, 0))
                if sgn(dot(h, h) - max_len2) > 0:
                    return None
            t2, k2 = self.glue[t][k]
            V2 = self.verts(t2)
            beta = 1 - alpha
            q2 = vadd(V2[k2], vscale(beta, self.vec[t2][k2]))
            offset = vsub(vadd(offset, q), q2)
            t, k_in, p, V = t2, k2, q2, V2
            steps += 1
            if steps > budget:
                raise TraceBudgetExceeded("ray crossed too many triangles", budget=budget)
            far = (k_in + 2) % 3
            s = sgn(cross(d, vsub(V[far], p)))
            if s == 0:
                hol = vadd(offset, V[far])
                if record:
                    pieces.append((t, p, V[far]))
                if max_len2 is not None and sgn(dot(hol, hol) - max_len2) > 0:
                    return None
                return TraceResult((t, far), hol, steps, pieces)
            k = (k_in + 1) % 3 if s > 0 else (k_in + 2) % 3
