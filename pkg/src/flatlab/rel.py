"""The rel pseudo-action: translate one singularity class, keep absolute periods.

Moving every corner of class ``cls`` by ``lam * v`` changes each triangle's
doubled area linearly in ``lam`` (all moving vertices share one vector). We
advance ``lam`` from 0 to 1 on a Delaunay mesh. A triangle about to flatten
is never reached: the step stops halfway to it and the Delaunay flips remove
it, since a vertex close to the interior of an edge lies inside the
neighbouring circumcircle. An edge shrinking to zero length means two
distinct singularities collide, and that instant is reached exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Union

from .errors import CollisionBeyondBoundary, NonTerminatingFlips, WrongStratum
from .exactfield import QuadNum
from .mesh import Mesh, cross, is_zero, sgn, vadd, vneg, vscale
from .surface import TranslationSurface, Vec2


@dataclass
class DegenerationReport:
    """Outcome of a rel translation that merges the two singularities.

    ``kind`` is ``"H2_surface"`` (``result`` is a surface) or
    ``"two_tori_wedge"`` (``result`` is a pair of tori; ``wedge`` gives the
    cone id of the merged point on each).
    """

    kind: str
    result: Any
    vector: Any
    wedge: Optional[tuple[int, int]] = None
    components: list = field(default_factory=list)

    def to_json(self) -> dict:
        from .io import surface_to_json

        if self.kind == "H2_surface":
            res: Any = surface_to_json(self.result)
        else:
            res = [surface_to_json(s) for s in self.result]
        return {"kind": self.kind, "vector": [_jnum(c) for c in self.vector], "result": res}


def _jnum(x: Any) -> Any:
    return x.to_json() if isinstance(x, QuadNum) else x


def _edge_delta(mesh: Mesh, t: int, k: int, cls: int, v: tuple) -> tuple:
    a = mesh.lab[t][k] == cls
    b = mesh.lab[t][(k + 1) % 3] == cls
    z = v[0] * 0
    if a == b:
        return (z, z)
    return v if b else vneg(v)


def _advance(mesh: Mesh, s: Any, cls: int, v: tuple) -> None:
    if sgn(s) == 0:
        return
    for t in range(mesh.ntri):
        mesh.vec[t] = [vadd(e, vscale(s, _edge_delta(mesh, t, k, cls, v))) for k, e in enumerate(mesh.vec[t])]


def _area_rate(mesh: Mesh, t: int, cls: int, v: tuple) -> tuple[Any, Any]:
    e0, e1, _ = mesh.vec[t]
    d0 = _edge_delta(mesh, t, 0, cls, v)
    d1 = _edge_delta(mesh, t, 1, cls, v)
    return cross(e0, e1), cross(e0, d1) + cross(d0, e1)


def _first_collapse(mesh: Mesh, cls: int, v: tuple) -> Any:
    """Smallest positive ``s`` at which some triangle's area reaches zero."""
    best = None
    for t in range(mesh.ntri):
        a0, rate = _area_rate(mesh, t, cls, v)
        if sgn(rate) < 0:
            s = a0 / (-rate)
            if best is None or sgn(s - best) < 0:
                best = s
    return best


def _first_collision(mesh: Mesh, cls: int, v: tuple) -> Any:
    """Smallest positive ``s`` at which an edge between the two classes has zero length."""
    best = None
    for t in range(mesh.ntri):
        for k in range(3):
            dv = _edge_delta(mesh, t, k, cls, v)
            if is_zero(dv):
                continue
            e = mesh.vec[t][k]
            if sgn(cross(e, dv)) != 0:
                continue
            dd = dv[0] * dv[0] + dv[1] * dv[1]
            ed = e[0] * dv[0] + e[1] * dv[1]
            if sgn(ed) < 0:
                s = -ed / dd
                if best is None or sgn(s - best) < 0:
                    best = s
    return best


def _positive(mesh: Mesh) -> bool:
    return all(sgn(mesh.area2(t)) > 0 for t in range(mesh.ntri))


def _to_surface(mesh: Mesh, label: Optional[str]) -> TranslationSurface:
    """Surface from a mesh, ordered so that mesh class ids become cone ids."""
    order = []
    placed = set()
    for cid in sorted({c for row in mesh.lab for c in row}):
        if cid in {mesh.lab[t][i] for t in placed for i in range(3)}:
            continue
        for t in range(mesh.ntri):
            if t not in placed and cid in mesh.lab[t]:
                order.append((t, mesh.lab[t].index(cid)))
                placed.add(t)
                break
    order += [(t, 0) for t in range(mesh.ntri) if t not in placed]
    new_id = {t: n for n, (t, _) in enumerate(order)}
    rot = dict(order)
    polys = []
    gluing = {}
    for n, (t, r) in enumerate(order):
        polys.append([mesh.vec[t][(r + j) % 3] for j in range(3)])
        for j in range(3):
            t2, k2 = mesh.glue[t][(r + j) % 3]
            gluing[(n, j)] = (new_id[t2], (k2 - rot[t2]) % 3)
    return TranslationSurface(polys, gluing, label)


def _as_vec(v: Any, d: int) -> tuple:
    return tuple(x if isinstance(x, (QuadNum, float)) else QuadNum.coerce(Fraction(x), 1) for x in v)


def rel_translate(
    S: TranslationSurface, v: Any, cls: int = 0, max_events: int = 100000
) -> Union[TranslationSurface, DegenerationReport]:
    """Move every vertex of cone class ``cls`` by ``v``; fixed absolute periods."""
    cones = S.cone_data()
    if len(cones) != 2:
        raise WrongStratum("rel translation needs exactly two cone points", n_cones=len(cones))
    if cls not in (0, 1):
        raise WrongStratum("no such cone class", cls=cls)
    v = _as_vec(v, S.d)
    if is_zero(v):
        return S
    mesh = S.mesh.copy()
    lam: Any = QuadNum(0) if S.exact else 0.0
    for _ in range(max_events):
        mesh.make_delaunay()
        remaining = 1 - lam
        hit = _first_collision(mesh, cls, v)
        step = _first_collapse(mesh, cls, v)
        if hit is not None and sgn(hit - remaining) <= 0 and (step is None or sgn(hit - step) <= 0):
            _advance(mesh, hit, cls, v)
            if sgn(hit - remaining) < 0:
                raise CollisionBeyondBoundary(
                    "singularities collide before the end of the translation",
                    at_fraction=str(lam + hit),
                )
            return _degeneration(mesh, v, S.label)
        if step is None or sgn(step - remaining) > 0:
            _advance(mesh, remaining, cls, v)
            break
        # stop short of the collapse; the Delaunay pass then flips the thin triangle away
        _advance(mesh, step / 2, cls, v)
        lam = lam + step / 2
    else:
        raise NonTerminatingFlips("rel translation did not finish within its event budget", events=max_events)
    if not _positive(mesh):
        raise NonTerminatingFlips("rel translation left a non-positive triangle")
    return _to_surface(mesh, S.label)


def _degeneration(mesh: Mesh, v: tuple, label: Optional[str]) -> DegenerationReport:
    glue = [list(g) for g in mesh.glue]
    alive = [True] * mesh.ntri
    for t in range(mesh.ntri):
        zk = [k for k in range(3) if is_zero(mesh.vec[t][k])]
        if not zk:
            continue
        k = zk[0]
        p1 = glue[t][(k + 1) % 3]
        p2 = glue[t][(k + 2) % 3]
        alive[t] = False
        if p1 == (t, (k + 2) % 3):
            continue
        glue[p1[0]][p1[1]] = p2
        glue[p2[0]][p2[1]] = p1
    keep = [t for t in range(mesh.ntri) if alive[t]]
    # connected components of the surviving triangles
    comp: dict[int, int] = {}
    comps: list[list[int]] = []
    for t in keep:
        if t in comp:
            continue
        cur = [t]
        comp[t] = len(comps)
        stack = [t]
        while stack:
            a = stack.pop()
            for k in range(3):
                b = glue[a][k][0]
                if b not in comp:
                    comp[b] = comp[t]
                    cur.append(b)
                    stack.append(b)
        comps.append(sorted(cur))
    surfaces = []
    for members in comps:
        loc = {t: n for n, t in enumerate(members)}
        vec = [list(mesh.vec[t]) for t in members]
        gl = [[(loc[glue[t][k][0]], glue[t][k][1]) for k in range(3)] for t in members]
        sub = Mesh(vec, gl)
        sub.compute_classes()
        surfaces.append(TranslationSurface.from_mesh(sub, label))
    if len(surfaces) == 1:
        S2 = _rebuild(surfaces[0])
        cones = S2.cone_data()
        if S2.genus() == 2 and len(cones) == 1 and cones[0].angle_multiple == 3:
            return DegenerationReport("H2_surface", S2, Vec2(*v), components=[S2])
        raise WrongStratum("degeneration produced an unexpected surface", stratum=str(S2.stratum()))
    if len(surfaces) == 2 and all(s.genus() == 1 for s in surfaces):
        tori = tuple(_rebuild(s) for s in surfaces)
        return DegenerationReport("two_tori_wedge", tori, Vec2(*v), wedge=(0, 0), components=list(tori))
    raise WrongStratum("degeneration produced an unexpected configuration", n_components=len(surfaces))


def _rebuild(S: TranslationSurface) -> TranslationSurface:
    return TranslationSurface([list(p) for p in S.polygons], S.gluing, S.label)
