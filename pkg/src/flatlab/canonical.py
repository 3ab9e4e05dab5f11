"""Canonical presentations via Delaunay cells.

The Delaunay triangulation of a translation surface is unique up to flips
of cocircular ("tight") edges, so merging triangles across tight edges gives
a cell decomposition that depends on the geometry alone. A canonical
labeling of those cells (lexicographically least breadth-first encoding over
all starting half-edges) then yields a key that two presentations share iff
they are cut-and-paste equivalent, and a fan triangulation of the labeled
cells gives a canonical triangulated surface.
"""

from __future__ import annotations

from collections import deque
from typing import Any

from .exactfield import QuadNum
from .mesh import Mesh, vadd, vneg


def _num_key(x: Any) -> tuple:
    if isinstance(x, QuadNum):
        return (x.a, x.b)
    return (x, 0)


def _vec_key(v: tuple) -> tuple:
    return _num_key(v[0]) + _num_key(v[1])


def delaunay_cells(mesh: Mesh) -> tuple[list[list[tuple[int, int]]], dict]:
    """Boundary half-edge cycles of the Delaunay cells of a Delaunay mesh.

    Returns ``(cells, where)`` with ``cells[c]`` the CCW list of non-tight
    half-edges ``(t, k)`` bounding cell ``c`` and ``where[(t, k)] = (c, j)``.
    """
    tight = [[mesh.delaunay_sign(t, k) == 0 for k in range(3)] for t in range(mesh.ntri)]
    cells: list[list[tuple[int, int]]] = []
    where: dict[tuple[int, int], tuple[int, int]] = {}
    for t in range(mesh.ntri):
        for k in range(3):
            if tight[t][k] or (t, k) in where:
                continue
            cyc = []
            h = (t, k)
            while True:
                cyc.append(h)
                ht, hk = h
                nt, nk = ht, (hk + 1) % 3
                while tight[nt][nk]:
                    nt, nk = mesh.glue[nt][nk]
                    nk = (nk + 1) % 3
                h = (nt, nk)
                if h == (t, k):
                    break
            c = len(cells)
            for j, hh in enumerate(cyc):
                where[hh] = (c, j)
            cells.append(cyc)
    return cells, where


def _encode(mesh: Mesh, cells: list, where: dict, start: tuple[int, int]) -> tuple[list, list]:
    order: dict[int, int] = {start[0]: 0}
    offset: dict[int, int] = {start[0]: start[1]}
    seq = [start[0]]
    code: list = []
    q = deque([start[0]])
    while q:
        c = q.popleft()
        cyc = cells[c]
        n = len(cyc)
        code.append(n)
        off = offset[c]
        for r in range(n):
            t, k = cyc[(off + r) % n]
            code.append(_vec_key(mesh.vec[t][k]))
            c2, j2 = where[tuple(mesh.glue[t][k])]
            if c2 not in order:
                order[c2] = len(order)
                offset[c2] = j2
                seq.append(c2)
                q.append(c2)
            code.append((order[c2], (j2 - offset[c2]) % len(cells[c2])))
    return code, [(c, offset[c]) for c in seq]


def canonical_labeling(mesh: Mesh) -> tuple[tuple, list, list, dict]:
    """Least encoding of the cell complex of a Delaunay mesh.

    Returns ``(key, cells, layout, where)``; ``layout`` lists ``(cell, offset)``
    in canonical order.
    """
    cells, where = delaunay_cells(mesh)
    keys = {h: _vec_key(mesh.vec[h[0]][h[1]]) for cyc in cells for h in cyc}
    kmin = min(keys.values())
    best = None
    best_layout: list = []
    for c, cyc in enumerate(cells):
        for j, h in enumerate(cyc):
            if keys[h] != kmin:
                continue
            code, layout = _encode(mesh, cells, where, (c, j))
            if best is None or code < best:
                best, best_layout = code, layout
    assert best is not None
    return tuple(best), cells, best_layout, where


def canonical_mesh(mesh: Mesh) -> tuple[Mesh, tuple]:
    """Fan-triangulate the canonically labeled Delaunay cells of a Delaunay mesh."""
    key, cells, layout, where = canonical_labeling(mesh)
    rank = {c: i for i, (c, _) in enumerate(layout)}
    off = dict(layout)
    # triangle ids: cell i with n sides gets n-2 fan triangles around its vertex 0
    first: list[int] = []
    ntri = 0
    for c, _ in layout:
        first.append(ntri)
        ntri += len(cells[c]) - 2
    vec: list = [None] * ntri
    glue: list = [[None, None, None] for _ in range(ntri)]
    slot: dict[tuple[int, int], tuple[int, int]] = {}  # (cell rank, side) -> (triangle, edge)
    for i, (c, o) in enumerate(layout):
        cyc = cells[c]
        n = len(cyc)
        sides = [mesh.vec[cyc[(o + r) % n][0]][cyc[(o + r) % n][1]] for r in range(n)]
        base = first[i]
        diag = sides[0]
        for f in range(n - 2):
            t = base + f
            if f == 0:
                e0 = sides[0]
                slot[(i, 0)] = (t, 0)
            else:
                e0 = diag
            e1 = sides[f + 1]
            slot[(i, f + 1)] = (t, 1)
            if f == n - 3:
                e2 = sides[n - 1]
                slot[(i, n - 1)] = (t, 2)
            else:
                diag = vadd(e0, e1)
                e2 = vneg(diag)
                glue[t][2] = (t + 1, 0)
                glue[t + 1][0] = (t, 2)
            vec[t] = [e0, e1, e2]
    for i, (c, o) in enumerate(layout):
        cyc = cells[c]
        n = len(cyc)
        for r in range(n):
            t, k = cyc[(o + r) % n]
            c2, j2 = where[tuple(mesh.glue[t][k])]
            i2 = rank[c2]
            r2 = (j2 - off[c2]) % len(cells[c2])
            ta, ka = slot[(i, r)]
            glue[ta][ka] = slot[(i2, r2)]
    out = Mesh(vec, glue)
    out.compute_classes()
    return out, key


def canonical_key(S: Any) -> tuple:
    """Hashable key equal for two surfaces iff they are cut-and-paste equivalent."""
    mesh = S.mesh.copy()
    mesh.make_delaunay()
    return canonical_labeling(mesh)[0]
