"""Cylinder decompositions in periodic directions and the eigenform test.

Decomposition works in a frame where the requested direction is horizontal:
for ``v = (a, b)`` we apply ``g = [[a/n, b/n], [-b, a]]`` with ``n = a^2+b^2``,
which sends ``v`` to ``(1, 0)`` and has determinant one. Widths are then
measured in units of ``v`` and heights in units of ``1/|v|`` (their product
is the true area), and everything stays inside the field of the surface.

Twist convention: each cylinder's twist is the horizontal offset from a
reference cone point on its bottom boundary to a reference cone point on its
top boundary, reduced into ``[0, w)``. The references are the starts of the
saddle connections that border a common neighbouring cylinder (the first in
a deterministic order), falling back to the longest boundary saddle
connection. On Z-tables every valid choice gives the same twist.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Union

from .errors import MixedField, NoSumRelation, TraceBudgetExceeded, WrongCylinderCount
from .exactfield import QuadNum, field_of
from .mesh import Mesh, in_sector, sgn, vadd
from .surface import TranslationSurface, Vec2, apply_sl2

DEFAULT_BUDGET = 10**6


def _q(x: Any) -> QuadNum:
    return x if isinstance(x, QuadNum) else QuadNum.coerce(Fraction(x))


@dataclass(frozen=True)
class Direction:
    v: Vec2

    @classmethod
    def of(cls, a: Any, b: Any) -> Direction:
        """Projective direction through ``(a, b)`` with a canonical representative.

        Rational directions become primitive integer vectors; otherwise the
        vector is scaled so its first nonzero coordinate is +-1.
        """
        a, b = _q(a), _q(b)
        if a.sign() == 0 and b.sign() == 0:
            raise ValueError("direction must be nonzero")
        lead = a if a.sign() != 0 else b
        s = abs(lead)
        a, b = a / s, b / s
        if a.is_rational() and b.is_rational():
            fa, fb = a.a, b.a
            den = fa.denominator * fb.denominator // math.gcd(fa.denominator, fb.denominator)
            ia, ib = int(fa * den), int(fb * den)
            g = math.gcd(ia, ib)
            return cls(Vec2(QuadNum(ia // g), QuadNum(ib // g)))
        return cls(Vec2(a, b))

    def to_frame(self) -> tuple:
        a, b = self.v
        n = a * a + b * b
        return ((a / n, b / n), (-b, a))

    def __str__(self) -> str:
        return f"({self.v[0]}, {self.v[1]})"


HORIZONTAL = Direction(Vec2(QuadNum(1), QuadNum(0)))


@dataclass(frozen=True)
class Cylinder:
    w: Any
    h: Any
    t: Any

    def to_json(self) -> dict:
        return {"w": _q(self.w).to_json(), "h": _q(self.h).to_json(), "t": _q(self.t).to_json()}


@dataclass(frozen=True)
class NormalizedParams:
    w1: Any
    w2: Any
    w3: Any
    s1: Any
    s2: Any
    tau1: Any
    tau2: Any
    m: Any
    order: tuple = (0, 1, 2)  # decomposition index of cylinders 1, 2, 3

    def to_json(self) -> dict:
        out = {k: _q(getattr(self, k)).to_json() for k in ("w1", "w2", "w3", "s1", "s2", "tau1", "tau2", "m")}
        out["order"] = list(self.order)
        return out


@dataclass
class CylinderDecomposition:
    direction: Direction
    cylinders: list
    normalized: Optional[NormalizedParams] = None
    saddle_connections: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "direction": [_q(c).to_json() for c in self.direction.v],
            "cylinders": [c.to_json() for c in self.cylinders],
            "normalized": self.normalized.to_json() if self.normalized else None,
        }


@dataclass
class NotPeriodic:
    """A direction in which some separatrix did not close.

    ``proven`` is False when the verdict only reflects an exhausted tracing
    budget (straight-line tracing cannot certify that a ray never closes).
    """

    direction: Direction
    separatrix: tuple
    crossings: int
    proven: bool = False

    def to_json(self) -> dict:
        return {
            "not_periodic": True,
            "proven": self.proven,
            "direction": [_q(c).to_json() for c in self.direction.v],
            "separatrix": list(self.separatrix),
            "crossings": self.crossings,
        }


@dataclass
class _SC:
    start: tuple  # corner (t, i) holding direction (1, 0)
    end: tuple  # corner where the trace arrived
    length: Any
    pieces: list  # (triangle, entry, exit, distance from start at entry)


def _trace_sc(mesh: Mesh, c: tuple, budget: int) -> _SC:
    pieces = []
    dist = None
    steps = 0
    for (t, p, q, off, hit) in mesh.walk(c[0], c[1], (1, 0)):
        if dist is None:
            dist = p[0] * 0
        pieces.append((t, p, q, dist))
        dist = dist + (q[0] - p[0])
        if hit is not None:
            return _SC(c, hit, dist, pieces)
        steps += 1
        if steps > budget:
            raise TraceBudgetExceeded(
                "separatrix did not close within the budget", corner=list(c), budget=budget
            )
    raise AssertionError("walk ended without a vertex")


def _rotate_to(mesh: Mesh, c: tuple, d: tuple, cw: bool) -> tuple:
    """First corner at c's vertex whose sector holds ``d``, turning from c (inclusive)."""
    cur = c
    for _ in range(4 * mesh.ntri + 4):
        u, w = mesh.corner_sector(*cur)
        if in_sector(u, w, d):
            return cur
        cur = mesh.cw_next(*cur) if cw else mesh.ccw_next(*cur)
    raise AssertionError("direction not found around vertex")


def _reduce_mod(t: Any, w: Any) -> Any:
    k = math.floor(t / w)
    return t - k * w


def horizontal_decomposition(
    S: TranslationSurface, budget: int = DEFAULT_BUDGET, with_scs: bool = False
) -> tuple[list[Cylinder], list]:
    mesh = S.mesh
    starts = mesh.corners_with_direction((1, 0))
    scs = [_trace_sc(mesh, c, budget) for c in starts]
    by_start = {sc.start: n for n, sc in enumerate(scs)}
    # successor along the bottom of the cylinder above (turn clockwise from the
    # arrival) and along the top of the cylinder below (turn counter-clockwise)
    up_next = []
    down_next = []
    for sc in scs:
        back = mesh.find_corner(sc.end[0], sc.end[1], (-1, 0))
        up_next.append(by_start[_rotate_to(mesh, back, (1, 0), cw=True)])
        down_next.append(by_start[_rotate_to(mesh, back, (1, 0), cw=False)])

    def cycles(nxt: list) -> list[list[int]]:
        seen: set = set()
        out = []
        for s in range(len(nxt)):
            if s in seen:
                continue
            cyc = []
            x = s
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = nxt[x]
            out.append(cyc)
        return out

    bottoms = cycles(up_next)  # bottom boundary of the cylinder above these SCs
    tops = cycles(down_next)
    top_of = {s: n for n, cyc in enumerate(tops) for s in cyc}
    # SC pieces per triangle, for detecting where a vertical ray meets the top
    seg_by_tri: dict[int, list] = {}
    for n, sc in enumerate(scs):
        for (t, p, q, dist) in sc.pieces:
            seg_by_tri.setdefault(t, []).append((n, p, q, dist))
        if len(sc.pieces) == 1 and sc.start[0] == sc.end[0]:
            # the SC is a triangle edge: register it on the triangle below too
            t, i = sc.start
            t2, k2 = mesh.glue[t][i]
            V2 = mesh.verts(t2)
            seg_by_tri.setdefault(t2, []).append((n, V2[(k2 + 1) % 3], V2[k2], sc.pieces[0][3]))

    def climb(sc_index: int) -> tuple[Any, int, Any]:
        """Height, top SC hit, and offset along it of the vertical from the SC start."""
        c = _rotate_to(mesh, scs[sc_index].start, (0, 1), cw=False)
        u, w = mesh.corner_sector(*c)
        if not in_sector(u, w, (0, 1)):
            raise AssertionError("bad vertical corner")
        steps = 0
        for (t, p, q, off, hit) in mesh.walk(c[0], c[1], (0, 1)):
            best = None
            for (n, a, b, dist) in seg_by_tri.get(t, ()):
                y = a[1]
                if sgn(y - p[1]) <= 0 or sgn(y - q[1]) > 0:
                    continue
                lo, hi = (a[0], b[0]) if sgn(b[0] - a[0]) >= 0 else (b[0], a[0])
                if sgn(p[0] - lo) < 0 or sgn(p[0] - hi) > 0:
                    continue
                if best is None or sgn(y - best[0]) < 0:
                    best = (y, n, dist + (p[0] - a[0]))
            if best is not None and (hit is None or sgn(best[0] - q[1]) < 0):
                h = off[1] + best[0]
                return h, best[1], best[2]
            if hit is not None:
                h = off[1] + q[1]
                back = mesh.find_corner(hit[0], hit[1], (0, -1))
                nxt = _rotate_to(mesh, back, (1, 0), cw=False)
                return h, by_start[nxt], h * 0
            steps += 1
            if steps > budget:
                raise TraceBudgetExceeded("vertical ray did not reach the top boundary", budget=budget)
        raise AssertionError("vertical walk ended early")

    # neighbours: the cylinder below an SC is the one whose top holds it
    bottom_of = {s: n for n, cyc in enumerate(bottoms) for s in cyc}
    cyl_data = []
    for n, cyc in enumerate(bottoms):
        w = sum((scs[s].length for s in cyc[1:]), scs[cyc[0]].length)
        cyl_data.append((n, cyc, w))
    # match each bottom cycle to its top cycle by climbing from any SC
    results = []
    matched_top = {}
    for n, cyc, w in cyl_data:
        h, hit_sc, _ = climb(cyc[0])
        matched_top[n] = top_of[hit_sc]
    top_to_cyl = {v: k for k, v in matched_top.items()}

    def below(s: int) -> int:  # cylinder beneath SC s
        return top_to_cyl[top_of[s]]

    def above(s: int) -> int:
        return bottom_of[s]

    widths = {n: w for n, _, w in cyl_data}
    for n, cyc, w in cyl_data:
        top_cyc = tops[matched_top[n]]
        ref_b = None
        ref_t = None
        common = sorted({below(s) for s in cyc} & {above(s) for s in top_cyc})
        if common:
            nb = common[0]
            ref_b = next(s for s in cyc if below(s) == nb)
            ref_t = next(s for s in top_cyc if above(s) == nb)
        else:
            ref_b = max(cyc, key=lambda s: (float(scs[s].length), -cyc.index(s)))
            ref_t = max(top_cyc, key=lambda s: (float(scs[s].length), -top_cyc.index(s)))
        h, hit_sc, o = climb(ref_b)
        # walk the top cycle leftwards from the hit SC back to the reference
        x = -o
        i = top_cyc.index(hit_sc)
        while top_cyc[i] != ref_t:
            i = (i - 1) % len(top_cyc)
            x = x - scs[top_cyc[i]].length
        results.append(Cylinder(w, h, _reduce_mod(x, w)))
    return results, scs


def periodic_direction_decompose(
    S: TranslationSurface,
    direction: Direction = HORIZONTAL,
    budget: int = DEFAULT_BUDGET,
    on_budget: str = "raise",
    normalize: bool = True,
) -> Union[CylinderDecomposition, NotPeriodic]:
    """Cylinders of a completely periodic direction with exact (w, h, t)."""
    S.require_exact()
    if direction != HORIZONTAL:
        S = apply_sl2(S, direction.to_frame())
    try:
        cyls, scs = horizontal_decomposition(S, budget)
    except TraceBudgetExceeded as exc:
        if on_budget == "raise":
            raise
        return NotPeriodic(direction, tuple(exc.context.get("corner", ())), budget, proven=False)
    total = sum((c.w * c.h for c in cyls[1:]), cyls[0].w * cyls[0].h)
    if total != S.area():
        raise AssertionError(f"cylinder areas {total} do not add up to {S.area()}")
    dec = CylinderDecomposition(direction, cyls, saddle_connections=[Vec2(sc.length, sc.length * 0) for sc in scs])
    if normalize and len(cyls) == 3:
        try:
            dec.normalized = normalize_params(dec)
        except NoSumRelation:
            pass
    return dec


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _lift_twists(w1: Any, w2: Any, w3: Any, t1: Any, t2: Any, t3: Any) -> tuple:
    """Pick lifts ``t_i + k_i w_i`` of the twists that kill the twist equation.

    Twists are only defined modulo the widths. Shifting ``t_i`` by ``k_i w_i``
    moves ``w1 conj(tau1) + w2 conj(tau2)`` by ``sum k_i N(w_i)``, a rational,
    so the equation holds for some lift iff its value lies in the lattice
    spanned by the norms. Returns the twists unchanged when no lift works.
    """
    w1, w2, w3, t1, t2, t3 = (_q(x) for x in (w1, w2, w3, t1, t2, t3))
    e = w1 * (t1 + t3).conj() + w2 * (t2 + t3).conj()
    if not e.is_rational() or e.sign() == 0:
        return t1, t2, t3
    norms = [w.norm() for w in (w1, w2, w3)]
    target = -e.a
    den = 1
    for f in norms + [target]:
        den = den * f.denominator // math.gcd(den, f.denominator)
    a1, a2, a3 = (int(f * den) for f in norms)
    b = int(target * den)
    g12, x, y = _egcd(a1, a2)
    g, u, v = _egcd(g12, a3)
    if g == 0 or b % g:
        return t1, t2, t3
    m = b // g
    k1, k2, k3 = u * x * m, u * y * m, v * m
    return t1 + k1 * w1, t2 + k2 * w2, t3 + k3 * w3


def normalize_params(dec: Union[CylinderDecomposition, list], lift_twists: bool = True) -> NormalizedParams:
    """Number three cylinders so that ``w3 = w1 + w2`` and form (s_i, tau_i, m).

    With ``lift_twists`` the twist representatives (defined mod w_i) are
    chosen to satisfy the twist equation when any choice does.
    """
    cyls = dec.cylinders if isinstance(dec, CylinderDecomposition) else list(dec)
    if len(cyls) != 3:
        raise WrongCylinderCount("need exactly three cylinders", count=len(cyls))
    best = None
    for perm in itertools.permutations(range(3)):
        c1, c2, c3 = (cyls[i] for i in perm)
        if sgn(c3.w - c1.w - c2.w) != 0:
            continue
        vals = [x for c in (c1, c2, c3) for x in (c.w, c.h, c.t)]
        if all(isinstance(x, float) for x in vals):
            key = tuple(vals) + perm
        else:
            key = tuple(_q(x).a for x in vals) + tuple(_q(x).b for x in vals) + perm
        if best is None or key < best[0]:
            best = (key, perm)
    if best is None:
        raise NoSumRelation("no width is the sum of the other two", widths=[str(c.w) for c in cyls])
    perm = best[1]
    c1, c2, c3 = (cyls[i] for i in perm)
    s1, s2 = c1.h + c3.h, c2.h + c3.h
    t1, t2, t3 = c1.t, c2.t, c3.t
    if lift_twists:
        t1, t2, t3 = _lift_twists(c1.w, c2.w, c3.w, t1, t2, t3)
    tau1, tau2 = t1 + t3, t2 + t3
    m = c1.w * s1 + c2.w * s2
    return NormalizedParams(c1.w, c2.w, c3.w, s1, s2, tau1, tau2, m, tuple(perm))


@dataclass(frozen=True)
class LmVerdict:
    member: bool
    m: Any
    violated: Optional[int] = None  # 1 or 2
    residual: Any = None

    def __str__(self) -> str:
        if self.member:
            return f"member(m={self.m})"
        return f"violated(eq{self.violated}, residual={self.residual})"

    def to_json(self) -> dict:
        out: dict = {"verdict": "member" if self.member else f"violated(eq{self.violated})", "m": _q(self.m).to_json()}
        if not self.member:
            out["equation"] = self.violated
            out["residual"] = _q(self.residual).to_json()
        return out


def check_lm(np_: NormalizedParams) -> LmVerdict:
    """Evaluate the three eigenform equations exactly."""
    vals = [_q(getattr(np_, k)) for k in ("w1", "w2", "s1", "s2", "tau1", "tau2")]
    d = field_of(*vals)  # raises MixedField on disagreement
    w1, w2, s1, s2, t1, t2 = (v.in_field(d) for v in vals)
    eq1 = w1 * s1.conj() + w2 * s2.conj()
    eq2 = w1 * t1.conj() + w2 * t2.conj()
    m = w1 * s1 + w2 * s2
    if eq1.sign() != 0:
        return LmVerdict(False, m, 1, eq1)
    if eq2.sign() != 0:
        return LmVerdict(False, m, 2, eq2)
    return LmVerdict(True, m)


def check_lm_surface(S: TranslationSurface, direction: Direction = HORIZONTAL) -> LmVerdict:
    dec = periodic_direction_decompose(S, direction)
    if isinstance(dec, NotPeriodic):
        raise TraceBudgetExceeded("direction is not periodic", direction=str(direction))
    return check_lm(normalize_params(dec))


@dataclass
class ProbeReport:
    bound: Any
    directions: list  # (Direction, "periodic" | "not_periodic", n_cylinders)

    @property
    def non_closing(self) -> list:
        return [d for d, status, _ in self.directions if status != "periodic"]

    @property
    def all_periodic(self) -> bool:
        return not self.non_closing

    def to_json(self) -> dict:
        return {
            "bound": str(self.bound),
            "directions": [
                {"direction": [str(c) for c in d.v], "status": st, "cylinders": n} for d, st, n in self.directions
            ],
            "all_periodic": self.all_periodic,
        }


def periodicity_probe(S: TranslationSurface, L: Any, budget: int = 20000) -> ProbeReport:
    """Decompose every saddle-connection direction up to length ``L``.

    A finite probe: a non-closing direction only means a separatrix exceeded
    ``budget`` crossings.
    """
    from .saddles import enumerate_saddle_connections

    S.require_exact()
    dirs: dict = {}
    for sc in enumerate_saddle_connections(S, L):
        d = Direction.of(*sc.holonomy)
        # identify opposite directions: decomposing v and -v is the same question
        lead = d.v[0] if d.v[0].sign() != 0 else d.v[1]
        key = d if lead.sign() > 0 else Direction.of(-d.v[0], -d.v[1])
        dirs.setdefault(key, None)
    out = []
    for d in sorted(dirs, key=lambda x: math.atan2(float(x.v[1]), float(x.v[0]))):
        r = periodic_direction_decompose(S, d, budget=budget, on_budget="report", normalize=False)
        if isinstance(r, NotPeriodic):
            out.append((d, "not_periodic", 0))
        else:
            out.append((d, "periodic", len(r.cylinders)))
    return ProbeReport(L, out)
