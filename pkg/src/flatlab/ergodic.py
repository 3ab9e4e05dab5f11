"""Horocycle and rel orbits, the averaging operators A_U and A_UX, and equidistribution runs.

Orbit surfaces stay exact: every time and rel parameter on a quadrature grid
is a rational number, and the orbit is advanced by exact shears followed by
Delaunay flips. Only observable values and averages are floats.

Quadrature is the composite midpoint rule. The error estimate comes from
step halving: with ``A_h`` and ``A_{h/2}`` the two midpoint sums, the
reported value is ``A_{h/2}`` and the estimate is ``|A_h - A_{h/2}| / 3``.
A single chain with step ``h/4`` visits the midpoints of both grids.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Any, Callable, Optional, Sequence

from .canonical import canonical_mesh
from .errors import CollisionBeyondBoundary, FlatlabError, RelDegeneration, WrongStratum
from .exactfield import QuadNum
from .mesh import Mesh, sgn
from .rel import DegenerationReport, rel_translate
from .surface import TranslationSurface, apply_sl2, u_matrix

DEFAULT_SYSTOLE_CAP = 1.0
RENORM_EVERY = 16


def exact_param(x: Any) -> Any:
    """Turn a user-facing number into an exact rational (floats via their decimal text)."""
    if isinstance(x, (QuadNum, Fraction, int)):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(str(x))


# -- observables ------------------------------------------------------------------------


@dataclass(frozen=True)
class Observable:
    name: str
    eval: Callable[[TranslationSurface], float]
    lipschitz_hint: Optional[float] = None
    mesh_eval: Optional[Callable[[Mesh], float]] = None
    constant: Optional[float] = None

    def __call__(self, S: TranslationSurface) -> float:
        return self.eval(S)

    def on_mesh(self, mesh: Mesh) -> float:
        """Value on a Delaunay mesh (fast path when available)."""
        if self.mesh_eval is not None:
            return self.mesh_eval(mesh)
        return self.eval(TranslationSurface.from_mesh(mesh))


def _delaunay(S: TranslationSurface) -> Mesh:
    m = S.mesh.copy()
    m.make_delaunay()
    return m


def _mesh_systole(mesh: Mesh) -> float:
    # the shortest saddle connection is an edge of every Delaunay triangulation
    best = math.inf
    for row in mesh.vec:
        for x, y in row:
            n2 = float(x * x + y * y)
            if n2 < best:
                best = n2
    return math.sqrt(best)


def _truncated(cap: float, mesh: Mesh) -> float:
    return min(_mesh_systole(mesh), cap)


def _truncated_surface(cap: float, S: TranslationSurface) -> float:
    return _truncated(cap, _delaunay(S))


def _const(c: float, _: Any) -> float:
    return c


def _sc_count(L: Any, S: TranslationSurface) -> float:
    from .saddles import enumerate_saddle_connections

    return float(len(enumerate_saddle_connections(S, L)))


def _bump(r: float) -> float:
    return math.exp(1.0 - 1.0 / (1.0 - r * r)) if r < 1.0 else 0.0


def _sc_bump(L: Any, S: TranslationSurface) -> float:
    from .saddles import enumerate_saddle_connections

    Lf = float(L)
    return math.fsum(_bump(math.sqrt(float(s.holonomy[0] ** 2 + s.holonomy[1] ** 2)) / Lf)
                     for s in enumerate_saddle_connections(S, L))


def _hi_width(cap: float, bound: Any, S: TranslationSurface) -> float:
    from .saddles import horizontal_interval

    iv = horizontal_interval(S, bound)
    if iv.left is None or iv.right is None:
        return cap
    return min(float(iv.right - iv.left), cap)


def constant_observable(c: float) -> Observable:
    return Observable(f"constant({c})", partial(_const, c), 0.0, partial(_const, c), constant=c)


def systole_observable(cap: float = DEFAULT_SYSTOLE_CAP) -> Observable:
    """``min(systole, cap)``."""
    return Observable(f"systole({cap})", partial(_truncated_surface, cap), None, partial(_truncated, cap))


def sc_count_observable(L: Any = 2) -> Observable:
    """Number of oriented saddle connections of length at most ``L``."""
    return Observable(f"sc_count({L})", partial(_sc_count, exact_param(L)))


def sc_bump_observable(L: Any = 2) -> Observable:
    """Sum of a smooth compactly supported bump of ``|hol| / L`` over saddle connections.

    Smooth along orbits, which makes it the test integrand for convergence order.
    """
    return Observable(f"sc_bump({L})", partial(_sc_bump, exact_param(L)))


def hi_width_observable(cap: float = 10.0, bound: Any = 100) -> Observable:
    """Width of the horizontal rel interval, truncated at ``cap``."""
    return Observable(f"hi_width({cap})", partial(_hi_width, cap, exact_param(bound)))


OBSERVABLES: dict[str, Callable[..., Observable]] = {
    "systole": systole_observable,
    "sc_count": sc_count_observable,
    "sc_bump": sc_bump_observable,
    "hi_width": hi_width_observable,
    "constant": constant_observable,
}


def make_observable(name: str, **params: Any) -> Observable:
    try:
        factory = OBSERVABLES[name]
    except KeyError:
        raise ValueError(f"unknown observable {name!r}; choose from {sorted(OBSERVABLES)}") from None
    return factory(**params)


# -- orbits ----------------------------------------------------------------------------------


def flow_u(S: TranslationSurface, t: Any) -> TranslationSurface:
    """``u^t S`` in canonical Delaunay form."""
    from .io import cached_canonical

    S.require_exact()
    return cached_canonical(apply_sl2(S, u_matrix(exact_param(t))))


class _UOrbit:
    """Exact u-orbit on a Delaunay mesh; full canonical relabeling on the renormalization cadence."""

    def __init__(self, S: TranslationSurface) -> None:
        S.require_exact()
        self.mesh = _delaunay(S)
        self.renormalizations = 0
        self._since = 0

    def shear(self, h: Any) -> None:
        if h == 0:
            return
        m = self.mesh
        m.vec = [[(x + h * y, y) for (x, y) in row] for row in m.vec]
        m.make_delaunay()
        self._since += 1
        if abs(h) > 1 or self._since >= RENORM_EVERY:
            self.mesh, _ = canonical_mesh(m)
            self.renormalizations += 1
            self._since = 0


def _mean(vals: Sequence[float]) -> float:
    # shifting by the first sample keeps constant sequences exact
    if not vals:
        return math.nan
    c0 = vals[0]
    return c0 + math.fsum(v - c0 for v in vals) / len(vals)


@dataclass
class AverageResult:
    value: float
    err_estimate: float
    coarse: float
    n_steps: int
    renormalizations: int = 0
    samples: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "err_estimate": self.err_estimate,
            "coarse": self.coarse,
            "n_steps": self.n_steps,
            "renormalizations": self.renormalizations,
        }


def _grid(T: Any, dt: Any) -> tuple[int, Any]:
    T = exact_param(T)
    dt = exact_param(dt)
    if T <= 0 or dt <= 0:
        raise ValueError("T and dt must be positive")
    n = max(1, math.ceil(T / dt))
    return n, Fraction(T) / n if not isinstance(T, QuadNum) else T / n


def orbit_samples(obs: Observable, S: TranslationSurface, T: Any, dt: Any) -> tuple[list, list, int]:
    """Observable values at the midpoints of the ``h`` and ``h/2`` grids on ``[0, T]``.

    Returns ``(coarse, fine, renormalizations)``.
    """
    n, h = _grid(T, dt)
    q = h / 4
    orb = _UOrbit(S)
    coarse: list[float] = []
    fine: list[float] = []
    for k in range(1, 4 * n):
        orb.shear(q)
        if k % 2 == 1:
            fine.append(obs.on_mesh(orb.mesh))
        elif k % 4 == 2:
            coarse.append(obs.on_mesh(orb.mesh))
    return coarse, fine, orb.renormalizations


def average_A_U(obs: Observable, S: TranslationSurface, T: Any, dt: Any) -> AverageResult:
    """``(1/T) * integral_0^T obs(u^t S) dt`` by composite midpoint with step halving."""
    n, _ = _grid(T, dt)
    if obs.constant is not None:
        return AverageResult(obs.constant, 0.0, obs.constant, n)
    coarse, fine, ren = orbit_samples(obs, S, T, dt)
    a, b = _mean(coarse), _mean(fine)
    return AverageResult(b, abs(a - b) / 3, a, n, ren)


def _rational_sqrt(T: Any) -> Fraction:
    T = Fraction(exact_param(T))
    rn, rd = math.isqrt(T.numerator), math.isqrt(T.denominator)
    if rn * rn == T.numerator and rd * rd == T.denominator:
        return Fraction(rn, rd)
    return Fraction(math.sqrt(T)).limit_denominator(10**6)


def _rel_range_check(S: TranslationSurface, s_max: Any) -> None:
    from .saddles import hc_membership

    hc = hc_membership(S, bound=Fraction(math.ceil(s_max)) + 1)
    iv = hc.interval
    if iv is not None and iv.right is not None and sgn(iv.right - s_max) <= 0:
        raise RelDegeneration(
            "horizontal rel leaves H(1,1) inside the averaging range",
            s=str(iv.right),
            hc=hc.to_json(),
        )


def rel_slices(S: TranslationSurface, points: Sequence[Any]) -> list[TranslationSurface]:
    """``x^s S`` for increasing ``s`` by chaining exact rel moves of cone class 0."""
    out = []
    cur = S
    last: Any = Fraction(0)
    for s in points:
        step = s - last
        if step != 0:
            try:
                res = rel_translate(cur, (step, 0), 0)
            except (CollisionBeyondBoundary, WrongStratum) as exc:
                raise RelDegeneration("horizontal rel move failed", s=str(s), cause=exc.code) from exc
            if isinstance(res, DegenerationReport):
                raise RelDegeneration("horizontal rel move degenerates", s=str(s), kind=res.kind)
            cur = res
        out.append(cur)
        last = s
    return out


def _au_task(args: tuple) -> AverageResult:
    obs, S, T, dt = args
    return average_A_U(obs, S, T, dt)


def _map(fn: Callable, items: list, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


@dataclass
class UXResult:
    value: float
    err_estimate: float
    err_s: float
    err_t: float
    s_max: Fraction
    slices: list  # (s, AverageResult) on the fine s-grid
    coarse_slices: list
    renormalizations: int

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "err_estimate": self.err_estimate,
            "err_s": self.err_s,
            "err_t": self.err_t,
            "s_max": str(self.s_max),
            "slices": [[str(s), r.to_json()] for s, r in self.slices],
            "renormalizations": self.renormalizations,
        }


def average_A_UX(
    obs: Observable, S: TranslationSurface, T: Any, dt: Any, ds: Any, workers: int = 1
) -> UXResult:
    """``T^{-3/2} * integral_0^{sqrt T} integral_0^T obs(u^t x^s S) dt ds``.

    The s-range uses an exact rational ``sqrt T`` when ``T`` is a rational
    square, otherwise a rational approximation with denominator below 10^6.
    """
    s_max = _rational_sqrt(T)
    n_s, hs = _grid(s_max, ds)
    if obs.constant is not None:
        c = obs.constant
        r = AverageResult(c, 0.0, c, 0)
        return UXResult(c, 0.0, 0.0, 0.0, s_max, [(Fraction(0), r)], [], 0)
    _rel_range_check(S, s_max)
    q = hs / 4
    pts = [k * q for k in range(1, 4 * n_s)]
    surfaces = rel_slices(S, pts)
    fine_idx = [i for i, k in enumerate(range(1, 4 * n_s)) if k % 2 == 1]
    coarse_idx = [i for i, k in enumerate(range(1, 4 * n_s)) if k % 4 == 2]
    wanted = fine_idx + coarse_idx
    results = _map(_au_task, [(obs, surfaces[i], T, dt) for i in wanted], workers)
    by_idx = dict(zip(wanted, results))
    fine = [(pts[i], by_idx[i]) for i in fine_idx]
    coarse = [(pts[i], by_idx[i]) for i in coarse_idx]
    vf = _mean([r.value for _, r in fine])
    vc = _mean([r.value for _, r in coarse])
    err_s = abs(vf - vc) / 3
    err_t = _mean([r.err_estimate for _, r in fine])
    ren = sum(r.renormalizations for r in results)
    return UXResult(vf, err_s + err_t, err_s, err_t, s_max, fine, coarse, ren)


def recurrence_profile(S: TranslationSurface, eps: float, T: Any, dt: Any) -> float:
    """Fraction of midpoint times ``t`` in ``[0, T]`` where the systole of ``u^t S`` is at least ``eps``."""
    n, h = _grid(T, dt)
    orb = _UOrbit(S)
    orb.shear(h / 2)
    hits = 0
    for j in range(n):
        if j:
            orb.shear(h)
        if _mesh_systole(orb.mesh) >= eps:
            hits += 1
    return hits / n


def systole_profile(S: TranslationSurface, T: Any, dt: Any) -> list[float]:
    """Systole at the midpoint times; thresholding it gives recurrence fractions for many ``eps``."""
    n, h = _grid(T, dt)
    orb = _UOrbit(S)
    orb.shear(h / 2)
    out = []
    for j in range(n):
        if j:
            orb.shear(h)
        out.append(_mesh_systole(orb.mesh))
    return out


# -- experiments --------------------------------------------------------------------------------


@dataclass
class ErgodicRun:
    surface_ref: str
    observable: str
    T_schedule: list
    dt: list
    ds: list
    results: list  # per-T value or None when the cell failed
    err_estimates: list
    status: list  # "ok" or an error code per T
    renormalizations: int = 0
    wall_time: float = 0.0

    def __post_init__(self) -> None:
        if any(b <= a for a, b in zip(self.T_schedule, self.T_schedule[1:])):
            raise ValueError("T_schedule must be strictly increasing")
        if len(self.results) != len(self.T_schedule):
            raise ValueError("one result per scheduled T")

    def increments(self) -> list:
        r = self.results
        return [None if a is None or b is None else abs(b - a) for a, b in zip(r, r[1:])]

    def to_json(self) -> dict:
        return {
            "surface_ref": self.surface_ref,
            "observable": self.observable,
            "T_schedule": [str(t) for t in self.T_schedule],
            "dt": [str(x) for x in self.dt],
            "ds": [str(x) for x in self.ds],
            "results": self.results,
            "err_estimates": self.err_estimates,
            "status": self.status,
            "increments": self.increments(),
            "renormalizations": self.renormalizations,
            "wall_time": self.wall_time,
        }


@dataclass
class EquidistributionTable:
    runs: list
    spread: list  # per T: max - min over surfaces with a value
    monotone: list  # per run: Cauchy increments strictly decreasing

    def to_json(self) -> dict:
        return {
            "runs": [r.to_json() for r in self.runs],
            "spread": self.spread,
            "monotone_increments": self.monotone,
        }


def _cell(args: tuple) -> tuple:
    obs, S, T, dt, ds = args
    t0 = time.perf_counter()
    try:
        r = average_A_UX(obs, S, T, dt, ds)
        return r.value, r.err_estimate, "ok", r.renormalizations, time.perf_counter() - t0
    except FlatlabError as exc:
        return None, None, exc.code, 0, time.perf_counter() - t0


def equidistribution_experiment(
    surfaces: Sequence[tuple[str, TranslationSurface]],
    obs: Observable,
    T_schedule: Sequence[Any],
    n_t: int = 64,
    n_s: int = 2,
    workers: int = 1,
) -> EquidistributionTable:
    """``A_UX`` for every (surface, T) on grids with ``n_t`` time steps and ``n_s`` rel steps.

    Degenerations are recorded per cell and do not stop the run.
    """
    Ts = [exact_param(T) for T in T_schedule]
    for _, S in surfaces:
        S.require_exact()
        if len(S.cone_data()) != 2 or S.genus() != 2:
            raise WrongStratum("equidistribution runs need surfaces in H(1,1)", label=S.label)
    steps = [(Fraction(T) / n_t, _rational_sqrt(T) / n_s) for T in Ts]
    cells = [(obs, S, T, dt, ds) for _, S in surfaces for T, (dt, ds) in zip(Ts, steps)]
    out = _map(_cell, cells, workers)
    runs = []
    k = 0
    for ref, _ in surfaces:
        chunk = out[k : k + len(Ts)]
        k += len(Ts)
        runs.append(
            ErgodicRun(
                ref,
                obs.name,
                Ts,
                [s[0] for s in steps],
                [s[1] for s in steps],
                [c[0] for c in chunk],
                [c[1] for c in chunk],
                [c[2] for c in chunk],
                sum(c[3] for c in chunk),
                sum(c[4] for c in chunk),
            )
        )
    spread = []
    for j in range(len(Ts)):
        vals = [r.results[j] for r in runs if r.results[j] is not None]
        spread.append(max(vals) - min(vals) if vals else None)
    monotone = []
    for r in runs:
        inc = r.increments()
        monotone.append(None not in inc and all(b < a for a, b in zip(inc, inc[1:])))
    return EquidistributionTable(runs, spread, monotone)
