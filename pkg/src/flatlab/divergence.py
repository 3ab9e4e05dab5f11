"""Matrix algebra of SL(2,R) x R^2 inside SL(3,R) and the transverse-divergence limits.

A pair ``(g, (x, y))`` is stored as the 3x3 matrix

    [[a, b, a x + b y],
     [c, d, c x + d y],
     [0, 0, 1        ]]

i.e. the product ``g . x^x . y^y`` of the linear part with the two
translation subgroups. Entries are Fractions (exact backend) or floats.

For a sequence ``g_k x_k y_k -> I`` with ``c_k y_k != 0`` the conjugated
product ``u^{f(g,t)} g x y u^{-t}`` has a vanishing (0,1) entry, and with
``t = min(delta/|c|, delta/|y|)`` it accumulates in ``A X``. We record an
accumulation point by the coordinates ``(s, X)`` with ``s = log`` of the
(0,0) entry and ``X`` the (0,2) entry.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Optional

from .errors import BothZero, CaseUndetermined, NotUnimodular, PoleAtT

Matrix = tuple  # 3 rows of 3 entries


def _exact(*xs: Any) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in xs)


class GroupElement3:
    __slots__ = ("m",)

    def __init__(self, rows: Iterable[Iterable[Any]]) -> None:
        m = tuple(tuple(r) for r in rows)
        if len(m) != 3 or any(len(r) != 3 for r in m):
            raise ValueError("need a 3x3 matrix")
        if m[2] != (0, 0, 1):
            raise ValueError("bottom row must be (0, 0, 1)")
        self.m = m

    def __getitem__(self, ij: tuple[int, int]) -> Any:
        return self.m[ij[0]][ij[1]]

    def __matmul__(self, other: GroupElement3) -> GroupElement3:
        A, B = self.m, other.m
        rows = [[sum((A[i][k] * B[k][j] for k in range(1, 3)), A[i][0] * B[0][j]) for j in range(3)] for i in range(2)]
        return GroupElement3(rows + [(0, 0, 1)])

    __mul__ = __matmul__

    def inverse(self) -> GroupElement3:
        (a, b, p), (c, d, q), _ = self.m
        det = a * d - b * c
        ia, ib, ic, id_ = d / det, -b / det, -c / det, a / det
        return GroupElement3([(ia, ib, -(ia * p + ib * q)), (ic, id_, -(ic * p + id_ * q)), (0, 0, 1)])

    def det2(self) -> Any:
        (a, b, _), (c, d, _), _ = self.m
        return a * d - b * c

    def linear(self) -> tuple:
        return ((self.m[0][0], self.m[0][1]), (self.m[1][0], self.m[1][1]))

    def translation(self) -> tuple:
        return (self.m[0][2], self.m[1][2])

    def max_dev(self, other: GroupElement3) -> float:
        return max(abs(float(self.m[i][j]) - float(other.m[i][j])) for i in range(2) for j in range(3))

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, GroupElement3) and self.m == other.m

    def __hash__(self) -> int:
        return hash(self.m)

    def __repr__(self) -> str:
        return f"GroupElement3({[list(r) for r in self.m[:2]]})"


def identity3() -> GroupElement3:
    return GroupElement3([(1, 0, 0), (0, 1, 0), (0, 0, 1)])


def u_elem(t: Any) -> GroupElement3:
    return GroupElement3([(1, t, 0), (0, 1, 0), (0, 0, 1)])


def v_elem(t: Any) -> GroupElement3:
    """Lower-triangular unipotent."""
    return GroupElement3([(1, 0, 0), (t, 1, 0), (0, 0, 1)])


def a_elem(tau: Any = None, exp_tau: Any = None) -> GroupElement3:
    """``diag(e^tau, e^-tau, 1)``; pass ``exp_tau`` for an exact rational ``e^tau``."""
    lam = exp_tau if exp_tau is not None else math.exp(tau)
    return GroupElement3([(lam, 0, 0), (0, 1 / lam if not _exact(lam) else Fraction(1) / lam, 0), (0, 0, 1)])


def x_elem(s: Any) -> GroupElement3:
    return GroupElement3([(1, 0, s), (0, 1, 0), (0, 0, 1)])


def y_elem(r: Any) -> GroupElement3:
    return GroupElement3([(1, 0, 0), (0, 1, r), (0, 0, 1)])


def _check_det(g: Any) -> None:
    (a, b), (c, d) = g
    det = a * d - b * c
    if _exact(a, b, c, d):
        if det != 1:
            raise NotUnimodular("determinant is not 1", det=str(det))
    elif abs(det - 1) > 1e-12:
        raise NotUnimodular("determinant is not 1", det=float(det))


def embed(g: Any, x: Any, y: Any) -> GroupElement3:
    """The element ``g . x^x . y^y``."""
    _check_det(g)
    (a, b), (c, d) = g
    return GroupElement3([(a, b, a * x + b * y), (c, d, c * x + d * y), (0, 0, 1)])


def f_of(g: Any, t: Any) -> Any:
    """``(t a - b) / (d - t c)``."""
    (a, b), (c, d) = g
    den = d - t * c
    if den == 0:
        raise PoleAtT("d - t c vanishes", t=t)
    return (t * a - b) / den


def conjugated_product(g: Any, x: Any, y: Any, t: Any) -> GroupElement3:
    """``u^{f(g,t)} . (g x y) . u^{-t}``; its (0,1) entry cancels."""
    f = f_of(g, t)
    return u_elem(f) @ embed(g, x, y) @ u_elem(-t)


def t_k_rule(c: Any, y: Any, delta: Any) -> Any:
    """``min(delta/|c|, delta/|y|)`` with ``delta/0 = +inf``."""
    if c == 0 and y == 0:
        raise BothZero("c and y are both zero")
    if c == 0:
        return delta / abs(y)
    if y == 0:
        return delta / abs(c)
    return min(delta / abs(c), delta / abs(y))


# -- limit regions -------------------------------------------------------------------


@dataclass(frozen=True)
class LimitRegion:
    case: str  # "A" (|y| <= |c|) or "B" (|c| <= |y|)
    delta: float

    @property
    def description(self) -> str:
        d = self.delta
        if self.case == "A":
            return f"a^(-log(1+-{d})) x^[-{d}/(1-{d}), {d}/(1-{d})]"
        return f"a^[-log(1+{d}), -log(1-{d})] (x^[-{d}/(1-{d}), -{d}/(1+{d})] u x^[{d}/(1+{d}), {d}/(1-{d})])"

    def distance(self, s: float, X: float) -> float:
        d = self.delta
        hi = d / (1 - d)
        if self.case == "A":
            ds = min(abs(s + math.log(1 + d)), abs(s + math.log(1 - d)))
            dx = max(0.0, abs(X) - hi)
            return math.hypot(ds, dx)
        s_lo, s_hi = -math.log(1 + d), -math.log(1 - d)
        ds = max(0.0, s_lo - s, s - s_hi)
        lo = d / (1 + d)
        ax = abs(X)
        dx = max(0.0, lo - ax, ax - hi)
        return math.hypot(ds, dx)


Term = tuple  # (g, x, y)


@dataclass
class DivergenceSequence:
    """``term(k) -> (g_k, x_k, y_k)`` together with ``delta``."""

    term: Callable[[int], Term]
    delta: Any
    name: str = "custom"

    def case_at(self, k: int) -> str:
        g, x, y = self.term(k)
        c = g[1][0]
        if c * y == 0:
            raise CaseUndetermined("c_k y_k vanishes", k=k)
        return "A" if abs(y) <= abs(c) else "B"


@dataclass
class LimitReport:
    case: str
    accumulation_point: tuple  # (s, X)
    distance_to_region: float
    cauchy: list  # successive distances between sampled points
    residuals: dict  # |c_K|, |y-part_K|, |(0,1) entry| at K
    passed: bool
    rows: list = field(default_factory=list)  # (k, s, X, distance)


def _point(seq: DivergenceSequence, k: int) -> tuple[float, float, GroupElement3, Any]:
    g, x, y = seq.term(k)
    c = g[1][0]
    t = t_k_rule(c, y, seq.delta)
    p = conjugated_product(g, x, y, t)
    s = math.log(float(p[0, 0]))
    return s, float(p[0, 2]), p, c


def limit_region_check(
    seq: DivergenceSequence,
    K: int = 10**6,
    tol: float = 1e-3,
    sample_ks: Optional[list[int]] = None,
) -> LimitReport:
    """Estimate the accumulation point at ``K`` and measure its distance to the region.

    Convergence is judged on the geometric subsequence ``K/16, K/4, K``:
    successive gaps must shrink at least twofold.
    """
    ks = [max(1, K // 16), max(1, K // 4), K]
    cases = {seq.case_at(k) for k in ks}
    if len(cases) != 1:
        raise CaseUndetermined("sequence switches between |y|<=|c| and |c|<=|y|", ks=ks)
    case = cases.pop()
    region = LimitRegion(case, float(seq.delta))
    pts = [_point(seq, k) for k in ks]
    gaps = [math.hypot(pts[i + 1][0] - pts[i][0], pts[i + 1][1] - pts[i][1]) for i in range(2)]
    s, X, p, c = pts[-1]
    dist = region.distance(s, X)
    residuals = {"c": abs(float(c)), "y_part": abs(float(p[1, 2])), "entry01": abs(float(p[0, 1]))}
    cauchy_ok = gaps[1] <= gaps[0] / 2 or gaps[0] == 0.0
    small = residuals["c"] < tol and residuals["y_part"] < tol
    rows = []
    for k in sorted(set((sample_ks or []) + ks)):
        sk, Xk, _, _ = _point(seq, k)
        rows.append((k, sk, Xk, region.distance(sk, Xk)))
    return LimitReport(case, (s, X), dist, gaps, residuals, bool(dist < tol and cauchy_ok and small), rows)


# -- built-in families ------------------------------------------------------------------


def family_example_a(delta: Any = Fraction(1, 10)) -> DivergenceSequence:
    """``g_k = (1,0;1/k,1), x_k = 0, y_k = 1/k^2``."""
    return DivergenceSequence(
        lambda k: (((1, 0), (Fraction(1, k), 1)), 0, Fraction(1, k * k)), delta, "caseA"
    )


def family_example_b(delta: Any = Fraction(1, 10)) -> DivergenceSequence:
    """``g_k = (1,0;1/k^2,1), x_k = 0, y_k = 1/k``."""
    return DivergenceSequence(
        lambda k: (((1, 0), (Fraction(1, k * k), 1)), 0, Fraction(1, k)), delta, "caseB"
    )


def random_family(rng: random.Random, case: str, delta: float = 0.1, exact: bool = False) -> DivergenceSequence:
    """``g_k = [[1+al/k, be/k], [ga/k^p, d_k]]``, ``x_k = xi/k``, ``y_k = eta/k^p``.

    ``d_k`` is fixed by det = 1; case A draws ``|eta| <= |ga|``, case B the reverse.
    """
    p = rng.choice([1, 2])

    def nz() -> float:
        v = rng.uniform(0.2, 2.0)
        return v if rng.random() < 0.5 else -v

    al, be, xi = rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)
    big, small = nz(), nz()
    if abs(small) > abs(big):
        big, small = small, big
    ga, eta = (big, small) if case == "A" else (small, big)
    if exact:
        al, be, xi, ga, eta = (Fraction(v).limit_denominator(1000) for v in (al, be, xi, ga, eta))
        delta = Fraction(delta).limit_denominator(1000)

    def term(k: int) -> Term:
        kp = k**p
        a = 1 + al / k
        b = be / k
        c = ga / kp
        d = (1 + b * c) / a
        return (((a, b), (c, d)), xi / k, eta / kp)

    return DivergenceSequence(term, delta, f"random{case}")


# -- rescaling identities ------------------------------------------------------------------


@dataclass
class RescaleReport:
    ok: bool
    max_deviation: float
    exact: bool


def rescale_identity_check(
    tau: Any = None, t: Any = 0, s: Any = 0, r: Any = 0, exp_tau: Any = None, tol: float = 1e-12
) -> RescaleReport:
    """Check the conjugation laws of ``a^tau`` on U, X, Y and V.

    ``a^tau u^t x^s a^-tau = u^{t e^{2tau}} x^{s e^tau}``,
    ``a^tau y^r a^-tau = y^{r e^-tau}`` and ``a^tau v^r a^-tau = v^{r e^-2tau}``.
    With an exact rational ``exp_tau`` the comparison is exact equality.
    """
    lam = exp_tau if exp_tau is not None else math.exp(tau)
    exact = _exact(lam, t, s, r)
    A = a_elem(exp_tau=lam)
    Ai = A.inverse()
    inv = (Fraction(1) / lam) if exact else 1 / lam
    pairs = [
        (A @ u_elem(t) @ x_elem(s) @ Ai, u_elem(t * lam * lam) @ x_elem(s * lam)),
        (A @ y_elem(r) @ Ai, y_elem(r * inv)),
        (A @ v_elem(r) @ Ai, v_elem(r * inv * inv)),
    ]
    if exact:
        return RescaleReport(all(p == q for p, q in pairs), 0.0 if all(p == q for p, q in pairs) else math.inf, True)
    dev = 0.0
    for p, q in pairs:
        scale = max(1.0, max(abs(float(v)) for row in q.m[:2] for v in row))
        dev = max(dev, p.max_dev(q) / scale)
    return RescaleReport(dev < tol, dev, False)


def semidirect_compose(g1: Any, v1: tuple, g2: Any, v2: tuple) -> tuple:
    """``(g1, v1) * (g2, v2)`` for the element ``g . x^vx . y^vy`` = affine map ``p -> g(p + v)``."""
    (a, b), (c, d) = g2
    # g1 (g2 (p + v2) + v1) = g1 g2 (p + v2 + g2^{-1} v1)
    det = a * d - b * c
    ia, ib, ic, id_ = d / det, -b / det, -c / det, a / det
    w = (v2[0] + ia * v1[0] + ib * v1[1], v2[1] + ic * v1[0] + id_ * v1[1])
    g = _mul2(g1, g2)
    return g, w


def _mul2(A: Any, B: Any) -> tuple:
    return (
        (A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
        (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]),
    )
