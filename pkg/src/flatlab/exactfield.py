r"""Exact arithmetic in real quadratic fields :math:`\mathbb{Q}(\sqrt{d})`.

A :class:`QuadNum` is stored as three integers ``(p, q, r)`` meaning
``(p + q*sqrt(d)) / r`` with ``r > 0`` and ``gcd(p, q, r) = 1``, which keeps
the hot paths (addition, multiplication, sign) on machine-friendly ints.

``d = 1`` marks a plain rational: it mixes with any field and adopts the
other operand's ``d``. Two genuine fields with different ``d`` never mix.

EXAMPLES::

    >>> r2 = QuadNum(0, 1, 2)
    >>> (1 + r2) * (1 - r2)
    QuadNum(-1, 0, d=2)
    >>> (7 - 5 * r2).sign()
    -1
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational as _Rational
from typing import Any, Union

from .errors import DivisionByZero, FieldError, MixedField

Number = Union[int, Fraction, "QuadNum"]

_SQUAREFREE_CACHE: dict[int, bool] = {}


def is_squarefree(n: int) -> bool:
    if n in _SQUAREFREE_CACHE:
        return _SQUAREFREE_CACHE[n]
    ok = n >= 1
    k = 2
    m = n
    while ok and k * k <= m:
        if m % (k * k) == 0:
            ok = False
        if m % k == 0:
            m //= k
        k += 1
    _SQUAREFREE_CACHE[n] = ok
    return ok


def _join_d(d1: int, d2: int) -> int:
    if d1 == d2 or d2 == 1:
        return d1
    if d1 == 1:
        return d2
    raise MixedField(f"cannot combine Q(sqrt({d1})) with Q(sqrt({d2}))", d1=d1, d2=d2)


class QuadNum:
    """Element ``a + b*sqrt(d)`` of a real quadratic field, with ``a, b`` rational."""

    __slots__ = ("_p", "_q", "_r", "d", "_hash")

    def __init__(self, a: Any = 0, b: Any = 0, d: int = 1) -> None:
        if isinstance(a, QuadNum):
            if b != 0:
                raise FieldError("cannot add an irrational part to a QuadNum")
            self._p, self._q, self._r, self.d = a._p, a._q, a._r, _join_d(a.d, d)
            self._hash = None
            return
        a = Fraction(a)
        b = Fraction(b)
        if d < 1 or not is_squarefree(d):
            raise FieldError(f"d={d} is not a positive squarefree integer", d=d)
        if d == 1 and b != 0:
            raise FieldError("d=1 only holds rationals")
        r = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        p = a.numerator * (r // a.denominator)
        q = b.numerator * (r // b.denominator)
        self._p, self._q, self._r, self.d = p, q, r, d
        self._hash = None
        self._reduce()

    @classmethod
    def _raw(cls, p: int, q: int, r: int, d: int) -> QuadNum:
        obj = object.__new__(cls)
        if r < 0:
            p, q, r = -p, -q, -r
        g = math.gcd(math.gcd(p, q), r)
        if g != 1:
            p //= g
            q //= g
            r //= g
        obj._p, obj._q, obj._r, obj.d = p, q, r, d
        obj._hash = None
        return obj

    def _reduce(self) -> None:
        if self._r < 0:
            self._p, self._q, self._r = -self._p, -self._q, -self._r
        g = math.gcd(math.gcd(self._p, self._q), self._r)
        if g > 1:
            self._p //= g
            self._q //= g
            self._r //= g

    # -- accessors ------------------------------------------------------------
    @property
    def a(self) -> Fraction:
        return Fraction(self._p, self._r)

    @property
    def b(self) -> Fraction:
        return Fraction(self._q, self._r)

    def is_rational(self) -> bool:
        return self._q == 0

    def in_field(self, d: int) -> QuadNum:
        """Return the same value tagged with field ``d`` (rationals only change tag)."""
        return QuadNum._raw(self._p, self._q, self._r, _join_d(d, self.d))

    # -- coercion -------------------------------------------------------------
    @staticmethod
    def coerce(x: Any, d: int = 1) -> QuadNum:
        if isinstance(x, QuadNum):
            return x
        if isinstance(x, int):
            return QuadNum._raw(x, 0, 1, d)
        if isinstance(x, _Rational):
            return QuadNum._raw(x.numerator, 0, x.denominator, d)
        raise TypeError(f"cannot coerce {type(x).__name__} to QuadNum")

    def _other(self, other: Any) -> QuadNum | None:
        if isinstance(other, QuadNum):
            return other
        if isinstance(other, int):
            return QuadNum._raw(other, 0, 1, 1)
        if isinstance(other, _Rational):
            return QuadNum._raw(other.numerator, 0, other.denominator, 1)
        return None

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other: Any) -> Any:
        o = self._other(other)
        if o is None:
            if isinstance(other, float):
                return float(self) + other
            return NotImplemented
        d = _join_d(self.d, o.d)
        if self._r == o._r:
            return QuadNum._raw(self._p + o._p, self._q + o._q, self._r, d)
        return QuadNum._raw(
            self._p * o._r + o._p * self._r, self._q * o._r + o._q * self._r, self._r * o._r, d
        )

    __radd__ = __add__

    def __neg__(self) -> QuadNum:
        return QuadNum._raw(-self._p, -self._q, self._r, self.d)

    def __pos__(self) -> QuadNum:
        return self

    def __sub__(self, other: Any) -> Any:
        o = self._other(other)
        if o is None:
            if isinstance(other, float):
                return float(self) - other
            return NotImplemented
        d = _join_d(self.d, o.d)
        if self._r == o._r:
            return QuadNum._raw(self._p - o._p, self._q - o._q, self._r, d)
        return QuadNum._raw(
            self._p * o._r - o._p * self._r, self._q * o._r - o._q * self._r, self._r * o._r, d
        )

    def __rsub__(self, other: Any) -> Any:
        o = self._other(other)
        if o is None:
            if isinstance(other, float):
                return other - float(self)
            return NotImplemented
        return o - self

    def __mul__(self, other: Any) -> Any:
        o = self._other(other)
        if o is None:
            if isinstance(other, float):
                return float(self) * other
            return NotImplemented
        d = _join_d(self.d, o.d)
        p1, q1, p2, q2 = self._p, self._q, o._p, o._q
        if q1 == 0:
            return QuadNum._raw(p1 * p2, p1 * q2, self._r * o._r, d)
        if q2 == 0:
            return QuadNum._raw(p1 * p2, q1 * p2, self._r * o._r, d)
        return QuadNum._raw(p1 * p2 + d * q1 * q2, p1 * q2 + q1 * p2, self._r * o._r, d)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> Any:
        o = self._other(other)
        if o is None:
            if isinstance(other, float):
                return float(self) / other
            return NotImplemented
        d = _join_d(self.d, o.d)
        p2, q2 = o._p, o._q
        if p2 == 0 and q2 == 0:
            raise DivisionByZero("division by zero in Q(sqrt(d))", d=d)
        if q2 == 0:
            return QuadNum._raw(self._p * o._r, self._q * o._r, self._r * p2, d)
        den = p2 * p2 - d * q2 * q2
        p1, q1 = self._p, self._q
        return QuadNum._raw(
            (p1 * p2 - d * q1 * q2) * o._r, (q1 * p2 - p1 * q2) * o._r, self._r * den, d
        )

    def __rtruediv__(self, other: Any) -> Any:
        o = self._other(other)
        if o is None:
            if isinstance(other, float):
                return other / float(self)
            return NotImplemented
        return o / self

    def __pow__(self, n: int) -> QuadNum:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return QuadNum._raw(1, 0, 1, self.d) / (self ** (-n))
        result = QuadNum._raw(1, 0, 1, self.d)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __abs__(self) -> QuadNum:
        return -self if self.sign() < 0 else self

    # -- Galois structure -------------------------------------------------------
    def conj(self) -> QuadNum:
        return QuadNum._raw(self._p, -self._q, self._r, self.d)

    def norm(self) -> Fraction:
        return Fraction(self._p * self._p - self.d * self._q * self._q, self._r * self._r)

    def trace(self) -> Fraction:
        return Fraction(2 * self._p, self._r)

    # -- order ------------------------------------------------------------------
    def sign(self) -> int:
        p, q = self._p, self._q
        sp = (p > 0) - (p < 0)
        sq = (q > 0) - (q < 0)
        if sq == 0 or sp == sq:
            return sp if sp else sq
        if sp == 0:
            return sq
        return sp if p * p > self.d * q * q else sq

    def _cmp(self, other: Any) -> int:
        o = self._other(other)
        if o is None:
            if isinstance(other, float):
                f = float(self)
                return (f > other) - (f < other)
            raise TypeError(f"cannot compare QuadNum with {type(other).__name__}")
        return (self - o).sign()

    def __lt__(self, other: Any) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: Any) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: Any) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: Any) -> bool:
        return self._cmp(other) >= 0

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, QuadNum):
            if self._q == 0 and other._q == 0:
                return self._p == other._p and self._r == other._r
            return (
                self.d == other.d
                and self._p == other._p
                and self._q == other._q
                and self._r == other._r
            )
        if isinstance(other, (int, _Rational)):
            return self._q == 0 and Fraction(self._p, self._r) == other
        if isinstance(other, float):
            return float(self) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if self._q == 0:
                self._hash = hash(Fraction(self._p, self._r))
            else:
                self._hash = hash((self._p, self._q, self._r, self.d))
        return self._hash

    def __bool__(self) -> bool:
        return self._p != 0 or self._q != 0

    def __floor__(self) -> int:
        if self._q == 0:
            return self._p // self._r
        f = math.floor(float(self))
        while self < f:
            f -= 1
        while self >= f + 1:
            f += 1
        return f

    def __int__(self) -> int:
        # truncation toward zero, like int() on a float
        f = math.floor(self)
        return f + 1 if f < 0 and self != f else f

    # -- conversions ----------------------------------------------------------------
    def approx(self) -> tuple[float, float]:
        """Float value and a magnitude bounding its rounding error scale."""
        x = self._p / self._r
        if self._q == 0:
            return x, abs(x)
        y = self._q / self._r * math.sqrt(self.d)
        return x + y, abs(x) + abs(y)

    def __float__(self) -> float:
        if self._q == 0:
            return float(Fraction(self._p, self._r))
        return float(Fraction(self._p, self._r)) + float(Fraction(self._q, self._r)) * math.sqrt(
            self.d
        )

    def __repr__(self) -> str:
        return f"QuadNum({self.a}, {self.b}, d={self.d})"

    def __str__(self) -> str:
        if self._q == 0:
            return str(self.a)
        if self._p == 0:
            return f"{self.b}*sqrt({self.d})"
        b = self.b
        sign = "+" if b > 0 else "-"
        return f"{self.a}{sign}{abs(b)}*sqrt({self.d})"

    def to_json(self) -> dict[str, Any]:
        a, b = self.a, self.b
        return {"a": [a.numerator, a.denominator], "b": [b.numerator, b.denominator], "d": self.d}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> QuadNum:
        a = Fraction(int(obj["a"][0]), int(obj["a"][1]))
        b = Fraction(int(obj["b"][0]), int(obj["b"][1]))
        return cls(a, b, int(obj["d"]))


def sqrt_d(d: int) -> QuadNum:
    return QuadNum(0, 1, d)


def q_arith(x: QuadNum, y: QuadNum, op: str) -> QuadNum:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown op {op!r}")


def q_conj(x: QuadNum) -> QuadNum:
    return QuadNum.coerce(x).conj()


def q_sign(x: Any) -> int:
    if isinstance(x, QuadNum):
        return x.sign()
    return (x > 0) - (x < 0)


def field_of(*values: Any) -> int:
    """The common ``d`` of a collection of values (1 if all rational)."""
    d = 1
    for v in values:
        if isinstance(v, QuadNum):
            d = _join_d(d, v.d)
    return d
