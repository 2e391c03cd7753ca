"""Exact power series and the quadratic field Q(sqrt(1 + 8h)).

Everything that depends on the Boltzmann weight is parametrized by a rational
``h`` in ``[0, 1/4]``; the weight itself is ``lambda = h / (1 + 8h)^(3/2)``,
which lives in ``Q(s)`` with ``s = sqrt(1 + 8h)``.
"""

from __future__ import annotations

import math
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence, Union

Rational = Union[int, Fraction]

H_CRITICAL = Fraction(1, 4)


class SeriesError(ValueError):
    pass


class OutOfRange(SeriesError):
    pass


class NonIntegralCoefficient(SeriesError):
    pass


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def check_h(h) -> Fraction:
    h = as_fraction(h)
    if not 0 <= h <= H_CRITICAL:
        raise OutOfRange(f"h={h} outside [0, 1/4]")
    return h


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


# ---------------------------------------------------------------------------
# QuadNum
# ---------------------------------------------------------------------------


class QuadNum:
    """The number ``a + b*s`` with ``s = sqrt(1 + 8h)``.

    When ``1 + 8h`` is a rational square (e.g. ``h = 0``) the radical part is
    folded into ``a`` so that ``b == 0`` characterizes rational values.
    """

    __slots__ = ("a", "b", "h")

    def __init__(self, a: Rational = 0, b: Rational = 0, h: Rational = 0):
        a, b, h = as_fraction(a), as_fraction(b), as_fraction(h)
        if b:
            root = _rational_sqrt(1 + 8 * h)
            if root is not None:
                a, b = a + b * root, Fraction(0)
        if not b:
            h = Fraction(0)
        self.a, self.b, self.h = a, b, h

    @classmethod
    def sqrt_disc(cls, h: Rational) -> "QuadNum":
        """``s = sqrt(1 + 8h)`` itself."""
        return cls(0, 1, h)

    @property
    def disc(self) -> Fraction:
        return 1 + 8 * self.h

    def is_rational(self) -> bool:
        return self.b == 0

    # coercion ------------------------------------------------------------
    def _coerce(self, other) -> "QuadNum":
        if isinstance(other, QuadNum):
            if self.b and other.b and self.h != other.h:
                raise ValueError(
                    f"cannot mix sqrt(1+8h) for h={self.h} and h={other.h}")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadNum(other)
        return NotImplemented

    def _field(self, other: "QuadNum") -> Fraction:
        return self.h if self.b else other.h

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadNum(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadNum(-self.a, -self.b, self.h)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadNum(self.a - o.a, self.b - o.b, self._field(o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        h = self._field(o)
        d = 1 + 8 * h
        return QuadNum(self.a * o.a + self.b * o.b * d,
                       self.a * o.b + self.b * o.a, h)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.disc

    def inverse(self) -> "QuadNum":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QuadNum division by zero")
        return QuadNum(self.a / n, -self.b / n, self.h)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.b == 0:
            if o.a == 0:
                raise ZeroDivisionError("QuadNum division by zero")
            return QuadNum(self.a / o.a, self.b / o.a, self.h)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = QuadNum(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparison ----------------------------------------------------------
    def sign(self) -> int:
        """Exact sign of ``a + b*s``."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 * (1 + 8h)
        diff = self.a * self.a - self.b * self.b * self.disc
        return sa if diff > 0 else -sa

    def __eq__(self, other):
        o = self._coerce(other) if isinstance(other, (QuadNum, int, Fraction)) else NotImplemented
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b and (self.b == 0 or self.h == o.h)

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.h))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    # rendering -----------------------------------------------------------
    def to_decimal(self, digits: int = 50) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = digits + 10
            s = Decimal(self.disc.numerator) / Decimal(self.disc.denominator)
            s = s.sqrt()
            val = (Decimal(self.a.numerator) / Decimal(self.a.denominator)
                   + Decimal(self.b.numerator) / Decimal(self.b.denominator) * s)
            ctx.prec = digits
            return +val

    def __float__(self):
        return float(self.to_decimal(30))

    def exact_str(self) -> str:
        return signed_sum([(self.a, None), (self.b, f"sqrt({self.disc})")])

    def __repr__(self):
        if self.b == 0:
            return f"QuadNum({self.a})"
        return f"QuadNum({self.a}, {self.b}, h={self.h})"

    __str__ = exact_str


# ---------------------------------------------------------------------------
# truncated power series
# ---------------------------------------------------------------------------


class PowerSeriesQ:
    """Univariate power series truncated at a tracked ``order``.

    Coefficients are exact field elements (``Fraction`` or ``QuadNum``, or
    nested ``PowerSeriesQ`` for the bivariate case); ``coeffs[k]`` is the
    coefficient of ``x^k`` for ``k <= order``.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable, order: int, zero=Fraction(0)):
        if order < 0:
            raise SeriesError("negative truncation order")
        cs = list(coeffs)[: order + 1]
        cs.extend([zero] * (order + 1 - len(cs)))
        self.coeffs = cs
        self.order = order

    @classmethod
    def constant(cls, c, order: int) -> "PowerSeriesQ":
        zero = c * 0
        return cls([c], order, zero)

    @classmethod
    def variable(cls, order: int) -> "PowerSeriesQ":
        return cls([Fraction(0), Fraction(1)], order)

    def __getitem__(self, k: int):
        if k > self.order:
            raise SeriesError(f"coefficient {k} beyond truncation order {self.order}")
        return self.coeffs[k]

    def __len__(self):
        return self.order + 1

    def _zero(self):
        return self.coeffs[0] * 0

    def _lift(self, other) -> "PowerSeriesQ":
        if isinstance(other, PowerSeriesQ):
            return other
        return PowerSeriesQ.constant(other, self.order)

    def __add__(self, other):
        o = self._lift(other)
        n = min(self.order, o.order)
        return PowerSeriesQ([self.coeffs[k] + o.coeffs[k] for k in range(n + 1)], n)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeriesQ([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, PowerSeriesQ):
            return PowerSeriesQ([c * other for c in self.coeffs], self.order)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(n + 1):
            acc = a[0] * b[k]
            for i in range(1, k + 1):
                acc = acc + a[i] * b[k - i]
            out.append(acc)
        return PowerSeriesQ(out, n)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = PowerSeriesQ.constant(self.coeffs[0] * 0 + 1, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "PowerSeriesQ":
        a = self.coeffs
        if not a[0]:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        inv0 = 1 / a[0]
        out = [inv0]
        for k in range(1, self.order + 1):
            acc = a[1] * out[k - 1]
            for i in range(2, k + 1):
                acc = acc + a[i] * out[k - i]
            out.append(-acc * inv0)
        return PowerSeriesQ(out, self.order)

    def __truediv__(self, other):
        if isinstance(other, PowerSeriesQ):
            return self * other.inverse()
        return PowerSeriesQ([c / other for c in self.coeffs], self.order)

    def sqrt(self) -> "PowerSeriesQ":
        """Square root of a series with constant term exactly 1."""
        a = self.coeffs
        if a[0] != 1:
            raise SeriesError("sqrt only defined for constant term 1")
        out = [a[0] * 0 + 1]
        half = Fraction(1, 2)
        for k in range(1, self.order + 1):
            acc = a[k]
            for i in range(1, k):
                acc = acc - out[i] * out[k - i]
            out.append(acc * half)
        return PowerSeriesQ(out, self.order)

    def compose(self, inner: "PowerSeriesQ") -> "PowerSeriesQ":
        """``self(inner(x))``; ``inner`` must have zero constant term."""
        if inner.coeffs[0]:
            raise SeriesError("inner series must have zero constant term")
        n = min(self.order, inner.order)
        inner = PowerSeriesQ(inner.coeffs, n)
        # Horner
        result = PowerSeriesQ.constant(self.coeffs[n], n)
        for k in range(n - 1, -1, -1):
            result = result * inner + self.coeffs[k]
        return result

    def reversion(self) -> "PowerSeriesQ":
        """Compositional inverse of ``f = c1 x + c2 x^2 + ...`` with ``c1 != 0``.

        Newton iteration on ``f(g) = x``; each step doubles the number of
        correct coefficients.
        """
        if self.coeffs[0] or not self.coeffs[1]:
            raise SeriesError("reversion needs f(0)=0 and f'(0)!=0")
        n = self.order
        deriv = self.derivative()
        x = PowerSeriesQ.variable(n)
        g = PowerSeriesQ([Fraction(0), 1 / self.coeffs[1]], n)
        prec = 1
        while prec < n:
            prec = min(2 * prec, n)
            residual = self.compose(g) - x
            g = g - residual / deriv.compose(g)
        # one more step cleans up the top coefficient when n is odd
        residual = self.compose(g) - x
        if any(residual.coeffs):
            g = g - residual / deriv.compose(g)
        return g

    def derivative(self) -> "PowerSeriesQ":
        cs = [k * self.coeffs[k] for k in range(1, self.order + 1)]
        if not cs:
            cs = [self._zero()]
        out = PowerSeriesQ(cs, max(self.order - 1, 0))
        # keep the declared order so compositions line up
        return PowerSeriesQ(out.coeffs, self.order, self._zero())

    def truncate(self, order: int) -> "PowerSeriesQ":
        return PowerSeriesQ(self.coeffs, min(order, self.order))

    def __eq__(self, other):
        if not isinstance(other, PowerSeriesQ):
            return NotImplemented
        n = min(self.order, other.order)
        return all(self.coeffs[k] == other.coeffs[k] for k in range(n + 1))

    def __repr__(self):
        terms = ", ".join(str(c) for c in self.coeffs[:8])
        more = ", ..." if self.order >= 8 else ""
        return f"PowerSeriesQ([{terms}{more}], order={self.order})"


# ---------------------------------------------------------------------------
# lambda <-> h
# ---------------------------------------------------------------------------


def lambda_of_h(h) -> QuadNum:
    """``h / (1+8h)^(3/2)`` written as ``h*s / (1+8h)^2``."""
    h = check_h(h)
    d = 1 + 8 * h
    return QuadNum(0, h / (d * d), h)


def lambda_critical() -> QuadNum:
    return lambda_of_h(H_CRITICAL)


def lambda_of_h_series(order: int) -> PowerSeriesQ:
    """``lambda(h) = h (1+8h)^(-3/2)`` as a series in ``h``."""
    h = PowerSeriesQ.variable(order)
    root = (1 + 8 * h).sqrt()
    return h * (root * (1 + 8 * h)).inverse()


@lru_cache(maxsize=None)
def _h_series(order: int) -> PowerSeriesQ:
    return lambda_of_h_series(order).reversion()


def h_series_of_lambda(order: int) -> PowerSeriesQ:
    """Compositional inverse of ``lambda(h)``, exact through ``lambda^order``."""
    if order < 1:
        raise SeriesError("order must be >= 1")
    return _h_series(order)


# binomial coefficients of sqrt(1 - y) = sum c_k y^k
@lru_cache(maxsize=None)
def sqrt_one_minus_coeff(k: int) -> Fraction:
    c = Fraction(1)
    for j in range(k):
        c = c * (Fraction(1, 2) - j) / (j + 1)
    return c * (-1) ** k


def _z_coefficient(p: int, h, u):
    """``[x^p]`` of the partition function in terms of ``h`` and ``u = 1/sqrt(1+8h)``.

    Works for any ring where ``h`` and ``u`` live (QuadNum or series).
    """
    if p < 1:
        raise OutOfRange("perimeter must be >= 1")
    c = sqrt_one_minus_coeff
    if p == 1:
        return (1 - (1 + 2 * h) * u) * Fraction(1, 2)
    return (u ** p) * ((4 * h) ** (p - 1)) * (4 * h * c(p) - c(p - 1)) * Fraction(1, 2)


def Z_p_at(h, p: int) -> QuadNum:
    """Partition function of triangulations of the ``p``-gon at weight ``lambda(h)``."""
    h = check_h(h)
    return _z_at(h, p)


@lru_cache(maxsize=None)
def _z_at(h: Fraction, p: int) -> QuadNum:
    u = QuadNum.sqrt_disc(h).inverse()
    return _z_coefficient(p, QuadNum(h), u)


def z_bivariate(order_x: int, order_lambda: int) -> list[PowerSeriesQ]:
    """Coefficients ``[x^p]`` for ``p = 0..order_x``, each a series in ``lambda``.

    Entry ``p`` holds ``Z_p(lambda)`` truncated at ``lambda^order_lambda``.
    """
    if order_x < 1 or order_lambda < 1:
        raise SeriesError("orders must be >= 1")
    hs = h_series_of_lambda(order_lambda)
    u = (1 + 8 * hs).sqrt().inverse()
    out = [PowerSeriesQ([], order_lambda)]
    for p in range(1, order_x + 1):
        out.append(_z_coefficient(p, hs, u))
    return out


def z_series_in_h(p: int, order: int) -> PowerSeriesQ:
    """``Z_p`` as a series in ``h`` (before substituting ``h(lambda)``)."""
    h = PowerSeriesQ.variable(order)
    u = (1 + 8 * h).sqrt().inverse()
    return _z_coefficient(p, h, u)


@lru_cache(maxsize=None)
def _z_table(order_x: int, order_lambda: int) -> tuple:
    return tuple(tuple(s.coeffs) for s in z_bivariate(order_x, order_lambda))


def tau(n: int, p: int) -> int:
    """Number of triangulations of the ``p``-gon with ``n + 1`` vertices."""
    if n < 0 or p < 1:
        raise OutOfRange("need n >= 0 and p >= 1")
    if n == 0:
        return 0
    # round orders up so nearby queries share one table
    ox = max(8, p)
    ol = max(8, n)
    val = _z_table(ox, ol)[p][n]
    if val.denominator != 1:
        raise NonIntegralCoefficient(f"tau({n},{p}) = {val} is not an integer")
    if val < 0:
        raise NonIntegralCoefficient(f"tau({n},{p}) = {val} is negative")
    return int(val)


def tau_row(p: int, n_max: int) -> list[int]:
    return [tau(n, p) for n in range(n_max + 1)]


def partial_z(h, p: int, n_max: int) -> QuadNum:
    """``sum_{n <= n_max} tau_n(p) lambda^n`` exactly."""
    lam = lambda_of_h(h)
    total, power = QuadNum(0), QuadNum(1)
    for n in range(n_max + 1):
        if n:
            power = power * lam
        t = tau(n, p)
        if t:
            total = total + t * power
    return total


def signed_sum(terms) -> str:
    """Render ``[(coef, factor or None), ...]`` as ``"a - b*sqrt(d)"``; zero terms vanish."""
    out = ""
    for c, factor in terms:
        if not c:
            continue
        body = str(abs(c)) if factor is None else f"{abs(c)}*{factor}"
        if not out:
            out = body if c > 0 else f"-{body}"
        else:
            out += f" + {body}" if c > 0 else f" - {body}"
    return out or "0"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def render(value, digits: int = 50) -> dict:
    """Exact string plus decimal rendering for JSON output."""
    if isinstance(value, QuadNum):
        return {"value": value.exact_str(), "decimal": str(value.to_decimal(digits))}
    if isinstance(value, (int, Fraction)):
        q = QuadNum(value)
        return {"value": str(as_fraction(value)), "decimal": str(q.to_decimal(digits))}
    if hasattr(value, "exact_str"):
        return {"value": value.exact_str(), "decimal": str(value.to_decimal(digits))}
    raise TypeError(type(value))
