"""Peeling coefficients C_p(lambda, gamma) and the a/b coefficient calculus.

Everything is parametrized by the rational ``h`` (with ``lambda = h/(1+8h)^{3/2}``)
so values live in Q(sqrt(1+8h)).  A mixture of several atoms mixes fields; those
sums are kept exact as :class:`RadicalSum`.

Normalization: ``C_1 = 1`` throughout, so the PSHT closed form is
``C_p = (1+8h)^{-(p-1)/2} * sum_{q<p} binom(2q, q) h^q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from threading import Lock
from typing import Iterable, Sequence, Union

from .series import (
    OutOfRange,
    PowerSeriesQ,
    QuadNum,
    SeriesError,
    Z_p_at,
    as_fraction,
    check_h,
    lambda_of_h,
    partial_z,
    signed_sum,
    tau,
)

STAR = "star"
GRID_H = (Fraction(0), Fraction(1, 16), Fraction(1, 8), Fraction(3, 16), Fraction(1, 4))
GRID_GAMMA = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


class CoeffError(ValueError):
    pass


class InsufficientTable(CoeffError):
    pass


class TailBoundTooLarge(CoeffError):
    pass


def check_gamma(gamma) -> Fraction:
    g = as_fraction(gamma)
    if not 0 <= g <= 1:
        raise OutOfRange(f"gamma={g} outside [0, 1]")
    return g


# ---------------------------------------------------------------------------
# exact sums of square roots across fields
# ---------------------------------------------------------------------------


def _squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(k, d)`` with ``n = k^2 d`` and ``d`` squarefree."""
    k, d, f = 1, 1, 2
    while f * f <= n:
        while n % (f * f) == 0:
            n //= f * f
            k *= f
        if n % f == 0:
            n //= f
            d *= f
        f += 1 if f == 2 else 2
    return k, d * n


class RadicalSum:
    """Finite sum ``sum_d c_d sqrt(d)`` over squarefree integers ``d``.

    Square roots of distinct squarefree integers are linearly independent over
    Q, so equality and zero tests are exact; signs are certified numerically.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {d: c for d, c in (terms or {}).items() if c}

    @classmethod
    def of(cls, x) -> "RadicalSum":
        if isinstance(x, RadicalSum):
            return x
        if isinstance(x, QuadNum):
            out = {1: x.a} if x.a else {}
            if x.b:
                disc = x.disc
                k, d = _squarefree_split(disc.numerator * disc.denominator)
                coef = x.b * Fraction(k, disc.denominator)
                out[d] = out.get(d, Fraction(0)) + coef
            return cls(out)
        return cls({1: as_fraction(x)})

    def _binary(self, other, sign):
        o = RadicalSum.of(other)
        out = dict(self.terms)
        for d, c in o.terms.items():
            out[d] = out.get(d, Fraction(0)) + sign * c
        return RadicalSum(out)

    def __add__(self, other):
        return self._binary(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, -1)

    def __rsub__(self, other):
        return RadicalSum.of(other)._binary(self, -1)

    def __neg__(self):
        return RadicalSum({d: -c for d, c in self.terms.items()})

    def __mul__(self, other):
        o = RadicalSum.of(other)
        out: dict = {}
        for d1, c1 in self.terms.items():
            for d2, c2 in o.terms.items():
                g = math.gcd(d1, d2)
                d = d1 // g * (d2 // g)
                out[d] = out.get(d, Fraction(0)) + c1 * c2 * g
        return RadicalSum(out)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    def to_decimal(self, digits: int = 50) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = digits + 10
            total = Decimal(0)
            for d, c in self.terms.items():
                total += Decimal(c.numerator) / Decimal(c.denominator) * Decimal(d).sqrt()
            ctx.prec = digits
            return +total

    def sign(self) -> int:
        if not self.terms:
            return 0
        if list(self.terms) == [1]:
            c = self.terms[1]
            return (c > 0) - (c < 0)
        scale = sum(abs(c) * (d + 1) for d, c in self.terms.items())
        digits = 40
        while True:
            val = self.to_decimal(digits)
            err = Decimal(float(scale)) * Decimal(10) ** (-(digits - 5))
            if abs(val) > err:
                return 1 if val > 0 else -1
            digits *= 2

    def __eq__(self, other):
        if not isinstance(other, (RadicalSum, QuadNum, int, Fraction)):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self):
        return float(self.to_decimal(30))

    def exact_str(self) -> str:
        return signed_sum([(self.terms[d], None if d == 1 else f"sqrt({d})")
                           for d in sorted(self.terms)])

    def __repr__(self):
        return f"RadicalSum({self.exact_str()})"


# ---------------------------------------------------------------------------
# peeling coefficients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoeffVector:
    h: Fraction
    gamma: Fraction
    values: tuple  # values[p - 1] = C_p

    @property
    def P(self) -> int:
        return len(self.values)

    def __getitem__(self, p: int):
        if not 1 <= p <= len(self.values):
            raise IndexError(f"C_{p} outside computed range 1..{len(self.values)}")
        return self.values[p - 1]

    def __iter__(self):
        return iter(self.values)


def c_psht(p: int, h) -> QuadNum:
    """Normalized closed form, ``c_psht(1, h) == 1``."""
    h = check_h(h)
    if p < 1:
        raise ValueError("perimeter must be >= 1")
    total = sum((Fraction(math.comb(2 * q, q)) * h ** q for q in range(p)), Fraction(0))
    u = QuadNum.sqrt_disc(h).inverse()
    return (u ** (p - 1)) * total


_c_tables: dict = {}
_c_lock = Lock()


def _c_list(h: Fraction, gamma: Fraction, P: int) -> list:
    """Memoized recursion; the table only ever grows with identical entries."""
    key = (h, gamma)
    with _c_lock:
        vals = _c_tables.setdefault(key, [QuadNum(1)])
        while len(vals) < P:
            p = len(vals)  # compute C_{p+1} from C_1..C_p
            acc = vals[p - 1]
            for i in range(p):
                z = Z_p_at(h, i + 1)
                if z:
                    acc = acc - 2 * z * vals[p - 1 - i]
            if gamma:
                conv = QuadNum(0)
                for i in range(p):
                    conv = conv + vals[i] * vals[p - 1 - i]
                acc = acc - gamma * conv
            vals.append(acc)
        return vals[:P]


def c_recursive(h, gamma, P: int) -> CoeffVector:
    h, gamma = check_h(h), check_gamma(gamma)
    if P < 1:
        raise ValueError("P must be >= 1")
    return CoeffVector(h, gamma, tuple(_c_list(h, gamma, P)))


def c_genfun(h, gamma, P: int) -> CoeffVector:
    """Coefficients of the closed-form generating function.

    For ``gamma > 0`` this expands ``(sqrt(A^2 B + 4 gamma x) - A sqrt(B)) / (2 gamma)``
    with ``A = 1 - x/s`` and ``B = 1 - 4h x/s``; ``gamma = 0`` uses the PSHT formula.
    """
    h, gamma = check_h(h), check_gamma(gamma)
    if P < 1:
        raise ValueError("P must be >= 1")
    if gamma == 0:
        return CoeffVector(h, gamma, tuple(c_psht(p, h) for p in range(1, P + 1)))
    zero = QuadNum(0)
    u = QuadNum.sqrt_disc(h).inverse()
    order = P + 1
    A = PowerSeriesQ([QuadNum(1), -u], order, zero)
    B = PowerSeriesQ([QuadNum(1), -4 * h * u], order, zero)
    X = PowerSeriesQ([zero, QuadNum(1)], order, zero)
    inner = A * A * B + X * (4 * gamma)
    num = inner.sqrt() - A * B.sqrt()
    coeffs = [num[p] / (2 * gamma) for p in range(1, P + 1)]
    if num[0]:
        raise SeriesError("closed form has a nonzero constant term")
    return CoeffVector(h, gamma, tuple(coeffs))


@dataclass(frozen=True)
class NotFoundWithinCap:
    """No negative coefficient up to ``cap``; inconclusive, not a refutation."""

    cap: int

    def __bool__(self):
        return False


def find_negative_p(h, gamma, p_cap: int = 200):
    """Least ``p <= p_cap`` with ``C_p(lambda(h), gamma) < 0`` (exact sign)."""
    h, gamma = check_h(h), check_gamma(gamma)
    if p_cap < 3:
        raise ValueError("p_cap must be >= 3")
    if gamma == 0:
        # every term of the closed form is nonnegative, skip the recursion cost
        for p in range(1, p_cap + 1):
            if c_psht(p, h).sign() < 0:
                return p
        return NotFoundWithinCap(p_cap)
    step = 16
    done = 0
    while done < p_cap:
        upto = min(p_cap, done + step)
        vals = _c_list(h, gamma, upto)
        for p in range(done + 1, upto + 1):
            if vals[p - 1].sign() < 0:
                return p
        done, step = upto, step * 2
    return NotFoundWithinCap(p_cap)


# ---------------------------------------------------------------------------
# mixtures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MixtureAtom:
    h: Union[Fraction, str]
    gamma: Fraction
    weight: Fraction = Fraction(1)

    def __post_init__(self):
        if self.h != STAR:
            object.__setattr__(self, "h", check_h(self.h))
        object.__setattr__(self, "gamma", check_gamma(self.gamma))
        w = as_fraction(self.weight)
        if not 0 < w <= 1:
            raise OutOfRange("atom weight must lie in (0, 1]")
        object.__setattr__(self, "weight", w)

    @property
    def is_star(self) -> bool:
        return self.h == STAR

    def as_plain(self) -> "MixtureAtom":
        """The star atom's coefficients coincide with those at (h=0, gamma=1)."""
        if self.is_star:
            return MixtureAtom(Fraction(0), Fraction(1), self.weight)
        return self


def point_mass(h, gamma=0) -> list[MixtureAtom]:
    return [MixtureAtom(h, gamma, 1)]


def check_mixture(mixture: Sequence[MixtureAtom]) -> None:
    if not mixture:
        raise ValueError("empty mixture")
    if sum(a.weight for a in mixture) != 1:
        raise ValueError("mixture weights must sum to 1")


def _C(atom: MixtureAtom, p: int) -> QuadNum:
    return _c_list(atom.h, atom.gamma, p)[p - 1]


def _pow(x, n: int):
    return QuadNum(1) if n == 0 else x ** n


def atom_a(atom: MixtureAtom, v: int, perims: Sequence[int]) -> QuadNum:
    """``lambda^v gamma^(k-1) prod C_{p_i}`` for one atom."""
    if not perims:
        raise ValueError("at least one hole is required")
    if atom.is_star:
        return QuadNum(int(v == 0 and all(p == 1 for p in perims)))
    k = len(perims)
    g = atom.gamma ** (k - 1)
    if not g:
        return QuadNum(0)
    val = _pow(lambda_of_h(atom.h), v) * g
    for p in perims:
        val = val * _C(atom, p)
    return val


def a_coeff(mixture: Sequence[MixtureAtom], v: int, perims: Sequence[int]) -> RadicalSum:
    check_mixture(mixture)
    total = RadicalSum()
    for atom in mixture:
        total = total + RadicalSum.of(atom_a(atom, v, perims)) * atom.weight
    return total


def _filled_sum(atom: MixtureAtom, v: int, perims: Sequence[int], z_of) -> QuadNum:
    atom = atom.as_plain()
    k = len(perims)
    total = QuadNum(0)
    for size in range(1, k + 1):
        g = atom.gamma ** (size - 1)
        if not g:
            continue
        for chosen in combinations(range(k), size):
            term = QuadNum(g)
            for i, p in enumerate(perims):
                term = term * (_C(atom, p) if i in chosen else z_of(atom.h, p))
                if not term:
                    break
            total = total + term
    return _pow(lambda_of_h(atom.h), v) * total


def atom_b(atom: MixtureAtom, v: int, perims: Sequence[int]) -> QuadNum:
    if atom.is_star:
        return atom_a(atom, v, perims)
    return _filled_sum(atom, v, perims, Z_p_at)


def b_from_a(mixture: Sequence[MixtureAtom], v: int, perims: Sequence[int]) -> RadicalSum:
    """Inclusion probability: every way of filling a proper subset of the holes."""
    check_mixture(mixture)
    if not perims:
        raise ValueError("at least one hole is required")
    total = RadicalSum()
    for atom in mixture:
        total = total + RadicalSum.of(atom_b(atom, v, perims)) * atom.weight
    return total


def _z_no_collapse(h: Fraction, p: int) -> QuadNum:
    z = Z_p_at(h, p)
    return z - lambda_of_h(h) if p == 2 else z


def ball_probability(mixture: Sequence[MixtureAtom], v: int, perims: Sequence[int]) -> RadicalSum:
    """``P(B_r^* = t)`` for a dual ball ``t`` whose free sides all lie at depth ``r``.

    Like :func:`b_from_a`, but a filled 2-gon may not be the bare edge: that
    filling would glue two ball faces together and yield a different ball.
    """
    check_mixture(mixture)
    total = RadicalSum()
    for atom in mixture:
        if atom.is_star:
            val = atom_a(atom, v, perims)
        else:
            val = _filled_sum(atom, v, perims, _z_no_collapse)
        total = total + RadicalSum.of(val) * atom.weight
    return total


def verify_peeling_identity(mixture: Sequence[MixtureAtom], v: int, perims: Sequence[int],
                            report: list | None = None) -> RadicalSum:
    """Residual of the peeling equation on the first hole (exact zero expected).

    The volume sum over fillings of the swallowed part is resummed through Z.
    """
    check_mixture(mixture)
    if not perims:
        raise ValueError("at least one hole is required")
    p1, rest = perims[0], tuple(perims[1:])
    total = RadicalSum()
    for atom in mixture:
        plain = atom.as_plain()

        def a(pp, vv=v):
            return atom_a(plain, vv, pp)

        res = a((p1,) + rest) - a((p1 + 1,) + rest)
        for i in range(p1):
            z = Z_p_at(plain.h, i + 1)
            if z:
                res = res - 2 * z * a((p1 - i,) + rest)
            res = res - a((i + 1, p1 - i) + rest)
        if report is not None:
            report.append({"atom": atom, "v": v, "perims": tuple(perims), "residual": res})
        total = total + RadicalSum.of(res) * atom.weight
    return total


# ---------------------------------------------------------------------------
# tables and finite differences
# ---------------------------------------------------------------------------


class CoeffTable(dict):
    """Mapping ``(sorted perimeter tuple, v) -> value``."""

    def value(self, perims: Iterable[int], v: int):
        key = (tuple(sorted(perims)), v)
        if key not in self:
            raise InsufficientTable(f"missing entry {key}")
        return self[key]


def ones_table(mixture: Sequence[MixtureAtom], k_max: int, v_max: int) -> CoeffTable:
    """``a_v^{k x 1}`` for ``1 <= k <= k_max`` and ``0 <= v <= v_max``."""
    return CoeffTable({((1,) * k, v): a_coeff(mixture, v, (1,) * k)
                       for k in range(1, k_max + 1) for v in range(v_max + 1)})


def general_table(mixture: Sequence[MixtureAtom], k_max: int, p_max: int, v_max: int) -> CoeffTable:
    """All sorted perimeter tuples with ``k <= k_max`` holes and ``p_i <= p_max``."""
    from itertools import combinations_with_replacement

    table = CoeffTable()
    for k in range(1, k_max + 1):
        for perims in combinations_with_replacement(range(1, p_max + 1), k):
            for v in range(v_max + 1):
                table[(perims, v)] = a_coeff(mixture, v, perims)
    return table


def delta_v(table: dict) -> CoeffTable:
    out = CoeffTable()
    for (perims, v), val in table.items():
        nxt = table.get((perims, v + 1))
        if nxt is not None:
            out[(perims, v)] = val - nxt
    return out


def delta_k(table: dict) -> CoeffTable:
    out = CoeffTable()
    for (perims, v), val in table.items():
        nxt = table.get((tuple(sorted(perims + (1,))), v))
        if nxt is not None:
            out[(perims, v)] = val - nxt
    return out


def _sign(x) -> int:
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    return x.sign()


def delta_ops(table: dict, m: int, n: int) -> tuple[CoeffTable, bool]:
    """Apply ``Delta_v^m Delta_k^n``; the verdict is whether every entry is >= 0."""
    if m < 0 or n < 0:
        raise ValueError("difference orders must be >= 0")
    out = CoeffTable(table)
    for _ in range(n):
        out = delta_k(out)
    for _ in range(m):
        out = delta_v(out)
    if not out:
        raise InsufficientTable(f"table too small for m={m}, n={n}")
    return out, all(_sign(x) >= 0 for x in out.values())


def check_monotone(table: dict, max_order: int = 6) -> dict:
    """Verdicts for all ``m + n <= max_order`` (orders the table cannot support are skipped)."""
    verdicts = {}
    for m in range(max_order + 1):
        for n in range(max_order + 1 - m):
            try:
                _, ok = delta_ops(table, m, n)
            except InsufficientTable:
                continue
            verdicts[(m, n)] = ok
    return verdicts


# ---------------------------------------------------------------------------
# reconstruction from the k x 1 table
# ---------------------------------------------------------------------------


def reconstruct_from_ones(table: dict, target: Sequence[int], v: int, J: int = 30,
                          tol=Fraction(1, 10 ** 3), lambda_bound_h=Fraction(1, 4)):
    """Rebuild ``a_v^{target}`` from the numbers ``a_v^{k x 1}``.

    Runs the peeling recursion backwards on the excess ``sum (p_i - 1)``.  The
    volume sums are cut at ``J`` (or earlier where the table ends); their tails
    are bounded with ``a_{v+j} <= lambda_max^j a_v`` (valid for any mixture with
    ``Lambda <= lambda_max = lambda(lambda_bound_h)``), using the certified upper
    bound on ``a_v`` for the same holes.  Returns ``(value, error_bound)``.
    """
    hb = check_h(lambda_bound_h)
    tol = as_fraction(tol)
    v_top = max((vv for (pp, vv) in table if all(p == 1 for p in pp)), default=-1)
    gaps = {}

    def gap(q: int, cut: int) -> RadicalSum:
        if (q, cut) not in gaps:
            gaps[(q, cut)] = RadicalSum.of(Z_p_at(hb, q) - partial_z(hb, q, cut))
        return gaps[(q, cut)]

    memo: dict = {}

    def rec(perims: tuple, vv: int):
        key = (tuple(sorted(perims)), vv)
        if key in memo:
            return memo[key]
        if all(p == 1 for p in perims):
            if key not in table:
                raise InsufficientTable(f"missing entry {key}")
            out = (RadicalSum.of(table[key]), RadicalSum())
            memo[key] = out
            return out
        # put a hole of perimeter >= 2 first and peel it: p1 = q + 1
        idx = next(i for i, p in enumerate(perims) if p > 1)
        q = perims[idx] - 1
        rest = perims[:idx] + perims[idx + 1:]
        val, err = rec((q,) + rest, vv)
        cut = max(0, min(J, v_top - vv))
        for i in range(q):
            sub_v, sub_e = RadicalSum(), RadicalSum()
            for j in range(1, cut + 1):
                t = tau(j, i + 1)
                if t:
                    a, e = rec((q - i,) + rest, vv + j)
                    sub_v = sub_v + a * t
                    sub_e = sub_e + e * t
            # a_{vv+j} <= lambda_max^j a_vv on the same holes, and a_vv <= a + e
            a, e = rec((q - i,) + rest, vv)
            cap = a + e
            tail = gap(i + 1, cut) * cap if cap.sign() > 0 else RadicalSum()
            val = val - 2 * sub_v
            err = err + 2 * (sub_e + tail)
            a, e = rec((i + 1, q - i) + rest, vv)
            val = val - a
            err = err + e
        memo[key] = (val, err)
        return val, err

    value, bound = rec(tuple(target), v)
    if bound > tol:
        raise TailBoundTooLarge(f"error bound {float(bound):.3g} exceeds tolerance {float(tol):.3g}")
    return value, bound


# ---------------------------------------------------------------------------
# third-derivative witness at lambda = 0
# ---------------------------------------------------------------------------


def c_zero_scaled(gamma: Fraction, P: int) -> list[int]:
    """Integers ``D_p = C_p(0, gamma) * den^(p-1) / num^0`` for ``gamma = num/den``.

    At ``lambda = 0`` the recursion reads ``C_{p+1} = C_p - gamma sum C_{i+1} C_{p-i}``;
    scaling by ``den^(p-1)`` gives ``D_{p+1} = den D_p - num sum D_{i+1} D_{p-i}``.
    """
    num, den = gamma.numerator, gamma.denominator
    D = [1]
    for p in range(1, P):
        conv = sum(D[i] * D[p - 1 - i] for i in range(p))
        D.append(den * D[p - 1] - num * conv)
    return D


def third_derivative_witness(gamma=Fraction(1, 4), x=Fraction(9, 10), P: int = 600,
                             rho=Fraction(97, 100)) -> dict:
    """Certified enclosure of ``sum_{p>=3} p(p-1)(p-2) C_p(0, gamma) x^(p-3)``.

    The remainder uses Cauchy's bound ``|C_p| <= M rho^-p`` on a circle of radius
    ``rho < 1`` (the generating function's singularities sit on the unit circle).
    """
    gamma, x, rho = check_gamma(gamma), as_fraction(x), as_fraction(rho)
    if not (0 < gamma < 1 and 0 < x < rho < 1):
        raise ValueError("need 0 < gamma < 1 and 0 < x < rho < 1")
    D = c_zero_scaled(gamma, P)
    den = gamma.denominator
    partial = Fraction(0)
    for p in range(3, P + 1):
        partial += Fraction(p * (p - 1) * (p - 2) * D[p - 1], den ** (p - 1)) * x ** (p - 3)
    # rational upper bound on M
    with localcontext() as ctx:
        ctx.prec = 40
        r = Decimal(rho.numerator) / rho.denominator
        g = Decimal(gamma.numerator) / gamma.denominator
        m_dec = ((((1 + r) ** 2 + 4 * g * r).sqrt() + 1 + r) / (2 * g)) * Decimal("1.000001")
    M = Fraction(m_dec)
    q = x / rho
    first = M * (P + 1) ** 3 * q ** (P + 1) / x ** 3
    ratio = Fraction(P + 2, P + 1) ** 3 * q
    if ratio >= 1:
        raise ValueError("P too small for a convergent tail bound")
    remainder = first / (1 - ratio)
    closed = 6 * (1 - gamma) * (1 - 2 * gamma - x)
    return {
        "partial": partial,
        "remainder_bound": remainder,
        "upper": partial + remainder,
        "lower": partial - remainder,
        "negative": partial + remainder < 0,
        "numerator": closed,
    }
