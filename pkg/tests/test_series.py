from fractions import Fraction as F
import random

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from peeltri import series
from peeltri.series import (
    NonIntegralCoefficient,
    OutOfRange,
    PowerSeriesQ,
    QuadNum,
    Z_p_at,
    h_series_of_lambda,
    lambda_of_h,
    lambda_of_h_series,
    tau,
    z_bivariate,
)


def gen_binom(x: F, k: int) -> F:
    out = F(1)
    for i in range(k):
        out = out * (x - i) / (i + 1)
    return out


# --- lambda(h) -------------------------------------------------------------------

def test_lambda_at_zero():
    assert lambda_of_h(0) == 0


def test_lambda_critical_value():
    lam = lambda_of_h(F(1, 4))
    assert lam * lam * 27 == F(1, 16)
    mpmath.mp.dps = 40
    want = 1 / (12 * mpmath.sqrt(3))
    assert abs(mpmath.mpf(str(lam.to_decimal(35))) - want) < mpmath.mpf(10) ** -33


def test_lambda_eighth_squared_identity():
    h = F(1, 8)
    lam = lambda_of_h(h)
    assert lam * lam * (1 + 8 * h) ** 3 == h * h
    assert not lam.is_rational()


def test_lambda_out_of_range():
    with pytest.raises(OutOfRange):
        lambda_of_h(F(1, 3))
    with pytest.raises(OutOfRange):
        lambda_of_h(F(-1, 100))


def test_lambda_strictly_increasing_on_grid():
    # values sit in different quadratic fields; lambda^2 is rational and lambda >= 0
    grid = [F(k, 64) for k in range(17)]
    squares = [lambda_of_h(h) * lambda_of_h(h) for h in grid]
    assert all(q.is_rational() for q in squares)
    for a, b in zip(squares, squares[1:]):
        assert a < b
    crit = series.lambda_critical()
    assert squares[-1] == crit * crit
    assert all(lambda_of_h(h) <= crit for h in (F(1, 4), F(3, 16) + F(1, 16)))


# --- h(lambda) -------------------------------------------------------------------

def test_h_series_first_coefficients():
    s = h_series_of_lambda(6)
    assert s[0] == 0 and s[1] == 1 and s[2] == 12


def test_h_series_matches_lagrange():
    # [lambda^n] h = (1/n) [h^(n-1)] (1+8h)^(3n/2)
    s = h_series_of_lambda(12)
    for n in range(1, 13):
        assert s[n] == gen_binom(F(3 * n, 2), n - 1) * 8 ** (n - 1) / n


def test_h_series_round_trip():
    N = 15
    lam = lambda_of_h_series(N)
    back = lam.compose(h_series_of_lambda(N))
    assert back == PowerSeriesQ.variable(N)


# --- Z and tau --------------------------------------------------------------------

def test_z_vanishes_at_zero():
    assert all(Z_p_at(0, p) == 0 for p in range(1, 12))


def test_z1_closed_form():
    h = F(1, 8)
    s = QuadNum.sqrt_disc(h)
    assert Z_p_at(h, 1) == (1 - (1 + 2 * h) / s) / 2


def test_partial_sums_increase_to_z1():
    h = F(1, 8)
    target = Z_p_at(h, 1)
    prev = QuadNum(0)
    for n in range(1, 14):
        cur = series.partial_z(h, 1, n)
        assert prev <= cur < target
        prev = cur
    assert float(target - prev) < 0.05 * float(target)


def test_tau_small_values():
    assert [tau(0, p) for p in range(1, 6)] == [0] * 5
    assert tau(1, 1) == 1 and tau(2, 1) == 4
    assert tau(1, 2) == 1          # the bare edge
    assert tau(2, 3) == 1          # one triangle


def test_tau_one_gon_counts_spheres():
    # closing a loop-rooted 1-gon is a bijection with rooted spheres of 2(n-1) faces
    assert [tau(n, 1) for n in range(2, 7)] == [4, 32, 336, 4096, 54912]


def test_tau_nonnegative_integral():
    for n in range(0, 12):
        for p in range(1, 8):
            t = tau(n, p)
            assert isinstance(t, int) and t >= 0


def test_tau_rejects_non_integral(monkeypatch):
    rows = list(series._z_table(8, 8))
    rows[1] = PowerSeriesQ([F(0), F(1, 2)] + [F(0)] * 7, 8)
    monkeypatch.setattr(series, "_z_table", lambda *a: tuple(rows))
    with pytest.raises(NonIntegralCoefficient):
        tau(1, 1)


def test_z_bivariate_zero_at_lambda_zero():
    Z = z_bivariate(6, 6)
    assert all(Z[p][0] == 0 for p in range(1, 7))


@pytest.mark.parametrize("h", [F(0), F(1, 16), F(1, 8), F(1, 4)])
def test_bivariate_consistency(h):
    # sum_n tau_n(p) lambda^n evaluated through h(lambda) is the h-expansion of Z_p
    order = 10
    for p in range(1, 7):
        zs = series.z_series_in_h(p, order)
        lam = lambda_of_h_series(order)
        recomposed = z_bivariate(p, order)[p].compose(lam)
        assert recomposed == zs
        exact = Z_p_at(h, p)
        if h == 0:
            assert exact == 0
            continue
        # partial sums of the lambda-series approach the closed form from below
        partial = series.partial_z(h, p, 30)
        assert partial <= exact
        earlier = series.partial_z(h, p, 15)
        assert earlier <= partial
        if h < F(1, 4):
            assert float(exact - partial) < 0.5 * float(exact - earlier)


# --- power series arithmetic --------------------------------------------------------

small = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=6, max_size=6), st.lists(small, min_size=6, max_size=6),
       st.fractions(min_value=F(1, 3), max_value=3, max_denominator=5))
def test_division_round_trip(f, g, g0):
    order = 5
    fs = PowerSeriesQ(f, order)
    gs = PowerSeriesQ([g0] + g[1:], order)
    assert (fs * gs) / gs == fs


@settings(max_examples=30, deadline=None)
@given(st.lists(small, min_size=5, max_size=5))
def test_sqrt_squares_back(tail):
    s = PowerSeriesQ([F(1)] + tail, 5)
    r = s.sqrt()
    assert r * r == s


def test_sqrt_rejects_other_constants():
    with pytest.raises(series.SeriesError):
        PowerSeriesQ([F(4), F(1)], 3).sqrt()


def test_truncation_is_tracked():
    s = PowerSeriesQ([F(1), F(2)], 3)
    with pytest.raises(series.SeriesError):
        s[4]
    assert (s * s).order == 3


# --- QuadNum ------------------------------------------------------------------------

def test_quadnum_folds_rational_roots():
    q = QuadNum(1, 2, F(3, 8))          # 1 + 8h = 4
    assert q.is_rational() and q == 5


def test_quadnum_refuses_mixed_fields():
    with pytest.raises(ValueError):
        QuadNum(0, 1, F(1, 8)) + QuadNum(0, 1, F(1, 4))


def test_quadnum_field_ops():
    h = F(3, 16)
    s = QuadNum.sqrt_disc(h)
    assert s * s == 1 + 8 * h
    x = QuadNum(F(2, 3), F(-5, 7), h)
    assert x * x.inverse() == 1
    assert (x ** 3) / x == x * x


def _interval_sign(q: QuadNum):
    mpmath.iv.prec = 200
    val = (mpmath.iv.mpf([q.a.numerator, q.a.numerator]) / q.a.denominator
           + mpmath.iv.mpf([q.b.numerator, q.b.numerator]) / q.b.denominator
           * mpmath.iv.sqrt(mpmath.iv.mpf([q.disc.numerator, q.disc.numerator]) / q.disc.denominator))
    if val.a > 0:
        return 1
    if val.b < 0:
        return -1
    return None


def test_quadnum_sign_matches_intervals():
    rng = random.Random(20240611)
    decided = 0
    for i in range(1000):
        h = F(rng.randint(0, 400), 1600)
        b = F(rng.randint(-50, 50), rng.randint(1, 30))
        if i % 3 == 0:
            # near-cancelling instances: a close to -b*sqrt(1+8h)
            d = mpmath.sqrt(mpmath.mpf(1 + 8 * h.numerator / mpmath.mpf(h.denominator)))
            a = -b * F(str(mpmath.nstr(d, rng.randint(5, 25))))
        else:
            a = F(rng.randint(-80, 80), rng.randint(1, 30))
        q = QuadNum(a, b, h)
        iv = _interval_sign(q)
        if iv is None:
            assert q.sign() == 0
        else:
            decided += 1
            assert q.sign() == iv
    assert decided > 900


def test_render_has_exact_and_decimal():
    out = series.render(lambda_of_h(F(1, 8)), digits=30)
    assert "sqrt(2)" in out["value"]
    assert out["decimal"].startswith("0.0441941738")
