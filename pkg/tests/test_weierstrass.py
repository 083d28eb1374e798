from fractions import Fraction

import mpmath
import pytest

from smoothzeros.constructions import EvalContext, WeierstrassProduct, evaluate, jet
from smoothzeros.constructions.weierstrass import lattice_zero
from smoothzeros.errors import InputError, TailBoundUnachievable

F = Fraction
ORACLE_FACTORS = 600


def naive_product(x: Fraction, step: Fraction, factors: int, prec: int = 1200):
    """x * prod E_n(x/a_n) with E_n(w) = (1 - w) exp(sum_{j<=n} w^j/j), summed plainly."""
    with mpmath.workprec(prec):
        xm = mpmath.mpf(x.numerator) / x.denominator
        acc = xm
        log_part = mpmath.mpf(0)
        for n in range(1, factors + 1):
            a = lattice_zero(step, n)
            w = xm / (mpmath.mpf(a.numerator) / a.denominator)
            acc *= 1 - w
            log_part += sum(w**j / j for j in range(1, n + 1))
        return acc * mpmath.exp(log_part)


def test_lattice_order():
    assert [lattice_zero(F(1), n) for n in range(6)] == [0, 1, -1, 2, -2, 3]
    with pytest.raises(InputError):
        WeierstrassProduct(0)


@pytest.mark.parametrize("x", [F(1, 2), F(7, 2), F(-5, 3), F(13, 4)])
def test_matches_naive_product(x):
    ec = EvalContext(256)
    got = evaluate(WeierstrassProduct(1), x, ec)
    want = naive_product(x, F(1), ORACLE_FACTORS)
    assert abs(got.value - want) <= got.tail + abs(want) * mpmath.mpf(2) ** -250
    assert got.tail <= abs(want) * mpmath.mpf(2) ** -200


def test_other_step():
    ec = EvalContext(128)
    x = F(3, 10)
    got = evaluate(WeierstrassProduct(F(1, 2)), x, ec)
    want = naive_product(x, F(1, 2), 400, 600)
    assert abs(got.value - want) <= got.tail + abs(want) * mpmath.mpf(2) ** -120


def test_sign_follows_sine():
    ec = EvalContext(64)
    W = WeierstrassProduct(1)
    for i in range(-15, 16):
        x = F(2 * i + 1, 4)
        v = evaluate(W, x, ec).value
        assert mpmath.sign(v) == mpmath.sign(mpmath.sin(mpmath.pi * float(x)))


def test_exact_zeros_on_lattice():
    ec = EvalContext(128)
    for step in (F(1), F(1, 3)):
        W = WeierstrassProduct(step)
        for k in range(-3, 4):
            assert evaluate(W, k * step, ec).is_exact_zero
            assert jet(W, k * step, 3, ec).tail[0] == 0
            assert jet(W, k * step, 3, ec).coeffs[0] == 0


def test_tails_small_on_radius_four():
    ec = EvalContext(256)
    W = WeierstrassProduct(1)
    for i in range(-15, 16):
        x = F(2 * i + 1, 8)
        e = evaluate(W, x, ec)
        assert e.tail < abs(e.value) * mpmath.mpf(2) ** -200
    j = jet(W, F(7, 2), 3, ec)
    assert all(t < mpmath.mpf(2) ** -200 for t in j.tail)


@pytest.mark.parametrize("x0", [F(1, 3), F(-9, 4), F(2)])
def test_jet_against_finite_differences(x0):
    ec = EvalContext(256)
    W = WeierstrassProduct(1)
    h = F(1, 10**25)
    j = jet(W, x0, 2, ec)
    fp = evaluate(W, x0 + h, ec).value
    fm = evaluate(W, x0 - h, ec).value
    f0 = evaluate(W, x0, ec).value
    hm = ec.mp.mpf(h.numerator) / h.denominator
    d1 = (fp - fm) / (2 * hm)
    d2 = (fp - 2 * f0 + fm) / (2 * hm**2)
    scale = 1 + abs(j.coeffs[1]) + abs(j.coeffs[2])
    assert abs(j.coeffs[1] - d1) < mpmath.mpf(10) ** -40 * scale
    assert abs(j.coeffs[2] - d2) < mpmath.mpf(10) ** -15 * scale


def test_factor_cap():
    with pytest.raises(TailBoundUnachievable):
        evaluate(WeierstrassProduct(1), 10**6, EvalContext(64, weierstrass_max_factors=100))


@pytest.mark.parametrize("x", [F(1, 2), F(-37, 7), F(99, 10)])
def test_power_sum_exponent_matches_direct_loop(x):
    ec = EvalContext(256)
    W = WeierstrassProduct(1)
    M = W._choose(abs(x), lambda T, M: T <= ec.target, ec)
    S1, d1 = W._exp_part(x, M, ec.mp, ec.target / (M + 1))
    S2, d2 = W._exp_part_fast(x, M, ec.mp)
    assert abs(S1 - S2) <= d1 + d2 + ec.mp.ldexp(1, -ec.mp.prec // 2)


def test_power_sum_path_declines_huge_arguments():
    ec = EvalContext(64)
    W = WeierstrassProduct(1)
    x = F(3001, 3)
    M = W._choose(abs(x), lambda T, M: T <= ec.target, ec)
    assert W._exp_part_fast(x, M, ec.mp) is None
