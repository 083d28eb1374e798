from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smoothzeros.errors import ExponentOverflow, InputError, PoleAtExpansionPoint
from smoothzeros.numkit import (
    Jet,
    const_jet,
    doubling_check,
    exact,
    format_number,
    jet_exp,
    jet_integral,
    jet_mul,
    jet_pow_int,
    jet_recip,
    jet_sin_cos,
    jet_var,
    make_jet,
    to_mpf,
    truncate,
    working_context,
    zero_jet,
)

small = st.fractions(min_value=-3, max_value=3, max_denominator=50)
coeff_lists = st.lists(st.integers(-20, 20), min_size=1, max_size=7)


def test_working_context_guard_bits():
    ctx = working_context(100)
    assert ctx.prec == 400
    assert ctx.export_bits == 100
    with pytest.raises(InputError):
        working_context(2)


@pytest.mark.parametrize(
    "raw, expected",
    [(3, Fraction(3)), ("1/3", Fraction(1, 3)), ("0.4", Fraction(2, 5)), (0.5, Fraction(1, 2)), ("-7/2", Fraction(-7, 2))],
)
def test_exact_conversions(raw, expected):
    assert exact(raw) == expected


def test_exact_from_mpf_is_bit_exact():
    ctx = working_context(64)
    v = ctx.mpf(1) / 3
    q = exact(v)
    assert ctx.mpf(q.numerator) / q.denominator == v


@pytest.mark.parametrize("bad", ["x", "1/0", float("nan"), True, None])
def test_exact_rejects(bad):
    with pytest.raises(InputError):
        exact(bad)


def test_jet_var_and_constant():
    ctx = working_context(64)
    x = jet_var(Fraction(1, 2), 3, ctx)
    assert x.coeffs == (ctx.mpf(0.5), 1, 0, 0)
    c = const_jet(7, 0, 2, ctx)
    assert c.coeffs == (7, 0, 0) and c.is_exact


def test_zero_jet_is_zero():
    z = zero_jet(0, 4, working_context(64))
    assert z.is_zero and z.order == 4


def test_mul_is_cauchy_product():
    ctx = working_context(64)
    a = make_jet([1, 2, 3], mp=ctx)
    b = make_jet([4, 5, 6], mp=ctx)
    assert jet_mul(a, b).coeffs == (4, 13, 28)


def test_mismatched_jets_rejected():
    ctx = working_context(64)
    with pytest.raises(InputError):
        jet_mul(make_jet([1, 2], 0, mp=ctx), make_jet([1, 2], 1, mp=ctx))
    with pytest.raises(InputError):
        jet_mul(make_jet([1, 2], mp=ctx), make_jet([1, 2, 3], mp=ctx))


@given(coeff_lists, coeff_lists)
def test_mul_commutes(a, b):
    ctx = working_context(64)
    n = min(len(a), len(b))
    ja, jb = make_jet(a[:n], mp=ctx), make_jet(b[:n], mp=ctx)
    assert jet_mul(ja, jb).coeffs == jet_mul(jb, ja).coeffs


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=6).filter(lambda c: c[0] != 0))
def test_recip_inverts(cs):
    ctx = working_context(64)
    a = make_jet(cs, mp=ctx)
    prod = jet_mul(a, jet_recip(a))
    assert abs(prod.coeffs[0] - 1) < ctx.mpf(2) ** -200
    for c in prod.coeffs[1:]:
        assert abs(c) < ctx.mpf(2) ** -180 * max(1, max(abs(x) for x in cs)) ** len(cs)


def test_recip_pole():
    ctx = working_context(64)
    with pytest.raises(PoleAtExpansionPoint):
        jet_recip(make_jet([0, 1], mp=ctx))
    with pytest.raises(PoleAtExpansionPoint):
        jet_recip(make_jet([1, 1], tail=[2, 0], mp=ctx))


@settings(max_examples=30)
@given(small)
def test_exp_matches_mpmath_taylor(x0):
    ctx = working_context(64)
    j = jet_exp(jet_var(x0, 5, ctx).scale(2))
    ref = mpmath.taylor(lambda t: mpmath.exp(2 * t), float(x0), 5)
    for got, want in zip(j.coeffs, ref):
        assert abs(got - want) <= 1e-12 * max(1, abs(want))


def test_exp_overflow():
    ctx = working_context(64)
    with pytest.raises(ExponentOverflow):
        jet_exp(const_jet(2**81, 0, 1, ctx))


@settings(max_examples=30)
@given(small)
def test_sin_cos_pythagoras(x0):
    ctx = working_context(64)
    s, c = jet_sin_cos(jet_var(x0, 6, ctx))
    one = jet_mul(s, s) + jet_mul(c, c)
    assert abs(one.coeffs[0] - 1) < ctx.mpf(2) ** -200
    assert all(abs(v) < ctx.mpf(2) ** -200 for v in one.coeffs[1:])


def test_sin_cos_values_at_zero():
    ctx = working_context(64)
    s, c = jet_sin_cos(jet_var(0, 5, ctx))
    assert [float(v) for v in s.coeffs] == pytest.approx([0, 1, 0, -1 / 6, 0, 1 / 120])
    assert [float(v) for v in c.coeffs] == pytest.approx([1, 0, -0.5, 0, 1 / 24, 0])


def test_pow_int_binomial():
    ctx = working_context(64)
    j = jet_pow_int(make_jet([1, 1, 0, 0, 0], mp=ctx), 4)
    assert j.coeffs == (1, 4, 6, 4, 1)
    with pytest.raises(InputError):
        jet_pow_int(j, 0)


def test_integral_and_truncate():
    ctx = working_context(64)
    j = jet_integral(make_jet([1, 2, 3], mp=ctx), 5)
    assert j.coeffs == (5, 1, 1, 1)
    assert truncate(j, 1).coeffs == (5, 1)
    with pytest.raises(InputError):
        truncate(j, 9)


def test_tails_propagate_through_mul():
    ctx = working_context(64)
    a = make_jet([2, 1], tail=[ctx.mpf("1e-10"), 0], mp=ctx)
    b = make_jet([3, 0], mp=ctx)
    t = jet_mul(a, b).tail
    assert t[0] == 3 * ctx.mpf("1e-10") and t[1] == 0


def test_exp_tail_majorant_is_sound(mp):
    # perturb the argument by its tail and check the reported bound covers it
    d = mp.mpf("1e-20")
    a = make_jet([1, 1, 0], tail=[d, 0, 0], mp=mp)
    e = jet_exp(a)
    shifted = jet_exp(make_jet([1 + d, 1, 0], mp=mp))
    for x, y, t in zip(e.coeffs, shifted.coeffs, e.tail):
        assert abs(x - y) <= t


def test_derivative_scaling():
    ctx = working_context(64)
    j = Jet(Fraction(0), (ctx.mpf(1), ctx.mpf(1), ctx.mpf(0.5)), (ctx.mpf(0),) * 3, ctx)
    assert j.derivative(2) == 1


def test_doubling_check():
    ok, diff = doubling_check(lambda ctx: ctx.exp(ctx.mpf(1)), 64)
    assert ok and diff < 2.0**-200
    bad, _ = doubling_check(lambda ctx: ctx.mpf(ctx.prec), 64)
    assert not bad


def test_format_number_round_trips():
    ctx = working_context(64)
    v = ctx.mpf(1) / 3
    text = format_number(v, 64)
    assert abs(ctx.mpf(text) - v) < ctx.mpf(2) ** -63


def test_to_mpf_rounds_rationals():
    ctx = working_context(64)
    assert to_mpf(ctx, Fraction(1, 4)) == ctx.mpf(0.25)
