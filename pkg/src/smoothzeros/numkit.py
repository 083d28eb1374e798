"""Arbitrary-precision scalars and truncated Taylor jets.

Real numbers are :mod:`mpmath` ``mpf`` values living in a private
``MPContext``; every evaluation owns its context, so independent evaluations
can run on different threads.  Points at which functions are evaluated are
exact rationals (:class:`fractions.Fraction`); this keeps membership tests and
"outside the support" decisions bit-exact.

A :class:`Jet` stores Taylor coefficients ``f^(k)(x0)/k!`` together with a
per-coefficient bound on the truncation error inherited from series
evaluation.  Rounding error is not tracked; it is controlled by running at
``GUARD_FACTOR`` times the requested precision and checked with
:func:`doubling_check`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
from mpmath import MPContext

from .errors import ExponentOverflow, InputError, PoleAtExpansionPoint

DEFAULT_PRECISION = 256
GUARD_FACTOR = 4
# exp() arguments beyond this magnitude are refused (overflow) or flushed (underflow)
EXP_ARGUMENT_LIMIT = 2**80


def working_context(precision_bits: int = DEFAULT_PRECISION) -> MPContext:
    """Fresh context running at ``GUARD_FACTOR * precision_bits`` bits."""
    if precision_bits < 8:
        raise InputError(f"precision must be at least 8 bits, got {precision_bits}")
    ctx = MPContext()
    ctx.prec = GUARD_FACTOR * int(precision_bits)
    ctx.export_bits = int(precision_bits)
    return ctx


def exact(x) -> Fraction:
    """Convert a point description to an exact rational.

    Accepts ints, Fractions, finite floats, ``mpf`` values (dyadic, hence
    exact) and strings ``"p/q"`` or decimal literals such as ``"0.4"``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InputError("booleans are not points")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise InputError(f"non-finite point {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        try:
            if "/" in s:
                num, den = s.split("/")
                return Fraction(int(num), int(den))
            return Fraction(Decimal(s))
        except (ValueError, ArithmeticError, ZeroDivisionError) as exc:
            raise InputError(f"not an exact rational: {x!r}") from exc
    if hasattr(x, "_mpf_"):
        sign, man, exp, _ = x._mpf_
        if not man and exp:
            raise InputError(f"non-finite point {x!r}")
        value = Fraction(int(man)) * (Fraction(2) ** exp)
        return -value if sign else value
    raise InputError(f"cannot interpret {x!r} as an exact point")


def to_mpf(ctx: MPContext, q) -> mpmath.mpf:
    """Round an exact rational (or int) into ``ctx``."""
    q = exact(q)
    if q.denominator == 1:
        return ctx.mpf(q.numerator)
    return ctx.mpf(q.numerator) / q.denominator


def ulp_scale(ctx: MPContext) -> mpmath.mpf:
    return ctx.ldexp(ctx.mpf(1), -ctx.prec)


def format_number(value, bits: int) -> str:
    """Decimal rendering with the round-trip digit count for ``bits``."""
    digits = math.ceil(bits * math.log10(2)) + 1
    return mpmath.nstr(value, digits, strip_zeros=False, min_fixed=-8, max_fixed=12)


@dataclass(frozen=True)
class Jet:
    """Order-``N`` Taylor jet at the exact point ``x0``."""

    x0: Fraction
    coeffs: tuple
    tail: tuple
    mp: MPContext

    def __post_init__(self):
        if len(self.coeffs) != len(self.tail):
            raise ValueError("coefficient and tail vectors differ in length")
        if not self.coeffs:
            raise ValueError("a jet needs at least the order-0 coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_exact(self) -> bool:
        return not any(self.tail)

    @property
    def is_zero(self) -> bool:
        """True for the exact zero jet (all coefficients and bounds zero)."""
        return self.is_exact and not any(self.coeffs)

    def derivative(self, k: int):
        """Raw derivative ``f^(k)(x0)``."""
        return self.coeffs[k] * math.factorial(k)

    def __add__(self, other):
        if isinstance(other, Jet):
            _check_compatible(self, other)
            return self._replace(
                [a + b for a, b in zip(self.coeffs, other.coeffs)],
                [a + b for a, b in zip(self.tail, other.tail)],
            )
        coeffs = list(self.coeffs)
        coeffs[0] = coeffs[0] + other
        return self._replace(coeffs, self.tail)

    __radd__ = __add__

    def __neg__(self):
        return self._replace([-c for c in self.coeffs], self.tail)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            return jet_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c):
        c = self.mp.mpf(c) if not hasattr(c, "_mpf_") else c
        return self._replace([c * a for a in self.coeffs], [abs(c) * t for t in self.tail])

    def _replace(self, coeffs, tail):
        return Jet(self.x0, tuple(coeffs), tuple(tail), self.mp)


def make_jet(coeffs: Sequence, x0=0, tail: Sequence | None = None, mp: MPContext | None = None) -> Jet:
    mp = mp or working_context()
    cs = tuple(to_mpf(mp, c) if not hasattr(c, "_mpf_") else mp.mpf(c) for c in coeffs)
    ts = tuple(mp.mpf(0) for _ in cs) if tail is None else tuple(mp.mpf(t) for t in tail)
    return Jet(exact(x0), cs, ts, mp)


def zero_jet(x0, N: int, mp: MPContext) -> Jet:
    z = mp.mpf(0)
    return Jet(exact(x0), (z,) * (N + 1), (z,) * (N + 1), mp)


def const_jet(c, x0, N: int, mp: MPContext) -> Jet:
    z = mp.mpf(0)
    c = c if hasattr(c, "_mpf_") else to_mpf(mp, c)
    return Jet(exact(x0), (c,) + (z,) * N, (z,) * (N + 1), mp)


def jet_var(x0, N: int, mp: MPContext | None = None) -> Jet:
    """Jet of the identity function at ``x0``."""
    if N < 0:
        raise InputError("jet order must be nonnegative")
    mp = mp or working_context()
    q = exact(x0)
    z = mp.mpf(0)
    coeffs = [to_mpf(mp, q)] + [z] * N
    if N >= 1:
        coeffs[1] = mp.mpf(1)
    return Jet(q, tuple(coeffs), (z,) * (N + 1), mp)


def _check_compatible(a: Jet, b: Jet) -> None:
    if a.x0 != b.x0:
        raise InputError(f"jets expanded at different points {a.x0} and {b.x0}")
    if a.order != b.order:
        raise InputError(f"jets of different orders {a.order} and {b.order}")


def _cauchy(a: Sequence, b: Sequence, zero) -> list:
    n = len(a)
    out = []
    for k in range(n):
        s = zero
        for i in range(k + 1):
            s += a[i] * b[k - i]
        out.append(s)
    return out


def _abs(seq):
    return [abs(c) for c in seq]


def jet_mul(a: Jet, b: Jet) -> Jet:
    """Cauchy product; truncation bounds combine by the triangle inequality."""
    _check_compatible(a, b)
    zero = a.mp.mpf(0)
    coeffs = _cauchy(a.coeffs, b.coeffs, zero)
    if a.is_exact and b.is_exact:
        tail = [zero] * len(coeffs)
    else:
        t1 = _cauchy(_abs(a.coeffs), b.tail, zero)
        t2 = _cauchy(a.tail, _abs(b.coeffs), zero)
        t3 = _cauchy(a.tail, b.tail, zero)
        tail = [x + y + z for x, y, z in zip(t1, t2, t3)]
    return a._replace(coeffs, tail)


def _recip_coeffs(a: Sequence, mp: MPContext) -> list:
    inv0 = 1 / a[0]
    out = [inv0]
    for k in range(1, len(a)):
        s = mp.mpf(0)
        for i in range(1, k + 1):
            s += a[i] * out[k - i]
        out.append(-s * inv0)
    return out


def jet_recip(a: Jet) -> Jet:
    """Jet of ``1/a`` by the division recurrence."""
    mp = a.mp
    if a.coeffs[0] == 0 or abs(a.coeffs[0]) <= a.tail[0]:
        raise PoleAtExpansionPoint(f"leading coefficient not certifiably nonzero at x0={a.x0}")
    coeffs = _recip_coeffs(a.coeffs, mp)
    zero = mp.mpf(0)
    if a.is_exact:
        tail = [zero] * len(coeffs)
    else:
        # 1/(â+d) - 1/â = â^{-1} * sum_{m>=1} (-d/â)^m, majorised coefficientwise
        u = _cauchy(_abs(coeffs), a.tail, zero)
        if u[0] >= 1:
            raise PoleAtExpansionPoint(f"truncation bound swamps the leading coefficient at x0={a.x0}")
        one_minus_u = [1 - u[0]] + [-c for c in u[1:]]
        geom = _recip_coeffs(one_minus_u, mp)
        geom[0] -= 1
        tail = _cauchy(_abs(coeffs), geom, zero)
    return a._replace(coeffs, tail)


def _exp_coeffs(a: Sequence, mp: MPContext) -> list:
    a0 = a[0]
    if abs(a0) > EXP_ARGUMENT_LIMIT:
        raise ExponentOverflow(f"exp argument {mpmath.nstr(a0, 8)} outside the supported range")
    out = [mp.exp(a0)]
    n = len(a)
    # (exp a)' = a' exp a  =>  k e_k = sum_{j=1..k} j a_j e_{k-j}
    for k in range(1, n):
        s = mp.mpf(0)
        for j in range(1, k + 1):
            s += j * a[j] * out[k - j]
        out.append(s / k)
    return out


def _exp_minus_one_majorant(tail: Sequence, mp: MPContext) -> list:
    m = _exp_coeffs(tail, mp)
    m[0] -= 1
    return m


def jet_exp(a: Jet) -> Jet:
    mp = a.mp
    coeffs = _exp_coeffs(a.coeffs, mp)
    zero = mp.mpf(0)
    if a.is_exact:
        tail = [zero] * len(coeffs)
    else:
        tail = _cauchy(_abs(coeffs), _exp_minus_one_majorant(a.tail, mp), zero)
    return a._replace(coeffs, tail)


def jet_sin_cos(a: Jet) -> tuple[Jet, Jet]:
    """Simultaneous jets of ``sin(a)`` and ``cos(a)``."""
    mp = a.mp
    s = [mp.sin(a.coeffs[0])]
    c = [mp.cos(a.coeffs[0])]
    for k in range(1, a.order + 1):
        ss = mp.mpf(0)
        cc = mp.mpf(0)
        for j in range(1, k + 1):
            ss += j * a.coeffs[j] * c[k - j]
            cc += j * a.coeffs[j] * s[k - j]
        s.append(ss / k)
        c.append(-cc / k)
    zero = mp.mpf(0)
    if a.is_exact:
        ts = tc = [zero] * len(s)
    else:
        # |sin(x+d) - sin x| <= (|sin x| + |cos x|) * (exp|d| - 1), same for cos
        m = _exp_minus_one_majorant(a.tail, mp)
        both = [abs(x) + abs(y) for x, y in zip(s, c)]
        ts = tc = _cauchy(both, m, zero)
    return a._replace(s, ts), a._replace(c, tc)


def jet_pow_int(a: Jet, m: int) -> Jet:
    if m < 1:
        raise InputError(f"jet_pow_int needs m >= 1, got {m}")
    result = None
    base = a
    while m:
        if m & 1:
            result = base if result is None else jet_mul(result, base)
        m >>= 1
        if m:
            base = jet_mul(base, base)
    return result


def jet_integral(a: Jet, constant) -> Jet:
    """Jet of an antiderivative whose value at x0 is ``constant``.

    The result has order ``a.order + 1``.
    """
    mp = a.mp
    c0 = constant if hasattr(constant, "_mpf_") else to_mpf(mp, constant)
    coeffs = [c0] + [a.coeffs[k] / (k + 1) for k in range(a.order + 1)]
    tail = [mp.mpf(0)] + [a.tail[k] / (k + 1) for k in range(a.order + 1)]
    return a._replace(coeffs, tail)


def truncate(a: Jet, N: int) -> Jet:
    if N > a.order:
        raise InputError(f"cannot extend a jet of order {a.order} to {N}")
    return a._replace(a.coeffs[: N + 1], a.tail[: N + 1])


def doubling_check(fn: Callable[[MPContext], object], precision_bits: int) -> tuple[bool, object]:
    """Evaluate ``fn`` at ``p`` and ``2p`` bits and compare.

    Passes when the two results differ by less than ``2^(-p/2)`` relative to
    ``max(1, |value|)``.  Returns ``(ok, difference)``.
    """
    lo = fn(working_context(precision_bits))
    hi = fn(working_context(2 * precision_bits))
    ref = working_context(2 * precision_bits)
    diff = abs(ref.mpf(hi) - ref.mpf(lo))
    scale = max(ref.mpf(1), abs(ref.mpf(hi)))
    return bool(diff < scale * ref.ldexp(1, -precision_bits // 2)), diff
