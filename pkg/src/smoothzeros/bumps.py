"""Exponential bump kernels on an interval or a ray.

``Phi_{a,b}(x) = exp(-1/(x-a)^2 - 1/(x-b)^2)`` on ``(a, b)`` and zero
elsewhere; an infinite endpoint drops its term.  Derivatives are available
through two independent routes:

* :func:`phi_jet` composes numkit jets (reciprocal, product, exp);
* :func:`phi_deriv_recurrence` uses the exact Laurent polynomial ``R_k`` with
  ``Phi^(k) = R_k * Phi``, ``R_0 = 1`` and ``R_{k+1} = R_k' + R_k * u'`` where
  ``u`` is the exponent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import MPContext

from .errors import InputError
from .numkit import (
    EXP_ARGUMENT_LIMIT,
    GUARD_FACTOR,
    Jet,
    exact,
    jet_exp,
    jet_mul,
    jet_recip,
    to_mpf,
    working_context,
    zero_jet,
)
from .zeroset import INF, format_endpoint, _endpoint

UNDERFLOW_TO_ZERO = "UnderflowToZero"


@dataclass(frozen=True)
class BumpKernel:
    a: Fraction | float
    b: Fraction | float

    def __post_init__(self):
        object.__setattr__(self, "a", _endpoint(self.a))
        object.__setattr__(self, "b", _endpoint(self.b))
        if not self.a < self.b:
            raise InputError(f"bump needs a < b, got ({self.a}, {self.b})")
        if self.a == -INF and self.b == INF:
            raise InputError("bump needs at least one finite endpoint")

    @property
    def has_left(self) -> bool:
        return self.a != -INF

    @property
    def has_right(self) -> bool:
        return self.b != INF

    def inside(self, x: Fraction) -> bool:
        return self.a < x < self.b

    def exponent(self, x: Fraction) -> Fraction:
        """Exact exponent ``-1/(x-a)^2 - 1/(x-b)^2`` at an interior point."""
        u = Fraction(0)
        if self.has_left:
            u -= 1 / (x - self.a) ** 2
        if self.has_right:
            u -= 1 / (x - self.b) ** 2
        return u

    def to_dict(self) -> dict:
        return {"a": format_endpoint(self.a), "b": format_endpoint(self.b)}

    def __str__(self):
        return f"Phi[{format_endpoint(self.a)},{format_endpoint(self.b)}]"


def phi_value(K: BumpKernel, x, mp: MPContext) -> tuple:
    """``(value, annotations)``; value is the exact zero off the open support."""
    x = exact(x)
    if not K.inside(x):
        return mp.mpf(0), ()
    u = K.exponent(x)
    if u < -EXP_ARGUMENT_LIMIT:
        return mp.mpf(0), (UNDERFLOW_TO_ZERO,)
    return mp.exp(to_mpf(mp, u)), ()


def phi_eval(K: BumpKernel, x, mp: MPContext | None = None):
    return phi_value(K, x, mp or working_context())[0]


def _shift_jet(d: Fraction, N: int, mp: MPContext, x0: Fraction) -> Jet:
    z = mp.mpf(0)
    coeffs = [to_mpf(mp, d)] + [z] * N
    if N >= 1:
        coeffs[1] = mp.mpf(1)
    return Jet(x0, tuple(coeffs), (z,) * (N + 1), mp)


def phi_jet(K: BumpKernel, x0, N: int, mp: MPContext | None = None) -> Jet:
    """Order-``N`` jet; exactly zero off the open support and at endpoints."""
    mp = mp or working_context()
    x0 = exact(x0)
    if N < 0:
        raise InputError("jet order must be nonnegative")
    if not K.inside(x0):
        return zero_jet(x0, N, mp)
    u_exact = K.exponent(x0)
    if u_exact < -EXP_ARGUMENT_LIMIT:
        return zero_jet(x0, N, mp)
    u = None
    for endpoint in (K.a, K.b):
        if endpoint in (INF, -INF):
            continue
        inv = jet_recip(_shift_jet(x0 - endpoint, N, mp, x0))
        term = jet_mul(inv, inv)
        u = term if u is None else u + term
    u = -u
    coeffs = list(u.coeffs)
    coeffs[0] = to_mpf(mp, u_exact)
    return jet_exp(u._replace(coeffs, u.tail))


@dataclass(frozen=True)
class RationalDerivativeForm:
    """``Phi^(k) = R_k(s, t) * Phi`` with ``s = x-a``, ``t = x-b``.

    ``terms`` maps exponent pairs ``(i, j)`` (possibly negative) to exact
    integer coefficients; an absent endpoint contributes exponent 0 only.
    """

    k: int
    terms: dict
    has_left: bool
    has_right: bool

    def numerator(self) -> dict:
        """Coefficients of ``P_k = R_k * s^(3k) * t^(3k)`` (absent variables untouched)."""
        ds = 3 * self.k if self.has_left else 0
        dt = 3 * self.k if self.has_right else 0
        return {(i + ds, j + dt): c for (i, j), c in self.terms.items()}

    def is_symmetric(self) -> bool:
        p = self.numerator()
        return all(p.get((j, i), 0) == c for (i, j), c in p.items())

    def evaluate(self, s, t, mp: MPContext):
        total = mp.mpf(0)
        for (i, j), c in sorted(self.terms.items()):
            term = mp.mpf(c)
            if i:
                term *= s**i
            if j:
                term *= t**j
            total += term
        return total


@lru_cache(maxsize=None)
def _laurent_chain(has_left: bool, has_right: bool, k: int) -> tuple:
    if k == 0:
        return (((0, 0), 1),)
    prev = dict(_laurent_chain(has_left, has_right, k - 1))
    out: dict = {}

    def add(key, c):
        v = out.get(key, 0) + c
        if v:
            out[key] = v
        else:
            out.pop(key, None)

    for (i, j), c in prev.items():
        if i:
            add((i - 1, j), i * c)
        if j:
            add((i, j - 1), j * c)
        if has_left:
            add((i - 3, j), 2 * c)
        if has_right:
            add((i, j - 3), 2 * c)
    return tuple(sorted(out.items()))


def rational_form(K: BumpKernel, k: int) -> RationalDerivativeForm:
    if k < 0:
        raise InputError("derivative order must be nonnegative")
    terms = dict(_laurent_chain(K.has_left, K.has_right, k))
    return RationalDerivativeForm(k, terms, K.has_left, K.has_right)


def phi_deriv_recurrence(K: BumpKernel, k: int, x, mp: MPContext | None = None):
    """``Phi^(k)(x)`` through the exact rational form (interior points only)."""
    mp = mp or working_context()
    x = exact(x)
    if not K.inside(x):
        raise InputError(f"{x} is not strictly inside the support of {K}")
    form = rational_form(K, k)
    s = to_mpf(mp, x - K.a) if K.has_left else mp.mpf(1)
    t = to_mpf(mp, x - K.b) if K.has_right else mp.mpf(1)
    return form.evaluate(s, t, mp) * phi_eval(K, x, mp)


def _sup_power_exp(e: int, lo, hi, mp: MPContext):
    """``sup |y|^e exp(-1/y^2)`` over ``lo <= |y| <= hi`` (``lo`` may be 0)."""

    def g(y):
        if y == 0:
            return mp.mpf(0)
        return y**e * mp.exp(-1 / y**2)

    if e >= 0:
        return g(hi)
    peak = mp.sqrt(mp.mpf(2) / -e)
    return g(min(max(peak, lo), hi))


def flatness_bound(K: BumpKernel, k: int, delta, mp: MPContext | None = None):
    """Upper bound for ``sup |Phi^(k-1)(x)| / (x-a)`` over ``a < x < a + delta``.

    Each Laurent term of ``R_{k-1}`` is bounded by splitting
    ``exp(-1/s^2 - 1/t^2)`` between the ``s`` and ``t`` factors and
    maximising ``y^e exp(-1/y^2)`` on the reachable range of each.
    """
    mp = mp or working_context()
    if k < 1:
        raise InputError("flatness order k must be >= 1")
    if not K.has_left:
        raise InputError("flatness bound needs a finite left endpoint")
    delta = exact(delta)
    if delta <= 0:
        raise InputError("delta must be positive")
    span = K.b - K.a if K.has_right else None
    reach = delta if span is None else min(delta, span)
    reach_m = to_mpf(mp, reach)
    form = rational_form(K, k - 1)
    total = mp.mpf(0)
    for (i, j), c in form.terms.items():
        bound = abs(c) * _sup_power_exp(i - 1, mp.mpf(0), reach_m, mp)
        if K.has_right:
            hi = to_mpf(mp, span)
            lo = to_mpf(mp, span - reach)
            bound *= _sup_power_exp(j, lo, hi, mp)
        total += bound
    # rounding is not tracked; inflate by one unit at the exported precision
    return total * (1 + mp.ldexp(1, -getattr(mp, "export_bits", mp.prec // GUARD_FACTOR)))


__all__ = [
    "BumpKernel",
    "RationalDerivativeForm",
    "UNDERFLOW_TO_ZERO",
    "flatness_bound",
    "phi_deriv_recurrence",
    "phi_eval",
    "phi_jet",
    "phi_value",
    "rational_form",
]
