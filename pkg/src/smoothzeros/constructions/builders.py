"""Builders turning a zero set into an expression with exactly that zero set."""

from __future__ import annotations

import math
from fractions import Fraction

from ..errors import (
    AccumulationPointPresent,
    InputError,
    InteriorNotEmpty,
    NotRepresentableAsEntire,
    PreconditionViolation,
    UnsupportedZeroSet,
)
from ..numkit import Jet, exact
from ..zeroset import (
    INF,
    EmptySet,
    FiniteSet,
    FullLine,
    IntegerLattice,
    IntervalUnion,
    ZeroSetSpec,
    classify,
)
from .context import EvalContext, Evaluation
from .nodes import (
    BumpSum,
    Const,
    Entire,
    ExpAffine,
    FnExpr,
    LerchSeries,
    PringsheimSeries,
    Primitive,
    Product,
    Shift,
)
from .weierstrass import WeierstrassProduct

# Suprema are rounded up onto this decimal grid so shifts are exact rationals
# and independent of the caller's precision.
SHIFT_DIGITS = 40
_SHIFT_PRECISION = 256


def build_lerch(a: int = 3) -> LerchSeries:
    return LerchSeries(a)


def build_pringsheim_g(K: int | None = None) -> PringsheimSeries:
    return PringsheimSeries(K)


def sup_bound(expr: FnExpr, ec: EvalContext | None = None):
    if not isinstance(expr, (LerchSeries, PringsheimSeries)):
        raise InputError(f"sup_bound supports Lerch and Pringsheim series, not {expr.node}")
    return expr.sup_bound(ec or EvalContext())


def certified_shift(expr: FnExpr) -> Fraction:
    """``1 + sup|expr|`` rounded up to an exact decimal rational."""
    ec = EvalContext(_SHIFT_PRECISION)
    s = sup_bound(expr, ec)
    man, exp = ec.mp.mpf(s).man_exp
    q = Fraction(man) * Fraction(2) ** exp
    scale = 10**SHIFT_DIGITS
    return 1 + Fraction(math.ceil(q * scale), scale)


def _whole_line(Z: ZeroSetSpec) -> bool:
    if isinstance(Z, FullLine):
        return True
    return isinstance(Z, IntervalUnion) and any(lo == -INF and hi == INF for lo, hi in Z.intervals)


def _finite_points(Z: ZeroSetSpec):
    if isinstance(Z, FiniteSet):
        return Z.points
    if isinstance(Z, IntervalUnion) and all(lo == hi for lo, hi in Z.intervals):
        return tuple(lo for lo, _ in Z.intervals)
    return None


def build_smooth(Z: ZeroSetSpec) -> FnExpr:
    if isinstance(Z, EmptySet):
        return Const(1)
    if _whole_line(Z):
        return Const(0)
    if not classify(Z).smooth_exact_possible:
        raise PreconditionViolation("smooth construction needs a closed set", "bump sum over the gaps")
    if not Z.resolvable:
        raise UnsupportedZeroSet(f"{Z.kind} sets cannot be resolved into finitely described gaps")
    return BumpSum(Z)


def poly_from_roots(points) -> Entire:
    coeffs = [Fraction(1)]
    for r in points:
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] += c
            nxt[i] -= r * c
        coeffs = nxt
    return Entire(tuple(coeffs))


def build_entire(Z: ZeroSetSpec) -> FnExpr:
    if _whole_line(Z):
        return Const(0)
    if not classify(Z).entire_exact_possible:
        raise NotRepresentableAsEntire(
            "an entire function's zero set is the whole line or has no accumulation point",
            "Weierstrass factorization",
        )
    if isinstance(Z, EmptySet):
        return Const(1)
    pts = _finite_points(Z)
    if pts is not None:
        return poly_from_roots(pts)
    if isinstance(Z, IntegerLattice):
        return WeierstrassProduct(Z.step)
    raise UnsupportedZeroSet(f"no entire construction for {Z.kind} sets")


def build_singular(Z: ZeroSetSpec, base: int = 3) -> FnExpr:
    if not classify(Z).singular_exact_possible:
        raise InteriorNotEmpty(
            "nowhere-analytic construction needs a closed set with empty interior",
            "Lerch factor times bump sum",
        )
    lerch = build_lerch(base)
    phi = Shift(lerch, certified_shift(lerch))
    if isinstance(Z, EmptySet):
        return phi
    return Product((phi, build_smooth(Z)))


def build_pringsheim_zero(Z: ZeroSetSpec, K: int | None = None) -> FnExpr:
    if not classify(Z).pringsheim_exact_possible:
        raise AccumulationPointPresent(
            "Pringsheim-singular construction needs a set without accumulation points",
            "shifted g times an entire function",
        )
    g = build_pringsheim_g(K)
    h = Shift(g, certified_shift(PringsheimSeries()))
    if isinstance(Z, EmptySet):
        return h
    return Product((h, build_entire(Z)))


def parse_phi(phi) -> FnExpr:
    """Multiplier from the catalog: coefficient list (ascending) or ``"exp:c"``."""
    if isinstance(phi, FnExpr):
        return phi
    if isinstance(phi, str) and phi.startswith("exp:"):
        return ExpAffine(phi[4:], 0, Entire((0, 1)))
    if isinstance(phi, (int, Fraction, str)):
        phi = [phi]
    e = Entire(tuple(exact(c) for c in phi))
    if e.coeffs == (0,):
        raise InputError("the multiplier must be a nonzero entire function")
    return e


def lineable_family_member(Z: ZeroSetSpec, phi, K: int | None = None) -> FnExpr:
    base = build_pringsheim_zero(Z, K)
    mult = parse_phi(phi)
    if isinstance(mult, Entire) and mult.coeffs == (1,):
        return base
    return Product((base, mult))


def monotone_primitive(h: FnExpr, basepoint=0, ec: EvalContext | None = None, method: str = "auto") -> Primitive:
    lb = h.lower_bound(ec or EvalContext())
    if lb is None or lb <= 0:
        raise PreconditionViolation("integrand lacks a certified positive lower bound", "monotone primitive")
    return Primitive(h, exact(basepoint), method)


def evaluate(expr: FnExpr, x, ec: EvalContext | None = None) -> Evaluation:
    return expr.evaluate(exact(x), ec or EvalContext())


def jet(expr: FnExpr, x0, N: int, ec: EvalContext | None = None) -> Jet:
    if N < 0:
        raise InputError("jet order must be nonnegative")
    return expr.jet(exact(x0), N, ec or EvalContext())
