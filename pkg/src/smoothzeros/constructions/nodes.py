"""Expression DAG over the construction primitives.

Every node evaluates to a value with a certified truncation bound and to a
Taylor jet of any order with per-coefficient bounds.  Points are exact
rationals; an exact zero (value 0 with bound 0) propagates through products
and bump sums without any floating-point computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..bumps import BumpKernel, phi_jet, phi_value
from ..errors import InputError, PreconditionViolation, TailBoundUnachievable, UnsupportedZeroSet
from ..numkit import (
    Jet,
    const_jet,
    exact,
    jet_exp,
    jet_integral,
    jet_mul,
    jet_pow_int,
    to_mpf,
    zero_jet,
)
from ..zeroset import EmptySet, FullLine, ZeroSetSpec, format_endpoint
from .context import EvalContext, Evaluation, Rate, SeriesBound, exact_bound
from .series import bseq


def _fmt(q) -> str:
    return format_endpoint(q)


def _inflate(mp, v):
    """Nudge a bound upward by a few units of the working precision."""
    return v * (1 + mp.ldexp(1, 8 - mp.prec))


def _trig(mp, mult: int, x: Fraction):
    """``(sin(mult*x), cos(mult*x))`` with the huge argument formed exactly."""
    q = mult * x
    if q == 0:
        return mp.mpf(0), mp.mpf(1)
    extra = max(0, abs(q.numerator).bit_length() - q.denominator.bit_length()) + 32
    with mp.workprec(mp.prec + extra):
        arg = mp.mpf(q.numerator) / q.denominator
        s, c = mp.sin(arg), mp.cos(arg)
    return +s, +c


def _deriv_cycle(j: int, s, c, of_sin: bool):
    """j-th derivative of sin (or cos) expressed through the value pair."""
    if of_sin:
        return (s, c, -s, -c)[j % 4]
    return (c, -s, -c, s)[j % 4]


class FnExpr:
    """Base node.  Subclasses are frozen dataclasses."""

    node = ""
    cost = 0

    def evaluate(self, x, ec: EvalContext) -> Evaluation:
        j = self.jet(x, 0, ec)
        return Evaluation(j.coeffs[0], SeriesBound(None, j.tail[0], "jet order 0"))

    def jet(self, x0, N: int, ec: EvalContext) -> Jet:
        raise NotImplementedError

    def children(self) -> tuple:
        return ()

    def to_dict(self) -> dict:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    def sup_bound(self, ec: EvalContext):
        raise InputError(f"no certified uniform bound for {self.node} nodes")

    def lower_bound(self, ec: EvalContext):
        """Certified global infimum, or None."""
        return None

    def deriv_sup_bound(self, k: int, ec: EvalContext):
        """Certified bound on ``sup |f^(k)|`` over the line, or None."""
        return None

    def integral(self, lo: Fraction, hi: Fraction, ec: EvalContext):
        """``(value, tail)`` of the integral over ``[lo, hi]`` in closed form, or None."""
        return None

    def __str__(self):
        return self.describe()


@dataclass(frozen=True)
class Const(FnExpr):
    c: Fraction
    node = "Const"

    def __post_init__(self):
        object.__setattr__(self, "c", exact(self.c))

    def evaluate(self, x, ec):
        return Evaluation(to_mpf(ec.mp, self.c), exact_bound(ec.mp))

    def jet(self, x0, N, ec):
        return const_jet(self.c, x0, N, ec.mp)

    def sup_bound(self, ec):
        return abs(to_mpf(ec.mp, self.c))

    def lower_bound(self, ec):
        return to_mpf(ec.mp, self.c)

    def deriv_sup_bound(self, k, ec):
        return ec.mp.mpf(0) if k >= 1 else self.sup_bound(ec)

    def integral(self, lo, hi, ec):
        return to_mpf(ec.mp, self.c * (hi - lo)), ec.mp.mpf(0)

    def to_dict(self):
        return {"node": self.node, "c": _fmt(self.c)}

    def describe(self):
        return _fmt(self.c)


@dataclass(frozen=True)
class Entire(FnExpr):
    """Polynomial with exact rational coefficients, ascending powers."""

    coeffs: tuple
    node = "Entire"

    def __post_init__(self):
        cs = [exact(c) for c in self.coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs) or (Fraction(0),))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def exact_value(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def evaluate(self, x, ec):
        return Evaluation(to_mpf(ec.mp, self.exact_value(exact(x))), exact_bound(ec.mp))

    def taylor(self, x0: Fraction) -> list[Fraction]:
        n = len(self.coeffs)
        return [
            sum((math.comb(m, k) * self.coeffs[m] * x0 ** (m - k) for m in range(k, n)), Fraction(0))
            for k in range(n)
        ]

    def jet(self, x0, N, ec):
        x0 = exact(x0)
        t = self.taylor(x0)
        t = (t + [Fraction(0)] * (N + 1))[: N + 1]
        z = ec.mp.mpf(0)
        return Jet(x0, tuple(to_mpf(ec.mp, c) for c in t), (z,) * (N + 1), ec.mp)

    def deriv_sup_bound(self, k, ec):
        return ec.mp.mpf(0) if k > self.degree else None

    def integral(self, lo, hi, ec):
        anti = [Fraction(0)] + [c / (i + 1) for i, c in enumerate(self.coeffs)]
        F = Entire(tuple(anti))
        return to_mpf(ec.mp, F.exact_value(hi) - F.exact_value(lo)), ec.mp.mpf(0)

    def to_dict(self):
        return {"node": self.node, "coeffs": [_fmt(c) for c in self.coeffs]}

    def describe(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{_fmt(c)}" + ("" if i == 0 else "*x" if i == 1 else f"*x^{i}"))
        return "Poly(" + (" + ".join(terms) or "0") + ")"


@dataclass(frozen=True)
class Bump(FnExpr):
    kernel: BumpKernel
    node = "Bump"

    def evaluate(self, x, ec):
        v, notes = phi_value(self.kernel, x, ec.mp)
        return Evaluation(v, exact_bound(ec.mp), notes)

    def jet(self, x0, N, ec):
        return phi_jet(self.kernel, x0, N, ec.mp)

    def sup_bound(self, ec):
        return ec.mp.mpf(1)

    def to_dict(self):
        return {"node": self.node, "kernel": self.kernel.to_dict()}

    def describe(self):
        return str(self.kernel)


@dataclass(frozen=True)
class BumpSum(FnExpr):
    """Sum of one bump per complementary gap of ``Z``; vanishes exactly on ``Z``."""

    zeroset: ZeroSetSpec
    node = "BumpSum"

    def __post_init__(self):
        if not self.zeroset.resolvable:
            raise UnsupportedZeroSet(f"gaps of {self.zeroset.kind} are not finitely resolvable")
        if isinstance(self.zeroset, (EmptySet, FullLine)):
            raise UnsupportedZeroSet("bump sums need a nonempty proper closed set")

    def kernel_at(self, x) -> BumpKernel | None:
        gap = self.zeroset.locate_gap(exact(x))
        return None if gap is None else BumpKernel(gap.a, gap.b)

    def evaluate(self, x, ec):
        K = self.kernel_at(x)
        if K is None:
            return Evaluation(ec.mp.mpf(0), exact_bound(ec.mp, "point of Z"))
        v, notes = phi_value(K, x, ec.mp)
        return Evaluation(v, exact_bound(ec.mp), notes)

    def jet(self, x0, N, ec):
        K = self.kernel_at(x0)
        if K is None:
            return zero_jet(x0, N, ec.mp)
        return phi_jet(K, x0, N, ec.mp)

    def sup_bound(self, ec):
        return ec.mp.mpf(1)

    def to_dict(self):
        return {"node": self.node, "zeroset": self.zeroset.to_dict()}

    def describe(self):
        return f"BumpSum({self.zeroset.dumps()})"


@dataclass(frozen=True)
class LerchSeries(FnExpr):
    """``sum_{n>=1} cos(a^n x) / n!`` for odd ``a >= 3``."""

    base: int = 3
    terms: int | None = None
    node = "LerchSeries"
    cost = 10

    def __post_init__(self):
        if not isinstance(self.base, int) or self.base < 3 or self.base % 2 == 0:
            raise InputError(f"Lerch base must be an odd integer >= 3, got {self.base!r}")
        if self.terms is not None and self.terms < 1:
            raise InputError("Lerch truncation index must be >= 1")

    def _value_terms(self, ec) -> int:
        if self.terms is not None:
            return self.terms
        need = 2 << ec.mp.prec  # 2/(N+1)! <= 2^-prec
        N, f = 1, 2
        while f < need:
            N += 1
            f *= N + 1
        return N

    def evaluate(self, x, ec):
        mp = ec.mp
        x = exact(x)
        N = self._value_terms(ec)
        total = mp.mpf(0)
        inv_fact = mp.mpf(1)
        mult = 1
        for n in range(1, N + 1):
            mult *= self.base
            inv_fact /= n
            total += _trig(mp, mult, x)[1] * inv_fact
        tail = _inflate(mp, 2 / mp.factorial(N + 1))
        return Evaluation(total, SeriesBound(N, tail, "sum_{n>N} 1/n! <= 2/(N+1)!"))

    def _jet_terms(self, N: int, ec) -> int:
        if N > ec.lerch_order_cap:
            raise TailBoundUnachievable(
                f"Lerch jets are capped at order {ec.lerch_order_cap} (order-k tails need about {self.base}^k terms)"
            )
        mp = ec.mp
        a = self.base
        start = max(1, 2 * a**N - 2)  # ratio a^j/(M+2) <= 1/2 for every j <= N
        if self.terms is not None:
            if self.terms < start:
                raise TailBoundUnachievable(f"{self.terms} terms cannot certify an order-{N} Lerch tail")
            return self.terms
        target = ec.target
        with mp.workprec(64):
            log_target = mp.log(target)
            loga = mp.log(a)
            scales = [max(mp.mpf(0), mp.mpf(a) ** j - mp.loggamma(j + 1)) for j in range(N + 1)]
            M = start
            while True:
                worst = max(
                    mp.log(2) + (M + 1) * j * loga - mp.loggamma(M + 2) - mp.loggamma(j + 1) - scales[j]
                    for j in range(N + 1)
                )
                if worst <= log_target:
                    break
                M += max(1, M // 64)
                if M > ec.lerch_term_cap:
                    raise TailBoundUnachievable(
                        f"order-{N} Lerch jet needs more than {ec.lerch_term_cap} terms"
                    )
        return M

    def jet(self, x0, N, ec):
        mp = ec.mp
        x0 = exact(x0)
        M = self._jet_terms(N, ec)
        a = self.base
        coeffs = [mp.mpf(0)] * (N + 1)
        inv_fact = mp.mpf(1)
        mult = 1
        for n in range(1, M + 1):
            mult *= a
            inv_fact /= n
            s, c = _trig(mp, mult, x0)
            an = mp.mpf(mult)
            p = inv_fact
            for j in range(N + 1):
                coeffs[j] += _deriv_cycle(j, s, c, of_sin=False) * p
                p *= an
        tails = []
        for j in range(N + 1):
            coeffs[j] /= mp.factorial(j)
            tails.append(_inflate(mp, 2 * mp.mpf(a) ** ((M + 1) * j) / (mp.factorial(M + 1) * mp.factorial(j))))
        return Jet(x0, tuple(coeffs), tuple(tails), mp)

    def deriv_sup_bound(self, k, ec):
        mp = ec.mp
        return _inflate(mp, mp.expm1(mp.mpf(self.base) ** k))

    def sup_bound(self, ec):
        return self.deriv_sup_bound(0, ec)

    def integral(self, lo, hi, ec):
        mp = ec.mp
        N = self._value_terms(ec)
        total = mp.mpf(0)
        inv = mp.mpf(1)
        mult = 1
        for n in range(1, N + 1):
            mult *= self.base
            inv /= n * self.base
            total += (_trig(mp, mult, hi)[0] - _trig(mp, mult, lo)[0]) * inv
        tail = _inflate(mp, 4 / (mp.mpf(self.base) ** (N + 1) * mp.factorial(N + 1)))
        return total, tail

    def to_dict(self):
        d = {"node": self.node, "base": self.base}
        if self.terms is not None:
            d["terms"] = self.terms
        return d

    def describe(self):
        return f"Lerch(a={self.base})"


@dataclass(frozen=True)
class PringsheimSeries(FnExpr):
    """``g(x) = sum_{n>=1} b_n^(1-n) sin(b_n x)``.

    ``terms`` fixes the number of summed terms ``K``; ``None`` picks the
    smallest ``K`` meeting the working precision (capped by the context).
    Tails use ``b_{n+1} >= 2 b_n``, which makes successive tail terms shrink
    by at least 1/2.
    """

    terms: int | None = None
    node = "PringsheimSeries"
    cost = 10

    def __post_init__(self):
        if self.terms is not None and self.terms < 1:
            raise InputError("term count K must be >= 1")

    def _auto_terms(self, lowest: int, shift: int, ec) -> int:
        # tail ~ b_{K+1}^{shift-K}; b >= 2^(bitlen-1)
        for K in range(lowest, ec.g_term_cap + 1):
            if (bseq(K + 1).bit_length() - 1) * (K - shift) - 1 >= ec.mp.prec:
                return K
        return ec.g_term_cap

    def _terms_for(self, order: int, ec) -> int:
        need = order + 2 if order > 0 else 1
        if self.terms is not None:
            if self.terms < need:
                raise TailBoundUnachievable(f"order-{order} jets of g need K >= {need}, got K = {self.terms}")
            return self.terms
        if ec.g_term_cap < need:
            raise TailBoundUnachievable(f"order-{order} jets of g need K >= {need}; term cap is {ec.g_term_cap}")
        lowest = order + 3 if order > 0 else 1
        return self._auto_terms(min(lowest, ec.g_term_cap), order, ec)

    def _tail(self, K: int, j: int, ec):
        mp = ec.mp
        return _inflate(mp, 2 * mp.mpf(bseq(K + 1)) ** (j - K) / mp.factorial(j))

    def evaluate(self, x, ec):
        mp = ec.mp
        x = exact(x)
        K = self._terms_for(0, ec)
        total = mp.mpf(0)
        for n in range(1, K + 1):
            b = bseq(n)
            s = _trig(mp, b, x)[0]
            if s:
                total += s * mp.mpf(b) ** (1 - n)
        return Evaluation(total, SeriesBound(K, self._tail(K, 0, ec), "sum_{n>K} b_n^(1-n) <= 2 b_{K+1}^(-K)"))

    def jet(self, x0, N, ec):
        mp = ec.mp
        x0 = exact(x0)
        K = self._terms_for(N, ec)
        coeffs = [mp.mpf(0)] * (N + 1)
        for n in range(1, K + 1):
            b = bseq(n)
            s, c = _trig(mp, b, x0)
            bm = mp.mpf(b)
            p = bm ** (1 - n)
            for j in range(N + 1):
                d = _deriv_cycle(j, s, c, of_sin=True)
                if d:
                    coeffs[j] += d * p
                p *= bm
        tails = []
        for j in range(N + 1):
            coeffs[j] /= mp.factorial(j)
            tails.append(self._tail(K, j, ec))
        return Jet(x0, tuple(coeffs), tuple(tails), mp)

    def deriv_sup_bound(self, k, ec):
        mp = ec.mp
        if self.terms is not None and self.terms >= k + 2:
            K = self.terms
        else:
            K = max(k + 3, self._auto_terms(1, k, ec))
        total = sum((mp.mpf(bseq(n)) ** (1 - n + k) for n in range(1, K + 1)), mp.mpf(0))
        return _inflate(mp, total + 2 * mp.mpf(bseq(K + 1)) ** (k - K))

    def sup_bound(self, ec):
        return self.deriv_sup_bound(0, ec)

    def integral(self, lo, hi, ec):
        mp = ec.mp
        K = self._terms_for(0, ec)
        total = mp.mpf(0)
        for n in range(1, K + 1):
            b = bseq(n)
            total += (_trig(mp, b, lo)[1] - _trig(mp, b, hi)[1]) * mp.mpf(b) ** (-n)
        return total, _inflate(mp, 4 * mp.mpf(bseq(K + 1)) ** (-K - 1))

    def to_dict(self):
        d = {"node": self.node}
        if self.terms is not None:
            d["terms"] = self.terms
        return d

    def describe(self):
        return "g" if self.terms is None else f"g[K={self.terms}]"


@dataclass(frozen=True)
class Shift(FnExpr):
    child: FnExpr
    c: Fraction
    node = "Shift"

    def __post_init__(self):
        object.__setattr__(self, "c", exact(self.c))

    @property
    def cost(self):
        return self.child.cost

    def children(self):
        return (self.child,)

    def evaluate(self, x, ec):
        e = self.child.evaluate(x, ec)
        return Evaluation(e.value + to_mpf(ec.mp, self.c), e.bound, e.annotations)

    def jet(self, x0, N, ec):
        return self.child.jet(x0, N, ec) + to_mpf(ec.mp, self.c)

    def sup_bound(self, ec):
        return abs(to_mpf(ec.mp, self.c)) + self.child.sup_bound(ec)

    def lower_bound(self, ec):
        c = to_mpf(ec.mp, self.c)
        inner = self.child.lower_bound(ec)
        if inner is not None:
            return inner + c
        try:
            return c - self.child.sup_bound(ec)
        except InputError:
            return None

    def deriv_sup_bound(self, k, ec):
        if k == 0:
            return self.sup_bound(ec)
        return self.child.deriv_sup_bound(k, ec)

    def integral(self, lo, hi, ec):
        inner = self.child.integral(lo, hi, ec)
        if inner is None:
            return None
        return inner[0] + to_mpf(ec.mp, self.c * (hi - lo)), inner[1]

    def to_dict(self):
        return {"node": self.node, "c": _fmt(self.c), "child": self.child.to_dict()}

    def describe(self):
        return f"({self.child.describe()} + {_fmt(self.c)})"


@dataclass(frozen=True)
class Product(FnExpr):
    children_: tuple = field(default=())
    node = "Product"

    def __post_init__(self):
        object.__setattr__(self, "children_", tuple(self.children_))
        if not self.children_:
            raise InputError("Product needs at least one factor")

    @property
    def cost(self):
        return max(ch.cost for ch in self.children_)

    def children(self):
        return self.children_

    def _order(self):
        return sorted(range(len(self.children_)), key=lambda i: self.children_[i].cost)

    def evaluate(self, x, ec):
        mp = ec.mp
        evals = []
        notes: tuple = ()
        for i in self._order():
            e = self.children_[i].evaluate(x, ec)
            notes += e.annotations
            if e.is_exact_zero:
                return Evaluation(mp.mpf(0), exact_bound(mp, "exact zero factor"), notes)
            evals.append(e)
        value, tail = evals[0].value, evals[0].tail
        for e in evals[1:]:
            tail = abs(value) * e.tail + abs(e.value) * tail + tail * e.tail
            value = value * e.value
        why = "product rule for bounds" if tail else "closed form"
        return Evaluation(value, SeriesBound(None, tail, why), notes)

    def jet(self, x0, N, ec):
        jets = []
        for i in self._order():
            j = self.children_[i].jet(x0, N, ec)
            if j.is_zero:
                return zero_jet(x0, N, ec.mp)
            jets.append(j)
        out = jets[0]
        for j in jets[1:]:
            out = jet_mul(out, j)
        return out

    def sup_bound(self, ec):
        out = ec.mp.mpf(1)
        for ch in self.children_:
            out *= ch.sup_bound(ec)
        return out

    def lower_bound(self, ec):
        out = ec.mp.mpf(1)
        for ch in self.children_:
            lb = ch.lower_bound(ec)
            if lb is None or lb <= 0:
                return None
            out *= lb
        return out

    def to_dict(self):
        return {"node": self.node, "children": [ch.to_dict() for ch in self.children_]}

    def describe(self):
        return " * ".join(
            ch.describe() if not isinstance(ch, Product) else f"({ch.describe()})" for ch in self.children_
        )


@dataclass(frozen=True)
class ExpAffine(FnExpr):
    """``exp(r * child) + a``; with ``a = -1`` an exact zero of the child stays exact."""

    rate: Rate
    a: Fraction
    child: FnExpr
    node = "ExpAffine"

    def __post_init__(self):
        object.__setattr__(self, "rate", Rate.parse(self.rate))
        object.__setattr__(self, "a", exact(self.a))

    @property
    def cost(self):
        return self.child.cost

    def children(self):
        return (self.child,)

    def evaluate(self, x, ec):
        mp = ec.mp
        e = self.child.evaluate(x, ec)
        a = to_mpf(mp, self.a)
        if e.is_exact_zero:
            return Evaluation(1 + a, exact_bound(mp, "exp(0) exactly"), e.annotations)
        r = self.rate.value(mp)
        ev = mp.exp(r * e.value)
        tail = ev * mp.expm1(abs(r) * e.tail) if e.tail else mp.mpf(0)
        return Evaluation(ev + a, SeriesBound(None, tail, "|exp(y+d)-exp(y)| <= exp(y)(exp|d|-1)"), e.annotations)

    def jet(self, x0, N, ec):
        mp = ec.mp
        inner = self.child.jet(x0, N, ec)
        a = to_mpf(mp, self.a)
        if inner.is_zero:
            return const_jet(1 + a, x0, N, mp)
        return jet_exp(inner.scale(self.rate.value(mp))) + a

    def to_dict(self):
        return {"node": self.node, "rate": str(self.rate), "a": _fmt(self.a), "child": self.child.to_dict()}

    def describe(self):
        a = "" if self.a == 0 else (f" - {_fmt(-self.a)}" if self.a < 0 else f" + {_fmt(self.a)}")
        return f"(exp({self.rate}*{self.child.describe()}){a})"


def _normalize_poly(poly) -> dict:
    out: dict = {}
    items = poly.items() if isinstance(poly, dict) else poly
    for mono, coeff in items:
        mono = tuple(int(m) for m in mono)
        if any(m < 0 for m in mono):
            raise InputError("monomial exponents must be nonnegative")
        c = exact(coeff)
        out[mono] = out.get(mono, Fraction(0)) + c
    return {m: c for m, c in sorted(out.items()) if c}


@dataclass(frozen=True)
class PolyCombine(FnExpr):
    """``P(child_1, ..., child_d)`` for a polynomial without constant term."""

    poly: tuple
    children_: tuple
    node = "PolyCombine"

    def __post_init__(self):
        p = _normalize_poly(dict(self.poly) if not isinstance(self.poly, dict) else self.poly)
        d = len(self.children_)
        for mono in p:
            if len(mono) != d:
                raise InputError(f"monomial {mono} does not match {d} children")
            if not any(mono):
                raise InputError("polynomial must not have a constant term")
        object.__setattr__(self, "poly", tuple(p.items()))
        object.__setattr__(self, "children_", tuple(self.children_))

    @property
    def cost(self):
        return max((ch.cost for ch in self.children_), default=0)

    def children(self):
        return self.children_

    def evaluate(self, x, ec):
        mp = ec.mp
        evals = [ch.evaluate(x, ec) for ch in self.children_]
        notes = sum((e.annotations for e in evals), ())
        total = mp.mpf(0)
        tail = mp.mpf(0)
        for mono, coeff in self.poly:
            c = to_mpf(mp, coeff)
            term = c
            hi = abs(c)
            lo = abs(c)
            for e, m in zip(evals, mono):
                if m:
                    term *= e.value**m
                    hi *= (abs(e.value) + e.tail) ** m
                    lo *= abs(e.value) ** m
            total += term
            tail += hi - lo
        return Evaluation(total, SeriesBound(None, tail, "monomial majorants"), notes)

    def jet(self, x0, N, ec):
        mp = ec.mp
        jets = [ch.jet(x0, N, ec) for ch in self.children_]
        out = zero_jet(x0, N, mp)
        for mono, coeff in self.poly:
            term = None
            for j, m in zip(jets, mono):
                if m:
                    p = jet_pow_int(j, m)
                    term = p if term is None else jet_mul(term, p)
            out = out + term.scale(to_mpf(mp, coeff))
        return out

    def to_dict(self):
        return {
            "node": self.node,
            "poly": [[_fmt(c), list(m)] for m, c in self.poly],
            "children": [ch.to_dict() for ch in self.children_],
        }

    def describe(self):
        names = [ch.describe() for ch in self.children_]
        parts = []
        for mono, c in self.poly:
            factors = [names[i] + (f"^{m}" if m > 1 else "") for i, m in enumerate(mono) if m]
            parts.append(f"{_fmt(c)}*" + "*".join(factors))
        return "P[" + " + ".join(parts) + "]"


@dataclass(frozen=True)
class Primitive(FnExpr):
    """``x -> integral of child from basepoint to x``.

    ``method="auto"`` integrates termwise when the child has a closed-form
    antiderivative and otherwise falls back to composite midpoint quadrature
    with a certified second-derivative bound.
    """

    child: FnExpr
    basepoint: Fraction = Fraction(0)
    method: str = "auto"
    node = "Primitive"

    def __post_init__(self):
        object.__setattr__(self, "basepoint", exact(self.basepoint))
        if self.method not in ("auto", "midpoint"):
            raise InputError(f"unknown quadrature method {self.method!r}")

    @property
    def cost(self):
        return self.child.cost + 1

    def children(self):
        return (self.child,)

    def _midpoint(self, lo: Fraction, hi: Fraction, ec):
        mp = ec.mp
        if lo == hi:
            return mp.mpf(0), mp.mpf(0), 0
        m2 = self.child.deriv_sup_bound(2, ec)
        if m2 is None:
            raise PreconditionViolation("quadrature needs a certified bound on the integrand's second derivative")
        L = abs(hi - lo)
        # composite midpoint: |error| <= M2 * L * w^2 / 24
        tol = to_mpf(mp, ec.quad_tol)
        n = max(1, int(mp.ceil(to_mpf(mp, L) * mp.sqrt(m2 * to_mpf(mp, L) / (24 * tol)))))
        if n > ec.quad_max_panels:
            raise TailBoundUnachievable(f"midpoint quadrature needs {n} panels (cap {ec.quad_max_panels})")
        w = (hi - lo) / n
        total = mp.mpf(0)
        tails = mp.mpf(0)
        for i in range(n):
            e = self.child.evaluate(lo + (i + Fraction(1, 2)) * w, ec)
            total += e.value
            tails += e.tail
        wm = to_mpf(mp, w)
        err = m2 * to_mpf(mp, L) * wm**2 / 24 + abs(wm) * tails
        return total * wm, _inflate(mp, err), n

    def evaluate(self, x, ec):
        x = exact(x)
        lo, hi = self.basepoint, x
        if self.method == "auto":
            closed = self.child.integral(lo, hi, ec)
            if closed is not None:
                return Evaluation(closed[0], SeriesBound(None, closed[1], "termwise antiderivative"))
        value, err, n = self._midpoint(lo, hi, ec)
        return Evaluation(value, SeriesBound(n, err, "composite midpoint, M2*L*w^2/24"))

    def jet(self, x0, N, ec):
        x0 = exact(x0)
        e = self.evaluate(x0, ec)
        if N == 0:
            return Jet(x0, (e.value,), (e.tail,), ec.mp)
        inner = self.child.jet(x0, N - 1, ec)
        out = jet_integral(inner, e.value)
        return out._replace(out.coeffs, (e.tail,) + out.tail[1:])

    def positivity_certificate(self, ec):
        return self.child.lower_bound(ec)

    def deriv_sup_bound(self, k, ec):
        if k >= 1:
            return self.child.deriv_sup_bound(k - 1, ec)
        return None

    def to_dict(self):
        d = {"node": self.node, "basepoint": _fmt(self.basepoint), "child": self.child.to_dict()}
        if self.method != "auto":
            d["method"] = self.method
        return d

    def describe(self):
        return f"Integral[{_fmt(self.basepoint)}..x]({self.child.describe()})"
