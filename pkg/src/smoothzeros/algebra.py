"""Free algebras generated by ``exp(r * f) + a`` over Q-independent rates.

A polynomial ``P`` without constant term in ``d`` variables is evaluated at
``E_i = exp(r_i f) + a``.  Expanding every power binomially turns ``P`` into
an exponential sum ``sum_m A_m exp((m . r) f)``.  With rates ``r_i = sqrt(p_i)``
for distinct primes, distinct integer vectors ``m`` give distinct reals
``m . r``, so a nonempty expansion has a unique dominant term and the
composite function is not identically zero.  All coefficient arithmetic is
exact; reals only enter when ordering the exponents.
"""

from __future__ import annotations

import functools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .constructions.context import EvalContext, Rate
from .constructions.nodes import ExpAffine, FnExpr, PolyCombine, Primitive
from .errors import InputError, PreconditionViolation
from .numkit import exact, to_mpf, working_context

PEDIGREE = "sqrt-of-prime"
# bits used to order exponent reals; raised automatically on near ties
_ORDER_BITS = 128
_ORDER_BITS_MAX = 1 << 14


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))


@dataclass(frozen=True)
class ExponentBasis:
    """Rates ``sqrt(p_1) < ... < sqrt(p_d)`` for distinct primes."""

    primes: tuple
    pedigree: str = PEDIGREE

    @property
    def dim(self) -> int:
        return len(self.primes)

    def rate(self, i: int) -> Rate:
        return Rate(Fraction(self.primes[i]), True)

    def values(self, mp) -> list:
        return [mp.sqrt(p) for p in self.primes]

    def descriptors(self) -> list[str]:
        return [f"sqrt({p})" for p in self.primes]

    def to_dict(self) -> dict:
        return {"primes": list(self.primes), "pedigree": self.pedigree}


def make_basis(primes) -> ExponentBasis:
    ps = [int(p) for p in primes]
    if not ps:
        raise InputError("basis needs at least one prime")
    if len(set(ps)) != len(ps):
        raise InputError(f"basis primes must be distinct, got {ps}")
    bad = [p for p in ps if not _is_prime(p)]
    if bad:
        raise InputError(f"not prime: {bad}")
    return ExponentBasis(tuple(sorted(ps)))


@dataclass(frozen=True)
class ExponentVector:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    def real_value(self, basis: ExponentBasis, mp):
        return mp.fsum(m * r for m, r in zip(self.coords, basis.values(mp)))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __str__(self):
        return "(" + ",".join(str(c) for c in self.coords) + ")"


def compare_exponents(u: ExponentVector, v: ExponentVector, basis: ExponentBasis) -> int:
    """Sign of ``u.r - v.r``; refines precision until the gap is resolved."""
    if u.coords == v.coords:
        return 0
    bits = _ORDER_BITS
    while bits <= _ORDER_BITS_MAX:
        mp = working_context(bits)
        d = ExponentVector(tuple(a - b for a, b in zip(u.coords, v.coords))).real_value(basis, mp)
        # d is a nonzero algebraic number; a guard of ~sqrt(ulp) rules out rounding
        if abs(d) > mp.ldexp(1, -bits // 2):
            return 1 if d > 0 else -1
        bits *= 2
    raise ArithmeticError(f"could not separate exponents {u} and {v}")


def _normalize(P, d: int | None = None) -> dict:
    """Polynomial as ``{monomial tuple: Fraction}``; accepts dicts or [coeff, mono] lists."""
    items = P.items() if isinstance(P, dict) else ((tuple(m), c) for c, m in P)
    out: dict = {}
    for mono, coeff in items:
        mono = tuple(int(e) for e in mono)
        if any(e < 0 for e in mono):
            raise InputError("monomial exponents must be nonnegative")
        if d is not None and len(mono) != d:
            raise InputError(f"monomial {list(mono)} does not have {d} variables")
        out[mono] = out.get(mono, Fraction(0)) + exact(coeff)
    return {m: c for m, c in sorted(out.items()) if c}


def parse_polynomial(doc, d: int | None = None) -> dict:
    """``[["3/2", [2, 1]], ["-1", [0, 1]]]`` -> ``{(2, 1): 3/2, (0, 1): -1}``."""
    if isinstance(doc, dict):
        return _normalize(doc, d)
    try:
        return _normalize([(c, m) for c, m in doc], d)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad polynomial document: {exc}") from exc


def polynomial_to_list(P: dict) -> list:
    def fmt(q):
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"

    return [[fmt(c), list(m)] for m, c in sorted(P.items())]


def _check_no_constant(P: dict) -> None:
    for mono in P:
        if not any(mono):
            raise InputError("polynomial must not have a constant term")


def expand(P, a, basis: ExponentBasis) -> list:
    """Exponential-sum form of ``P(exp(r_1 y) + a, ..., exp(r_d y) + a)``.

    Returns ``(coefficient, ExponentVector)`` pairs, dominant term first.
    """
    P = _normalize(P, basis.dim)
    _check_no_constant(P)
    a = exact(a)
    acc: dict = {}
    for mono, coeff in P.items():
        # per-variable binomial rows: k -> C(m, k) a^(m-k)
        rows = [[(k, math.comb(m, k) * a ** (m - k)) for k in range(m + 1)] for m in mono]
        partial = {(): coeff}
        for row in rows:
            nxt: dict = {}
            for key, c in partial.items():
                for k, b in row:
                    if b:
                        nk = key + (k,)
                        nxt[nk] = nxt.get(nk, Fraction(0)) + c * b
            partial = nxt
        for key, c in partial.items():
            acc[key] = acc.get(key, Fraction(0)) + c
    terms = [(c, ExponentVector(k)) for k, c in acc.items() if c]
    cmp = functools.cmp_to_key(lambda s, t: compare_exponents(t[1], s[1], basis))
    return sorted(terms, key=cmp)


@dataclass
class AlgebraElement:
    shift: Fraction
    inner: FnExpr | None
    poly: dict
    basis: ExponentBasis
    _expansion: list | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.shift = exact(self.shift)
        self.poly = _normalize(self.poly, self.basis.dim)
        _check_no_constant(self.poly)

    @property
    def expansion(self) -> list:
        if self._expansion is None:
            self._expansion = expand(self.poly, self.shift, self.basis)
        return self._expansion

    def to_dict(self) -> dict:
        return {
            "shift": str(self.shift),
            "basis": self.basis.to_dict(),
            "poly": polynomial_to_list(self.poly),
            "inner": None if self.inner is None else self.inner.to_dict(),
            "expansion": [[str(c), list(v.coords)] for c, v in self.expansion],
        }


@dataclass(frozen=True)
class NonzeroCertificate:
    is_zero: bool
    dominant: ExponentVector | None = None
    coefficient: Fraction | None = None

    def __str__(self):
        if self.is_zero:
            return "IsZero"
        return f"dominant term {self.coefficient} * exp({self.dominant} . r)"


def nonzero_certificate(elem: AlgebraElement) -> NonzeroCertificate:
    terms = elem.expansion
    if not terms:
        return NonzeroCertificate(True)
    c, v = terms[0]
    return NonzeroCertificate(False, v, c)


def expansion_value(terms, basis: ExponentBasis, y, mp):
    """Evaluate ``sum A_m exp((m . r) y)`` at a real ``y``."""
    rs = basis.values(mp)
    return mp.fsum(to_mpf(mp, c) * mp.exp(y * mp.fsum(m * r for m, r in zip(v.coords, rs))) for c, v in terms)


def direct_value(P, a, basis: ExponentBasis, y, mp):
    """Evaluate ``P(exp(r_i y) + a)`` without expanding."""
    P = _normalize(P, basis.dim)
    gens = [mp.exp(r * y) + to_mpf(mp, exact(a)) for r in basis.values(mp)]
    total = mp.mpf(0)
    for mono, c in P.items():
        term = to_mpf(mp, c)
        for g, m in zip(gens, mono):
            term *= g**m
        total += term
    return total


@dataclass
class FreenessReport:
    basis: ExponentBasis
    trials: int
    passes: int = 0
    failures: list = field(default_factory=list)
    zero_reports: int = 0

    @property
    def ok(self) -> bool:
        return self.passes == self.trials and not self.failures

    def render(self) -> str:
        lines = [
            f"basis: {', '.join(self.basis.descriptors())}",
            f"trials: {self.trials}  passes: {self.passes}  IsZero: {self.zero_reports}",
        ]
        lines += [f"FAIL {f}" for f in self.failures]
        return "\n".join(lines)


def random_polynomial(rng: random.Random, d: int, max_degree: int = 4, max_terms: int = 4, max_coeff: int = 5) -> dict:
    """Nonzero polynomial without constant term; resampled until nonzero."""
    while True:
        P: dict = {}
        for _ in range(rng.randint(1, max_terms)):
            deg = rng.randint(1, max_degree)
            mono = [0] * d
            for _ in range(deg):
                mono[rng.randrange(d)] += 1
            c = 0
            while c == 0:
                c = rng.randint(-max_coeff, max_coeff)
            P[tuple(mono)] = P.get(tuple(mono), 0) + Fraction(c)
        P = {m: c for m, c in P.items() if c}
        if P:
            return P


def freeness_check(basis: ExponentBasis, trials: int, seed: int, max_degree: int = 4, shift=-1) -> FreenessReport:
    if trials < 1:
        raise InputError("trials must be >= 1")
    rng = random.Random(seed)
    rep = FreenessReport(basis, trials)
    for t in range(trials):
        P = random_polynomial(rng, basis.dim, max_degree)
        terms = expand(P, shift, basis)
        vectors = [v.coords for _, v in terms]
        if not terms:
            rep.zero_reports += 1
            rep.failures.append(f"trial {t}: expansion empty for {polynomial_to_list(P)}")
        elif len(set(vectors)) != len(vectors):
            rep.failures.append(f"trial {t}: repeated exponent vector")
        elif any(c == 0 for c, _ in terms):
            rep.failures.append(f"trial {t}: zero coefficient survived")
        else:
            rep.passes += 1
    return rep


def compose_element(elem: AlgebraElement) -> FnExpr:
    if elem.inner is None:
        raise InputError("element has no inner function")
    children = tuple(ExpAffine(elem.basis.rate(i), elem.shift, elem.inner) for i in range(elem.basis.dim))
    return PolyCombine(elem.poly, children)


@dataclass(frozen=True)
class SeparationWitness:
    x1: Fraction
    x2: Fraction
    value_x1: object
    nonzero_margin: object
    separation_margin: object
    separated: bool

    def render(self, digits: int = 20) -> str:
        from mpmath import nstr

        return (
            f"x1 = {self.x1}, x2 = {self.x2}\n"
            f"exp(f(x1)) = {nstr(self.value_x1, digits)} (certified >= {nstr(self.nonzero_margin, 8)})\n"
            f"|exp(f(x1)) - exp(f(x2))| >= {nstr(self.separation_margin, 8)}\n"
            f"separated: {'yes' if self.separated else 'no'}"
        )


def separation_witness(f: FnExpr, x1, x2, ec: EvalContext | None = None) -> SeparationWitness:
    """Points are told apart by ``exp(f)`` where ``f`` is a monotone primitive."""
    ec = ec or EvalContext()
    mp = ec.mp
    x1, x2 = exact(x1), exact(x2)
    if x1 == x2:
        raise InputError("separation needs two distinct points")
    if not isinstance(f, Primitive):
        raise PreconditionViolation("separation witness expects a monotone primitive", "injective primitive")
    lb = f.positivity_certificate(ec)
    if lb is None or lb <= 0:
        raise PreconditionViolation("integrand lacks a certified positive lower bound", "injective primitive")
    e1, e2 = f.evaluate(x1, ec), f.evaluate(x2, ec)
    v1 = mp.exp(e1.value)
    nonzero = mp.exp(e1.value - e1.tail)
    lo = min(e1.value - e1.tail, e2.value - e2.tail)
    # f(x_hi) - f(x_lo) >= lb * |x2 - x1| from the integrand's lower bound
    gap = lb * to_mpf(mp, abs(x2 - x1))
    margin = mp.exp(lo) * mp.expm1(gap)
    return SeparationWitness(x1, x2, v1, nonzero, margin, bool(nonzero > 0 and margin > 0))
