"""Canonical product over an arithmetic lattice of zeros.

Zeros are ordered ``0, s, -s, 2s, -2s, ...``; the zero ``a_n`` (``n >= 1``)
gets the elementary factor of genus ``n``,
``E_n(w) = (1 - w) exp(w + w^2/2 + ... + w^n/n)`` with ``w = x / a_n``.
The polynomial part ``x * prod (1 - x/a_n)`` is formed in exact rationals,
so lattice points evaluate to an exact zero.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from ..errors import InputError, TailBoundUnachievable
from ..numkit import Jet, jet_exp, jet_mul, to_mpf, exact, zero_jet
from .context import Evaluation, SeriesBound, exact_bound
from .nodes import FnExpr, _fmt, _inflate

# radius of the disk used for Cauchy estimates on jet coefficients
JET_RADIUS = Fraction(1, 2)


def lattice_zero(step: Fraction, n: int) -> Fraction:
    """``a_n`` in the order 0, s, -s, 2s, -2s, ..."""
    if n == 0:
        return Fraction(0)
    m = (n + 1) // 2
    return m * step if n % 2 else -m * step


@functools.lru_cache(maxsize=64)
def _power_sums(step: Fraction, M: int, prec: int) -> tuple:
    """``P_j = sum_{n=j}^{M} a_n^(-j)`` for ``j = 1..M``, independent of ``x``."""
    mp = mpmath.MPContext()
    mp.prec = prec
    inv = [None] + [1 / to_mpf(mp, lattice_zero(step, n)) for n in range(1, M + 1)]
    pw = inv[:]  # pw[n] = a_n^(-j) for the current j
    out = []
    for j in range(1, M + 1):
        out.append(mp.fsum(pw[j:]))
        for n in range(j + 1, M + 1):
            pw[n] *= inv[n]
    return tuple(out)


@dataclass(frozen=True)
class WeierstrassProduct(FnExpr):
    step: Fraction = Fraction(1)
    node = "WeierstrassProduct"
    cost = 5

    def __post_init__(self):
        object.__setattr__(self, "step", exact(self.step))
        if self.step <= 0:
            raise InputError("lattice step must be positive")

    def _first_small(self, R: Fraction) -> int:
        """Smallest ``M`` with ``|a_{M+1}| >= 2R`` (so ``|w| <= 1/2`` beyond it)."""
        m = int(2 * R / self.step) + 1
        return max(0, 2 * m - 2)

    def _tail_T(self, R: Fraction, M: int, mp):
        """Bound on ``|sum_{n>M} log E_n(x/a_n)|`` for ``|x| <= R``.

        Uses ``|log E_n(w)| <= 2|w|^(n+1)`` for ``|w| <= 1/2`` and a ratio of
        at most 1/2 between successive terms.
        """
        W = to_mpf(mp, R / abs(lattice_zero(self.step, M + 1)))
        return 4 * W ** (M + 2)

    def _choose(self, R: Fraction, ok, ec) -> int:
        M = self._first_small(R)
        while True:
            if M > ec.weierstrass_max_factors:
                raise TailBoundUnachievable(
                    f"product needs more than {ec.weierstrass_max_factors} factors at |x| <= {_fmt(R)}"
                )
            T = self._tail_T(R, M, ec.mp)
            if ok(T, M):
                return M
            M += 16

    def _poly_exact(self, x: Fraction, M: int) -> Fraction:
        acc = x
        for n in range(1, M + 1):
            if acc == 0:
                break
            acc *= 1 - x / lattice_zero(self.step, n)
        return acc

    def _exp_part_fast(self, x: Fraction, M: int, mp):
        """The same exponent as ``sum_j (x^j / j) P_j`` with cached power sums.

        Costs ``O(M)`` per point instead of ``O(M^2)``.  The terms can be much
        larger than the sum for big ``|x|``; returns ``None`` when the rounding
        bound exceeds ``2^(-3 prec / 4)``, still far below the exported bits.
        """
        P = _power_sums(self.step, M, mp.prec + 64)
        xm = to_mpf(mp, x)
        S = mp.mpf(0)
        mass = mp.mpf(0)
        p = mp.mpf(1)
        for j in range(1, M + 1):
            p *= xm
            term = p * P[j - 1] / j
            S += term
            mass += abs(term)
        # every term and the running sum carry at most (3M + 8) roundings
        err = mass * (3 * M + 8) * mp.ldexp(1, 1 - mp.prec)
        if err > mp.ldexp(1, -(3 * mp.prec) // 4):
            return None
        return S, err

    def _exp_part(self, x: Fraction, M: int, mp, eps):
        """``sum_n sum_{j<=n} w_n^j / j`` minus ``sum log(1 - w_n)`` over small factors.

        Factors with ``|w| <= 1/2`` contribute ``log E_n(w) = -sum_{j>n} w^j/j``
        directly (their ``1 - w`` is already in the exact polynomial part, so
        the ``log(1 - w)`` piece is subtracted back out).  Returns the
        exponent and a bound on the dropped terms.
        """
        S = mp.mpf(0)
        dropped = mp.mpf(0)
        xm = to_mpf(mp, x)
        half = mp.mpf(1) / 2
        for n in range(1, M + 1):
            w = xm / to_mpf(mp, lattice_zero(self.step, n))
            aw = abs(w)
            # the series form needs about prec/log2(1/w) - n terms, the direct form n
            if aw <= half and (aw == 0 or 2 * n * -mp.log(aw, 2) > mp.prec):
                S -= mp.log1p(-w)
                p = w**n
                j = n
                while True:
                    j += 1
                    p *= w
                    term = p / j
                    if abs(term) <= eps:
                        # geometric remainder with ratio <= 1/2
                        dropped += 2 * abs(term)
                        break
                    S -= term
            else:
                p = mp.mpf(1)
                for j in range(1, n + 1):
                    p *= w
                    S += p / j
        return S, dropped

    def evaluate(self, x, ec):
        mp = ec.mp
        x = exact(x)
        R = abs(x)
        target = ec.target
        M = self._choose(R, lambda T, M: T <= target, ec)
        poly = self._poly_exact(x, M)
        if poly == 0:
            return Evaluation(mp.mpf(0), exact_bound(mp, "lattice point"))
        eps = target / (M + 1)
        S, dropped = self._exp_part_fast(x, M, mp) or self._exp_part(x, M, mp, eps)
        value = to_mpf(mp, poly) * mp.exp(S)
        T = self._tail_T(R, M, mp) + dropped
        tail = _inflate(mp, abs(value) * mp.expm1(T))
        return Evaluation(value, SeriesBound(M, tail, "|log E_n(w)| <= 2|w|^(n+1), |w| <= 1/2"))

    def _factor_sup_log(self, R: Fraction, M: int, mp):
        """log of a bound for ``|x * prod_{n<=M} E_n(x/a_n)|`` on ``|x| <= R``."""
        Rm = to_mpf(mp, R)
        total = mp.log(Rm) if R > 0 else mp.mpf(0)
        half = mp.mpf(1) / 2
        for n in range(1, M + 1):
            w = Rm / to_mpf(mp, abs(lattice_zero(self.step, n)))
            if w <= half:
                # |log E_n(w)| <= 2|w|^(n+1)/(n+1) on the disk |w| <= 1/2
                total += 2 * w ** (n + 1) / (n + 1)
                continue
            total += mp.log1p(w)
            p = mp.mpf(1)
            for j in range(1, n + 1):
                p *= w
                total += p / j
        return total

    def _log_jet(self, x0: Fraction, N: int, M: int, mp):
        """Taylor coefficients at ``x0`` of ``sum_n sum_{j<=n} (x/a_n)^j / j``."""
        out = [mp.mpf(0)] * (N + 1)
        for n in range(1, M + 1):
            a = lattice_zero(self.step, n)
            w0 = to_mpf(mp, x0 / a)
            inv_a = 1 / to_mpf(mp, a)
            c = [mp.mpf(0)] + [mp.mpf(1) / j for j in range(1, n + 1)]
            scale = mp.mpf(1)
            for k in range(min(N, n) + 1):
                # repeated synthetic division leaves the k-th Taylor coefficient in c[k]
                for j in range(n - 1, k - 1, -1):
                    c[j] += w0 * c[j + 1]
                out[k] += c[k] * scale
                scale *= inv_a
        return out

    def jet(self, x0, N, ec):
        mp = ec.mp
        x0 = exact(x0)
        R = abs(x0) + JET_RADIUS
        rho = to_mpf(mp, JET_RADIUS)
        target = ec.target
        logB = {}

        def ok(T, M):
            if M not in logB:
                logB[M] = self._factor_sup_log(R, M, mp)
            worst = mp.exp(logB[M]) * mp.expm1(T) / rho**N
            return worst <= target

        M = self._choose(R, ok, ec)
        z = mp.mpf(0)
        poly = Jet(x0, (to_mpf(mp, x0),) + ((mp.mpf(1),) if N else ()) + (z,) * max(0, N - 1), (z,) * (N + 1), mp)
        for n in range(1, M + 1):
            a = lattice_zero(self.step, n)
            lin = [to_mpf(mp, 1 - x0 / a)] + ([-1 / to_mpf(mp, a)] if N else []) + [z] * max(0, N - 1)
            poly = jet_mul(poly, Jet(x0, tuple(lin), (z,) * (N + 1), mp))
        if poly.is_zero:
            return zero_jet(x0, N, mp)
        S = Jet(x0, tuple(self._log_jet(x0, N, M, mp)), (z,) * (N + 1), mp)
        body = jet_mul(poly, jet_exp(S))
        B = mp.exp(logB[M]) * mp.expm1(self._tail_T(R, M, mp))
        tails = [_inflate(mp, t + B / rho**k) for k, t in enumerate(body.tail)]
        if self._poly_exact(x0, M) == 0:
            tails[0] = z  # the product vanishes exactly at lattice points
        return body._replace(body.coeffs, tails)

    def to_dict(self):
        return {"node": self.node, "step": _fmt(self.step)}

    def describe(self):
        return f"Weierstrass(lattice step {_fmt(self.step)})"
