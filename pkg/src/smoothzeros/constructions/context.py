from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import MPContext

from ..errors import InputError
from ..numkit import DEFAULT_PRECISION, exact, working_context


@dataclass
class EvalContext:
    """Precision and cost-model caps for one evaluation session.

    Owns a private ``MPContext``; share an instance only within one thread.
    """

    precision_bits: int = DEFAULT_PRECISION
    lerch_order_cap: int = 8
    lerch_term_cap: int = 20000
    g_term_cap: int = 16
    weierstrass_max_factors: int = 5000
    quad_tol: Fraction = Fraction(1, 10**12)
    quad_max_panels: int = 200000
    mp: MPContext = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= self.g_term_cap <= 24:
            raise InputError("g term cap must lie in [1, 24]")
        if not 0 <= self.lerch_order_cap <= 12:
            raise InputError("Lerch order cap must lie in [0, 12]")
        self.quad_tol = exact(self.quad_tol)
        self.mp = working_context(self.precision_bits)

    @property
    def target(self):
        """Absolute truncation target: one unit in the last working bit."""
        return self.mp.ldexp(self.mp.mpf(1), -self.mp.prec)


@dataclass(frozen=True)
class SeriesBound:
    """Truncation index, certified tail bound and which estimate produced it."""

    truncation_index: int | None
    tail_bound: object
    justification: str


@dataclass(frozen=True)
class Evaluation:
    value: object
    bound: SeriesBound
    annotations: tuple = ()

    @property
    def tail(self):
        return self.bound.tail_bound

    @property
    def is_exact_zero(self) -> bool:
        return self.value == 0 and self.bound.tail_bound == 0


def exact_bound(mp: MPContext, why: str = "closed form") -> SeriesBound:
    return SeriesBound(None, mp.mpf(0), why)


@dataclass(frozen=True)
class Rate:
    """Exponential rate: an exact rational, or the square root of one."""

    radicand: Fraction
    is_sqrt: bool = False

    @classmethod
    def parse(cls, text) -> "Rate":
        if isinstance(text, Rate):
            return text
        s = str(text).strip()
        if s.startswith("sqrt(") and s.endswith(")"):
            r = exact(s[5:-1])
            if r <= 0:
                raise InputError("sqrt rate needs a positive radicand")
            return cls(r, True)
        return cls(exact(text), False)

    def value(self, mp: MPContext):
        from ..numkit import to_mpf

        v = to_mpf(mp, self.radicand)
        return mp.sqrt(v) if self.is_sqrt else v

    def __str__(self):
        r = self.radicand
        s = str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"
        return f"sqrt({s})" if self.is_sqrt else s
