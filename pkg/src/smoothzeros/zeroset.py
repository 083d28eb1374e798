"""Finitely described closed subsets of the real line.

Each generator kind answers exact membership and gap-location queries for
rational points and carries hard-coded topological flags; density questions
are not decidable from a membership oracle, so they are metadata here.

Document format (JSON, one object, ``kind`` discriminator)::

    {"kind": "finite", "points": ["0", "1/2", 3]}
    {"kind": "intervals", "intervals": [["0", "1"], ["2", "inf"]], "points": ["-1"]}
    {"kind": "lattice", "step": "1"}
    {"kind": "reciprocal"}
    {"kind": "cantor", "depth": 20}
    {"kind": "fat_complement", "epsilon": "1/10", "length": 200}
    {"kind": "empty"}
    {"kind": "full_line"}
"""

from __future__ import annotations

import bisect
import itertools
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .errors import Undecidable, UnsupportedZeroSet, ZeroSetFormatError
from .numkit import exact

INF = math.inf


def _endpoint(v):
    """Parse an extended-real endpoint (``"inf"``/``"-inf"`` allowed)."""
    if isinstance(v, str) and v.strip().lower() in ("inf", "+inf", "infinity"):
        return INF
    if isinstance(v, str) and v.strip().lower() in ("-inf", "-infinity"):
        return -INF
    if isinstance(v, float) and math.isinf(v):
        return v
    return exact(v)


def format_endpoint(v) -> str:
    if isinstance(v, float):
        return "inf" if v > 0 else "-inf"
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True)
class Gap:
    """A maximal open interval ``(a, b)`` of the complement."""

    a: Fraction | float
    b: Fraction | float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"degenerate gap ({self.a}, {self.b})")

    def __contains__(self, x) -> bool:
        return self.a < x < self.b

    @property
    def length(self):
        return self.b - self.a

    def __str__(self):
        return f"({format_endpoint(self.a)}, {format_endpoint(self.b)})"


@dataclass(frozen=True)
class Flag:
    value: bool
    why: str


@dataclass(frozen=True)
class ClassificationReport:
    entire_exact_possible: bool
    smooth_exact_possible: bool
    singular_exact_possible: bool
    pringsheim_exact_possible: bool
    smooth_contained_nontrivial: bool
    singular_contained_nonempty: bool
    reasons: dict = field(default_factory=dict, compare=False)

    FIELDS = (
        "entire_exact_possible",
        "smooth_exact_possible",
        "singular_exact_possible",
        "pringsheim_exact_possible",
        "smooth_contained_nontrivial",
        "singular_contained_nonempty",
    )

    def as_dict(self) -> dict:
        return {name: {"value": getattr(self, name), "reason": self.reasons.get(name, "")} for name in self.FIELDS}

    def render(self) -> str:
        width = max(len(n) for n in self.FIELDS)
        lines = []
        for name in self.FIELDS:
            verdict = "yes" if getattr(self, name) else "no"
            lines.append(f"{name:<{width}}  {verdict:<3}  {self.reasons.get(name, '')}")
        return "\n".join(lines)


class ZeroSetSpec:
    """Base class; subclasses fix ``kind`` and the flag table."""

    kind: str = ""
    is_closed = Flag(True, "every generator describes a closed set")

    # -- queries -------------------------------------------------------
    def membership(self, x) -> bool:
        raise NotImplementedError

    def locate_gap(self, x) -> Gap | None:
        raise NotImplementedError

    def sample_members(self, rng: random.Random, n: int, window: tuple) -> list[Fraction]:
        raise NotImplementedError

    def is_boundary(self, c) -> bool:
        """Whether ``c`` lies in the topological boundary of the set."""
        c = exact(c)
        if not self.membership(c):
            return False
        return self.empty_interior.value

    # -- flags ---------------------------------------------------------
    @property
    def flags(self) -> dict[str, Flag]:
        return {
            "is_closed": self.is_closed,
            "has_accumulation_point": self.has_accumulation_point,
            "empty_interior": self.empty_interior,
            "is_dense": self.is_dense,
            "is_nowhere_dense": self.is_nowhere_dense,
        }

    has_accumulation_point: Flag
    empty_interior: Flag
    is_dense: Flag
    is_nowhere_dense: Flag

    @property
    def resolvable(self) -> bool:
        """Whether every gap can be located exactly (false only for truncations)."""
        return True

    def to_dict(self) -> dict:
        return {"kind": self.kind}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def describe(self) -> str:
        return self.dumps()

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(self.dumps())

    def __repr__(self):
        return f"{type(self).__name__}({self.dumps()})"


class EmptySet(ZeroSetSpec):
    kind = "empty"
    has_accumulation_point = Flag(False, "the empty set has no points")
    empty_interior = Flag(True, "the empty set contains no interval")
    is_dense = Flag(False, "its closure is empty")
    is_nowhere_dense = Flag(True, "closed with empty interior")

    def membership(self, x) -> bool:
        exact(x)
        return False

    def locate_gap(self, x):
        exact(x)
        return Gap(-INF, INF)

    def sample_members(self, rng, n, window):
        return []


class FullLine(ZeroSetSpec):
    kind = "full_line"
    has_accumulation_point = Flag(True, "every real is a limit of other reals")
    empty_interior = Flag(False, "the whole line is open")
    is_dense = Flag(True, "the set is the whole line")
    is_nowhere_dense = Flag(False, "its interior is the whole line")

    def membership(self, x) -> bool:
        exact(x)
        return True

    def locate_gap(self, x):
        exact(x)
        return None

    def is_boundary(self, c) -> bool:
        return False

    def sample_members(self, rng, n, window):
        return [_random_point(rng, *window) for _ in range(n)]


class FiniteSet(ZeroSetSpec):
    kind = "finite"
    has_accumulation_point = Flag(False, "finite sets are discrete")
    empty_interior = Flag(True, "a finite set contains no interval")
    is_dense = Flag(False, "a finite set is closed and not the whole line")
    is_nowhere_dense = Flag(True, "closed with empty interior")

    def __init__(self, points):
        pts = sorted({exact(p) for p in points})
        self.points = tuple(pts)

    def membership(self, x) -> bool:
        x = exact(x)
        i = bisect.bisect_left(self.points, x)
        return i < len(self.points) and self.points[i] == x

    def locate_gap(self, x):
        x = exact(x)
        if self.membership(x):
            return None
        i = bisect.bisect_left(self.points, x)
        a = self.points[i - 1] if i > 0 else -INF
        b = self.points[i] if i < len(self.points) else INF
        return Gap(a, b)

    def sample_members(self, rng, n, window):
        if not self.points:
            return []
        return [rng.choice(self.points) for _ in range(n)]

    def to_dict(self):
        return {"kind": self.kind, "points": [format_endpoint(p) for p in self.points]}


class IntervalUnion(ZeroSetSpec):
    """Finite union of pairwise disjoint closed intervals (points allowed)."""

    kind = "intervals"

    def __init__(self, intervals=(), points=()):
        items = [(_endpoint(lo), _endpoint(hi)) for lo, hi in intervals]
        items += [(exact(p), exact(p)) for p in points]
        for lo, hi in items:
            if lo > hi or lo == INF or hi == -INF:
                raise ZeroSetFormatError(f"bad interval [{lo}, {hi}]")
        items.sort(key=lambda t: (t[0], t[1]))
        for (_, h1), (l2, _) in zip(items, items[1:]):
            if not h1 < l2:
                raise ZeroSetFormatError("intervals must be pairwise disjoint")
        self.intervals = tuple(items)
        self._lows = [lo for lo, _ in items]

    @property
    def _solid(self):
        return any(lo < hi for lo, hi in self.intervals)

    @property
    def has_accumulation_point(self):
        if self._solid:
            return Flag(True, "contains a nondegenerate interval")
        return Flag(False, "only finitely many isolated points")

    @property
    def empty_interior(self):
        if self._solid:
            return Flag(False, "contains a nondegenerate interval")
        return Flag(True, "only finitely many isolated points")

    @property
    def is_dense(self):
        full = any(lo == -INF and hi == INF for lo, hi in self.intervals)
        return Flag(full, "closed, so dense only if it is the whole line")

    @property
    def is_nowhere_dense(self):
        return Flag(not self._solid, "closed, so nowhere dense iff the interior is empty")

    def _index(self, x):
        return bisect.bisect_right(self._lows, x) - 1

    def membership(self, x) -> bool:
        x = exact(x)
        i = self._index(x)
        return i >= 0 and self.intervals[i][0] <= x <= self.intervals[i][1]

    def locate_gap(self, x):
        x = exact(x)
        if self.membership(x):
            return None
        i = self._index(x)
        a = self.intervals[i][1] if i >= 0 else -INF
        b = self.intervals[i + 1][0] if i + 1 < len(self.intervals) else INF
        return Gap(a, b)

    def is_boundary(self, c) -> bool:
        c = exact(c)
        return self.membership(c) and any(c == lo or c == hi for lo, hi in self.intervals)

    def sample_members(self, rng, n, window):
        lo_w, hi_w = window
        pieces = []
        for lo, hi in self.intervals:
            lo2, hi2 = max(lo, lo_w), min(hi, hi_w)
            if lo2 <= hi2:
                pieces.append((lo2, hi2))
        if not pieces:
            return []
        out = []
        for _ in range(n):
            lo, hi = rng.choice(pieces)
            out.append(lo if lo == hi else _random_point(rng, lo, hi))
        return out

    def to_dict(self):
        solid = [[format_endpoint(lo), format_endpoint(hi)] for lo, hi in self.intervals if lo < hi]
        pts = [format_endpoint(lo) for lo, hi in self.intervals if lo == hi]
        return {"kind": self.kind, "intervals": solid, "points": pts}


class IntegerLattice(ZeroSetSpec):
    kind = "lattice"
    has_accumulation_point = Flag(False, "consecutive points are one step apart")
    empty_interior = Flag(True, "a discrete set contains no interval")
    is_dense = Flag(False, "the gaps between lattice points are open")
    is_nowhere_dense = Flag(True, "closed with empty interior")

    def __init__(self, step=1):
        self.step = exact(step)
        if self.step <= 0:
            raise ZeroSetFormatError("lattice step must be positive")

    def membership(self, x) -> bool:
        return (exact(x) / self.step).denominator == 1

    def locate_gap(self, x):
        x = exact(x)
        q = x / self.step
        if q.denominator == 1:
            return None
        k = math.floor(q)
        return Gap(k * self.step, (k + 1) * self.step)

    def sample_members(self, rng, n, window):
        lo = math.ceil(Fraction(window[0]) / self.step)
        hi = math.floor(Fraction(window[1]) / self.step)
        if lo > hi:
            return []
        return [rng.randint(lo, hi) * self.step for _ in range(n)]

    def to_dict(self):
        return {"kind": self.kind, "step": format_endpoint(self.step)}


class ReciprocalSeq(ZeroSetSpec):
    """The set ``{0} U {+-1/n : n >= 1}``."""

    kind = "reciprocal"
    has_accumulation_point = Flag(True, "1/n -> 0")
    empty_interior = Flag(True, "countable, so it contains no interval")
    is_dense = Flag(False, "the complement contains (1/3, 1/2)")
    is_nowhere_dense = Flag(True, "closed with empty interior")

    def membership(self, x) -> bool:
        x = abs(exact(x))
        return x == 0 or (x.numerator == 1 and x <= 1)

    def locate_gap(self, x):
        x = exact(x)
        if self.membership(x):
            return None
        ax = abs(x)
        if ax > 1:
            a, b = Fraction(1), INF
        else:
            n = math.floor(1 / ax)
            a, b = Fraction(1, n + 1), Fraction(1, n)
        return Gap(a, b) if x > 0 else Gap(-b, -a)

    def sample_members(self, rng, n, window):
        out = []
        for _ in range(n):
            if rng.random() < 0.05:
                out.append(Fraction(0))
                continue
            k = int(10 ** rng.uniform(0, 6))
            out.append(Fraction(rng.choice((1, -1)), max(k, 1)))
        return out


class CantorMiddleThirds(ZeroSetSpec):
    """Middle-thirds Cantor set, resolved to ``depth`` ternary digits."""

    kind = "cantor"
    has_accumulation_point = Flag(True, "perfect set: every point is a limit of endpoints")
    empty_interior = Flag(True, "total length of the level-n intervals is (2/3)^n -> 0")
    is_dense = Flag(False, "the complement contains (1/3, 2/3)")
    is_nowhere_dense = Flag(True, "closed with empty interior")

    def __init__(self, depth=20):
        self.depth = int(depth)
        if self.depth < 1:
            raise ZeroSetFormatError("cantor depth must be >= 1")

    def _walk(self, x):
        """Return ``True`` (member), a :class:`Gap`, or raise Undecidable."""
        if x < 0:
            return Gap(-INF, Fraction(0))
        if x > 1:
            return Gap(Fraction(1), INF)
        lo, width, y = Fraction(0), Fraction(1), x
        third = Fraction(1, 3)
        for _ in range(self.depth):
            if y == 0 or y == 1:
                return True
            if third < y < 2 * third:
                return Gap(lo + width * third, lo + 2 * width * third)
            width *= third
            if y <= third:
                y = 3 * y
            else:
                lo += 2 * width
                y = 3 * y - 2
        if y == 0 or y == 1:
            return True
        raise Undecidable(f"{x} needs more than {self.depth} ternary digits")

    def membership(self, x) -> bool:
        return self._walk(exact(x)) is True

    def locate_gap(self, x):
        r = self._walk(exact(x))
        return None if r is True else r

    def sample_members(self, rng, n, window):
        out = []
        for _ in range(n):
            m = rng.randint(0, self.depth)
            left = sum((Fraction(2 * rng.randint(0, 1), 3**i) for i in range(1, m + 1)), Fraction(0))
            out.append(left if rng.random() < 0.5 else left + Fraction(1, 3**m))
        return out

    def to_dict(self):
        return {"kind": self.kind, "depth": self.depth}


def rational_enumeration() -> Iterator[Fraction]:
    """Every rational exactly once, in lowest terms.

    Ordered by height ``max(|p|, q)``, then denominator, then numerator.
    """
    for h in itertools.count(1):
        for q in range(1, h + 1):
            nums = range(-h, h + 1) if q == h else (-h, h)
            for p in nums:
                if math.gcd(p, q) == 1:
                    yield Fraction(p, q)


class FatComplement(ZeroSetSpec):
    """``R`` minus the intervals ``(q_n - eps/2^(n+1), q_n + eps/2^(n+1))``.

    ``q_n`` runs through :func:`rational_enumeration`; only the first
    ``length`` intervals are materialised, so membership can only ever be
    refuted.
    """

    kind = "fat_complement"
    has_accumulation_point = Flag(True, "the complement has measure <= eps, so the set is uncountable")
    empty_interior = Flag(True, "the removed intervals surround every rational")
    is_dense = Flag(False, "the removed intervals are open and nonempty")
    is_nowhere_dense = Flag(True, "closed with empty interior")

    def __init__(self, epsilon, length=100):
        self.epsilon = exact(epsilon)
        self.length = int(length)
        if self.epsilon <= 0:
            raise ZeroSetFormatError("epsilon must be positive")
        if self.length < 1:
            raise ZeroSetFormatError("enumeration length must be >= 1")
        self._intervals = tuple(
            (q - self.epsilon / 2 ** (n + 1), q + self.epsilon / 2 ** (n + 1))
            for n, q in zip(range(1, self.length + 1), rational_enumeration())
        )

    @property
    def resolvable(self) -> bool:
        return False

    def materialized_intervals(self) -> tuple:
        return self._intervals

    def membership(self, x) -> bool:
        x = exact(x)
        if any(lo < x < hi for lo, hi in self._intervals):
            return False
        raise Undecidable(f"{x} not excluded by the first {self.length} removed intervals")

    def locate_gap(self, x):
        raise UnsupportedZeroSet("complementary gaps of a fat complement are not finitely resolvable")

    def sample_members(self, rng, n, window):
        return []

    def to_dict(self):
        return {"kind": self.kind, "epsilon": format_endpoint(self.epsilon), "length": self.length}


def _random_point(rng: random.Random, lo, hi) -> Fraction:
    lo, hi = Fraction(lo), Fraction(hi)
    return lo + (hi - lo) * Fraction(rng.getrandbits(40), 2**40)


def classify(Z: ZeroSetSpec) -> ClassificationReport:
    full = isinstance(Z, FullLine)
    acc = Z.has_accumulation_point.value
    interior_empty = Z.empty_interior.value
    reasons = {
        "entire_exact_possible": "entire zero sets (Weierstrass factorization): Z = R or Z has no accumulation point",
        "smooth_exact_possible": "smooth zero sets (bump sum over the gaps): Z is closed",
        "singular_exact_possible": "nowhere-analytic zero sets: Z is closed with empty interior",
        "pringsheim_exact_possible": "Pringsheim-singular zero sets, sufficient condition only: Z has no accumulation point",
        "smooth_contained_nontrivial": "nonzero smooth functions vanishing on Z: Z is not dense",
        "singular_contained_nonempty": "nowhere-analytic functions vanishing on Z: Z is nowhere dense",
    }
    return ClassificationReport(
        entire_exact_possible=full or not acc,
        smooth_exact_possible=Z.is_closed.value,
        singular_exact_possible=Z.is_closed.value and interior_empty,
        pringsheim_exact_possible=not acc,
        smooth_contained_nontrivial=not Z.is_dense.value,
        singular_contained_nonempty=Z.is_nowhere_dense.value,
        reasons=reasons,
    )


def membership(Z: ZeroSetSpec, x) -> bool:
    return Z.membership(x)


def locate_gap(Z: ZeroSetSpec, x) -> Gap | None:
    return Z.locate_gap(x)


def from_dict(doc: dict) -> ZeroSetSpec:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ZeroSetFormatError("zero-set document must be an object with a 'kind' field")
    kind = doc["kind"]
    try:
        if kind == "finite":
            return FiniteSet(doc.get("points", []))
        if kind == "intervals":
            return IntervalUnion(doc.get("intervals", []), doc.get("points", []))
        if kind == "lattice":
            return IntegerLattice(doc.get("step", 1))
        if kind == "reciprocal":
            return ReciprocalSeq()
        if kind == "cantor":
            return CantorMiddleThirds(doc.get("depth", 20))
        if kind == "fat_complement":
            return FatComplement(doc["epsilon"], doc.get("length", 100))
        if kind == "empty":
            return EmptySet()
        if kind == "full_line":
            return FullLine()
    except ZeroSetFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ZeroSetFormatError(f"bad '{kind}' document: {exc}") from exc
    raise ZeroSetFormatError(f"unknown zero-set kind {kind!r}")


def parse_zeroset(text: str) -> ZeroSetSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ZeroSetFormatError(f"not valid JSON: {exc}") from exc
    return from_dict(doc)
