"""Finite-order diagnostics: Taylor-radius traces, zero-set verification,
boundary flatness schedules and the dimension-one obstruction.

Reports only ever state what was checked at finitely many points and
orders; they never claim nowhere-analyticity or a true radius.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .bumps import flatness_bound
from .constructions.context import EvalContext
from .constructions.nodes import Bump, BumpSum, FnExpr
from .errors import InputError, PreconditionViolation, Undecidable
from .numkit import exact, format_number, to_mpf
from .zeroset import INF, ZeroSetSpec, _random_point, format_endpoint

NOT_CLAIMED = (
    "finite-order evidence only: nowhere-analyticity, true radii and "
    "cardinality or density claims are not decided here"
)


# -- radius traces ------------------------------------------------------


@dataclass
class RadiusTrace:
    x0: Fraction
    orders: list
    coeffs: dict
    tails: dict
    estimates: dict  # n -> r_n, None when c_n is an exact zero or indeterminate
    window: dict  # N -> rho_N (None while no usable order has been seen)
    indeterminate: list = field(default_factory=list)
    precision_bits: int = 256

    def rows(self) -> list:
        out = []
        for n in self.orders:
            out.append((n, self.coeffs[n], self.tails[n], self.estimates.get(n), self.window.get(n)))
        return out

    def _fmt(self, v) -> str:
        return "-" if v is None else format_number(v, self.precision_bits)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "c_n", "tail_bound", "r_n", "rho_N"])
        for n, c, t, r, rho in self.rows():
            w.writerow([n, self._fmt(c), self._fmt(t), self._fmt(r), self._fmt(rho)])
        return buf.getvalue()

    def render(self) -> str:
        lines = [f"radius trace at x0 = {format_endpoint(self.x0)} ({self.precision_bits} bits)"]
        for n, c, t, r, rho in self.rows():
            lines.append(f"n={n:<3d} c_n={self._fmt(c)}  tail<={self._fmt(t)}  r_n={self._fmt(r)}  rho_N={self._fmt(rho)}")
        if self.indeterminate:
            lines.append("indeterminate orders (|c_n| <= tail): " + ", ".join(map(str, self.indeterminate)))
        lines.append(NOT_CLAIMED)
        return "\n".join(lines)


def radius_trace(
    expr: FnExpr,
    x0,
    orders,
    ec: EvalContext | None = None,
    per_order: Callable[[int], FnExpr] | None = None,
) -> RadiusTrace:
    """``r_n = |c_n|^(-1/n)`` and the running window ``rho_N``.

    ``per_order(n)`` may supply a separate expression for each order (for
    instance a series truncated to ``n + 3`` terms); otherwise one jet of the
    largest order is used.
    """
    ec = ec or EvalContext()
    mp = ec.mp
    x0 = exact(x0)
    orders = sorted(set(int(n) for n in orders))
    if not orders or orders[0] < 1:
        raise InputError("radius trace needs orders n >= 1")
    coeffs, tails = {}, {}
    if per_order is None:
        j = expr.jet(x0, orders[-1], ec)
        for n in orders:
            coeffs[n], tails[n] = j.coeffs[n], j.tail[n]
    else:
        for n in orders:
            j = per_order(n).jet(x0, n, ec)
            coeffs[n], tails[n] = j.coeffs[n], j.tail[n]
    estimates, window, indeterminate = {}, {}, []
    best = None
    for n in orders:
        c, t = coeffs[n], tails[n]
        if c == 0 and t == 0:
            estimates[n] = None
        elif abs(c) <= t:
            estimates[n] = None
            indeterminate.append(n)
        else:
            root = abs(c) ** (mp.mpf(1) / n)
            estimates[n] = 1 / root
            best = root if best is None or root > best else best
        window[n] = None if best is None else 1 / best
    prev = None
    for n in orders:
        rho = window[n]
        if rho is not None and prev is not None and rho > prev:
            raise AssertionError("window radius increased")
        prev = rho if rho is not None else prev
    return RadiusTrace(x0, orders, coeffs, tails, estimates, window, indeterminate, ec.precision_bits)


# -- reports ---------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    point: object
    value: object
    bound: object
    passed: bool | None  # None marks a skipped check
    note: str = ""


@dataclass
class VerificationReport:
    construction: str
    precision_bits: int
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add(self, *args, **kw) -> CheckResult:
        r = CheckResult(*args, **kw)
        self.checks.append(r)
        return r

    @property
    def failures(self) -> list:
        return [c for c in self.checks if c.passed is False]

    @property
    def skipped(self) -> list:
        return [c for c in self.checks if c.passed is None]

    @property
    def passed(self) -> bool:
        return not self.failures and any(c.passed for c in self.checks)

    def _cell(self, v) -> str:
        if v is None:
            return ""
        if isinstance(v, Fraction):
            return format_endpoint(v)
        if hasattr(v, "_mpf_"):
            return format_number(v, self.precision_bits)
        return str(v)

    @staticmethod
    def _verdict(c: CheckResult) -> str:
        return {True: "pass", False: "FAIL", None: "skipped"}[c.passed]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "point", "value", "bound", "verdict", "note"])
        for c in self.checks:
            w.writerow([c.name, self._cell(c.point), self._cell(c.value), self._cell(c.bound), self._verdict(c), c.note])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "construction": self.construction,
            "precision_bits": self.precision_bits,
            "passed": self.passed,
            "counts": self.counts(),
            "checks": [
                {
                    "name": c.name,
                    "point": self._cell(c.point),
                    "value": self._cell(c.value),
                    "bound": self._cell(c.bound),
                    "verdict": self._verdict(c),
                    "note": c.note,
                }
                for c in self.checks
            ],
            "notes": self.notes,
        }
        return json.dumps(doc, indent=2)

    def counts(self) -> dict:
        out: dict = {}
        for c in self.checks:
            slot = out.setdefault(c.name, {"pass": 0, "FAIL": 0, "skipped": 0})
            slot[self._verdict(c)] += 1
        return out

    def render(self, detail: bool = False) -> str:
        lines = [f"construction: {self.construction}", f"precision: {self.precision_bits} bits"]
        for name, cnt in self.counts().items():
            lines.append(f"{name}: {cnt['pass']} pass, {cnt['FAIL']} fail, {cnt['skipped']} skipped")
        shown = self.checks if detail else self.failures
        limit = None if detail else 20
        for c in shown[:limit]:
            lines.append(
                f"  [{self._verdict(c)}] {c.name} at {self._cell(c.point)}: value={self._cell(c.value)} "
                f"bound={self._cell(c.bound)} {c.note}".rstrip()
            )
        if limit is not None and len(shown) > limit:
            lines.append(f"  ... {len(shown) - limit} more failures")
        lines += self.notes
        lines.append("verdict: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


# -- zero-set verification -------------------------------------------------


def parse_grid(spec: str) -> tuple:
    """``"a:b:n"`` -> ``(a, b, n)`` with exact endpoints."""
    try:
        a, b, n = spec.split(":")
        lo, hi, count = exact(a), exact(b), int(n)
    except (ValueError, TypeError) as exc:
        raise InputError(f"grid must look like a:b:n, got {spec!r}") from exc
    if count < 1 or hi < lo or (count > 1 and hi == lo):
        raise InputError(f"bad grid {spec!r}")
    return lo, hi, count


def grid_points(grid) -> list:
    lo, hi, n = grid
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def verify_zero_set(
    expr: FnExpr,
    Z: ZeroSetSpec,
    seed: int = 0,
    n_in: int = 200,
    n_out: int = 1000,
    window=(-10, 10),
    grid=None,
    ec: EvalContext | None = None,
    name: str | None = None,
) -> VerificationReport:
    """Exact zeros on sampled points of ``Z`` and certified nonzeros off it."""
    ec = ec or EvalContext()
    rng = random.Random(seed)
    rep = VerificationReport(name or expr.describe(), ec.precision_bits)
    lo, hi = exact(window[0]), exact(window[1])
    inside = Z.sample_members(rng, n_in, (lo, hi))
    if grid is not None:
        outside = grid_points(grid)
    else:
        outside = [_random_point(rng, lo, hi) for _ in range(n_out)]
    for x in inside:
        e = expr.evaluate(x, ec)
        rep.add("exact zero on Z", x, e.value, e.tail, e.is_exact_zero)
    for x in outside:
        try:
            member = Z.membership(x)
        except Undecidable as exc:
            rep.add("membership", x, None, None, None, f"undecidable: {exc}")
            continue
        e = expr.evaluate(x, ec)
        if member:
            rep.add("exact zero on Z", x, e.value, e.tail, e.is_exact_zero)
        else:
            rep.add("nonzero off Z", x, e.value, e.tail, bool(abs(e.value) > e.tail), "underflow" if e.annotations else "")
    return rep


# -- boundary flatness -----------------------------------------------------


def _find_bumpsum(expr: FnExpr):
    if isinstance(expr, (BumpSum, Bump)):
        return expr
    for ch in expr.children():
        hit = _find_bumpsum(ch)
        if hit is not None:
            return hit
    return None


def _kernel_certificate(expr, x: Fraction, c: Fraction, k: int, delta: Fraction, ec):
    """Bound for ``|f^(k-1)(x)| / (x - c)`` from the kernel owning ``x``."""
    if isinstance(expr, BumpSum):
        K = expr.kernel_at(x)
    elif isinstance(expr, Bump):
        K = expr.kernel if expr.kernel.inside(x) else None
    else:
        return None
    if K is None:
        return ec.mp.mpf(0)
    if not K.has_left or K.a < c:
        return None
    # x - c >= x - a, and x stays below c + delta
    return flatness_bound(K, k, c + delta - K.a, ec.mp)


def flatness_report(
    expr: FnExpr,
    c,
    orders,
    deltas,
    Z: ZeroSetSpec | None = None,
    seed: int = 0,
    samples: int = 200,
    ec: EvalContext | None = None,
) -> VerificationReport:
    """Sampled ``sup |f^(k-1)(x)| / (x - c)`` on ``(c, c + delta)`` per order and delta."""
    ec = ec or EvalContext()
    mp = ec.mp
    c = exact(c)
    carrier = _find_bumpsum(expr)
    if Z is None and isinstance(carrier, BumpSum):
        Z = carrier.zeroset
    if Z is None:
        raise InputError("flatness report needs the zero set (pass Z)")
    if not Z.is_boundary(c):
        raise PreconditionViolation(f"{format_endpoint(c)} is not a boundary point of Z", "boundary flatness")
    deltas = sorted((exact(d) for d in deltas), reverse=True)
    orders = sorted(set(int(k) for k in orders))
    if not orders or orders[0] < 1:
        raise InputError("flatness orders must be >= 1")
    rng = random.Random(seed)
    rep = VerificationReport(f"flatness of {expr.describe()} at {format_endpoint(c)}", ec.precision_bits)
    certify = expr is carrier
    for k in orders:
        previous = None
        for d in deltas:
            pts = [_random_point(rng, c, c + d) for _ in range(samples)]
            pts = [x for x in pts if x > c]
            # add midpoints of the gaps met, where bumps peak
            extra = set()
            for x in pts:
                try:
                    gap = Z.locate_gap(x)
                except Undecidable:
                    continue
                if gap is not None:
                    a = gap.a if gap.a != -INF else x - 1
                    b = gap.b if gap.b != INF else x + 1
                    mid = (a + b) / 2
                    if c < mid < c + d:
                        extra.add(mid)
            pts = sorted(set(pts) | extra)
            sup = mp.mpf(0)
            cert = mp.mpf(0) if certify else None
            for x in pts:
                j = expr.jet(x, k - 1, ec)
                val = abs(j.derivative(k - 1)) / to_mpf(mp, x - c)
                sup = max(sup, val)
                if cert is not None:
                    b = _kernel_certificate(expr, x, c, k, d, ec)
                    cert = None if b is None else max(cert, b)
            label = f"k={k} delta={format_endpoint(d)}"
            if cert is not None:
                rep.add("sup below certificate", label, sup, cert, bool(sup <= cert))
            else:
                rep.add("sampled sup", label, sup, None, True, "no kernel certificate for this expression")
            if previous is not None:
                rep.add("sup decreases with delta", label, sup, previous, bool(sup < previous))
            previous = sup
    rep.notes.append(NOT_CLAIMED)
    return rep


# -- dimension-one obstruction ---------------------------------------------


def dim_le_one_demo(
    f: FnExpr,
    g: FnExpr,
    Z: ZeroSetSpec,
    x0,
    candidates=None,
    ec: EvalContext | None = None,
) -> VerificationReport:
    """``h = g(x0) f - f(x0) g`` vanishes at ``x0`` off ``Z``; look for ``h != 0``."""
    ec = ec or EvalContext()
    mp = ec.mp
    x0 = exact(x0)
    if Z.membership(x0):
        raise InputError(f"x0 = {format_endpoint(x0)} lies in Z")
    f0, g0 = f.evaluate(x0, ec), g.evaluate(x0, ec)
    rep = VerificationReport(f"h = g(x0) f - f(x0) g with x0 = {format_endpoint(x0)}", ec.precision_bits)

    def h_at(x):
        fx, gx = f.evaluate(x, ec), g.evaluate(x, ec)
        val = g0.value * fx.value - f0.value * gx.value
        # rounding is absorbed by a guard of one unit at the exported precision
        guard = (abs(g0.value * fx.value) + abs(f0.value * gx.value)) * mp.ldexp(1, -ec.precision_bits)
        tail = (
            abs(g0.value) * fx.tail + g0.tail * abs(fx.value) + g0.tail * fx.tail
            + abs(f0.value) * gx.tail + f0.tail * abs(gx.value) + f0.tail * gx.tail
        )
        return val, tail + guard

    v0, b0 = h_at(x0)
    rep.add("h(x0) = 0", x0, v0, b0, bool(abs(v0) <= b0))
    if candidates is None:
        candidates = [x0 + 1, x0 - Fraction(1, 2), x0 + Fraction(1, 3), x0 - 2]
    witness = None
    for x in candidates:
        x = exact(x)
        if x == x0 or Z.membership(x):
            continue
        v, b = h_at(x)
        ok = bool(abs(v) > 10 * b)
        rep.add("witness h(x1) != 0", x, v, b, ok if ok else None, "" if ok else "not separated from zero")
        if ok:
            witness = x
            break
    if witness is None:
        rep.notes.append("dependent pair: h vanishes at every candidate, consistent with g = c f")
    else:
        rep.notes.append(
            "h is not identically zero yet vanishes on Z and at x0, so no two-dimensional space of "
            "functions with zero set exactly Z exists"
        )
    return rep


__all__ = [
    "CheckResult",
    "RadiusTrace",
    "VerificationReport",
    "dim_le_one_demo",
    "flatness_report",
    "grid_points",
    "parse_grid",
    "radius_trace",
    "verify_zero_set",
]
