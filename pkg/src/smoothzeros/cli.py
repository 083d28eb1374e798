"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 violated mathematical precondition,
4 refusal by the series cost model.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import algebra, analysis
from .constructions import (
    EvalContext,
    build_entire,
    build_lerch,
    build_pringsheim_g,
    build_pringsheim_zero,
    build_singular,
    build_smooth,
    bseq,
    cseq,
    dumps,
    lineable_family_member,
    loads,
    monotone_primitive,
    certified_shift,
)
from .constructions.nodes import FnExpr, PringsheimSeries, Shift
from .errors import InputError, PreconditionViolation, SmoothZerosError
from .numkit import exact, format_number
from .zeroset import classify, format_endpoint, parse_zeroset


@dataclass
class RunConfig:
    precision_bits: int = 256
    lerch_order_cap: int = 8
    g_term_cap: int = 16
    weierstrass_max_factors: int = 5000
    seed: int = 0
    fmt: str = "text"
    out: str | None = None

    def context(self) -> EvalContext:
        return EvalContext(
            self.precision_bits,
            lerch_order_cap=self.lerch_order_cap,
            g_term_cap=self.g_term_cap,
            weierstrass_max_factors=self.weierstrass_max_factors,
        )


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def load_zeroset(path: str):
    return parse_zeroset(_read(path))


def load_expr(spec: str) -> FnExpr:
    """Expression file, or a catalog shorthand: ``lerch[:a]``, ``g[:K]``, ``h``."""
    head, _, arg = spec.partition(":")
    if head == "lerch" and not Path(spec).exists():
        return build_lerch(int(arg) if arg else 3)
    if head == "g" and not Path(spec).exists():
        return build_pringsheim_g(int(arg) if arg else None)
    if head == "h" and not Path(spec).exists():
        return Shift(build_pringsheim_g(), certified_shift(PringsheimSeries()))
    return loads(_read(spec))


def parse_orders(text: str) -> list[int]:
    try:
        if ".." in text:
            a, b = text.split("..")
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(t) for t in text.split(",") if t]
    except ValueError as exc:
        raise InputError(f"orders must look like n1..n2 or a,b,c; got {text!r}") from exc


def parse_points(text: str) -> list[Fraction]:
    return [exact(t) for t in text.split(",") if t]


def _window(text: str) -> tuple:
    try:
        a, b = text.split(":")
        return exact(a), exact(b)
    except ValueError as exc:
        raise InputError(f"window must look like a:b, got {text!r}") from exc


def _table(cfg: RunConfig, header: list, rows: list) -> str:
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue().rstrip("\n")
    if cfg.fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2)
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(str(h)) for i, h in enumerate(header)]
    lines = ["  ".join(str(h).ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines)


def _num(cfg: RunConfig, v) -> str:
    return format_number(v, cfg.precision_bits)


# -- commands ------------------------------------------------------------


def cmd_classify(args, cfg: RunConfig) -> str:
    Z = load_zeroset(args.zeroset)
    rep = classify(Z)
    if cfg.fmt == "json":
        return json.dumps({"zeroset": Z.to_dict(), "classification": rep.as_dict()}, indent=2, sort_keys=True)
    if cfg.fmt == "csv":
        rows = [[name, "yes" if getattr(rep, name) else "no", rep.reasons.get(name, "")] for name in rep.FIELDS]
        return _table(cfg, ["property", "possible", "condition"], rows)
    return f"zero set: {Z.describe()}\n" + rep.render()


def cmd_build(args, cfg: RunConfig) -> str:
    Z = load_zeroset(args.zeroset)
    kind = args.kind
    if kind == "smooth":
        expr = build_smooth(Z)
    elif kind == "entire":
        expr = build_entire(Z)
    elif kind == "singular":
        expr = build_singular(Z, args.base)
    elif kind == "pringsheim":
        expr = build_pringsheim_zero(Z, args.terms)
    elif kind == "lineable":
        phi = args.phi if args.phi.startswith("exp:") else [t for t in args.phi.split(",")]
        expr = lineable_family_member(Z, phi, args.terms)
    elif kind == "primitive":
        expr = monotone_primitive(Shift(build_pringsheim_g(args.terms), certified_shift(PringsheimSeries())), 0, cfg.context())
    elif kind == "algebra":
        basis = algebra.make_basis(parse_orders(args.primes))
        poly = algebra.parse_polynomial(json.loads(args.poly), basis.dim)
        elem = algebra.AlgebraElement(exact(args.shift), build_smooth(Z), poly, basis)
        expr = algebra.compose_element(elem)
    else:  # argparse restricts choices
        raise InputError(f"unknown construction {kind!r}")
    return dumps(expr)


def cmd_eval(args, cfg: RunConfig) -> str:
    expr = load_expr(args.expr)
    ec = cfg.context()
    if args.grid:
        pts = analysis.grid_points(analysis.parse_grid(args.grid))
    else:
        pts = parse_points(args.x)
    rows = []
    for x in pts:
        e = expr.evaluate(x, ec)
        rows.append([format_endpoint(x), _num(cfg, e.value), _num(cfg, e.tail)])
    return _table(cfg, ["x", "value", "tail_bound"], rows)


def cmd_jet(args, cfg: RunConfig) -> str:
    expr = load_expr(args.expr)
    j = expr.jet(exact(args.x), args.order, cfg.context())
    rows = [[k, _num(cfg, c), _num(cfg, t)] for k, (c, t) in enumerate(zip(j.coeffs, j.tail))]
    return _table(cfg, ["k", "coefficient", "tail_bound"], rows)


def cmd_radius(args, cfg: RunConfig) -> str:
    expr = load_expr(args.expr)
    ec = cfg.context()
    orders = parse_orders(args.orders)
    per_order = None
    if isinstance(expr, PringsheimSeries) and expr.terms is None:
        K = args.terms
        per_order = (lambda n: PringsheimSeries(K)) if K else (lambda n: PringsheimSeries(n + 3))
    trace = analysis.radius_trace(expr, exact(args.x), orders, ec, per_order)
    if cfg.fmt == "text":
        return trace.render()
    cols = ["n", "c_n", "tail_bound", "r_n", "rho_N"]
    rows = [[n] + ["-" if v is None else _num(cfg, v) for v in rest] for n, *rest in trace.rows()]
    return _table(cfg, cols, rows)


def _emit_report(rep, cfg: RunConfig, detail: bool = False) -> str:
    if cfg.fmt == "csv":
        return rep.to_csv().rstrip("\n")
    if cfg.fmt == "json":
        return rep.to_json()
    return rep.render(detail)


def cmd_verify(args, cfg: RunConfig) -> str:
    expr = load_expr(args.expr)
    Z = load_zeroset(args.zeroset)
    grid = analysis.parse_grid(args.grid) if args.grid else None
    rep = analysis.verify_zero_set(
        expr, Z, cfg.seed, args.in_samples, args.out_samples, _window(args.window), grid, cfg.context()
    )
    args._failed = not rep.passed
    return _emit_report(rep, cfg)


def cmd_flatness(args, cfg: RunConfig) -> str:
    expr = load_expr(args.expr)
    Z = load_zeroset(args.zeroset) if args.zeroset else None
    deltas = parse_points(args.deltas)
    rep = analysis.flatness_report(
        expr, exact(args.c), parse_orders(args.orders), deltas, Z, cfg.seed, args.samples, cfg.context()
    )
    args._failed = not rep.passed
    return _emit_report(rep, cfg, detail=True)


def cmd_expand(args, cfg: RunConfig) -> str:
    basis = algebra.make_basis(parse_orders(args.primes))
    poly = algebra.parse_polynomial(json.loads(args.poly), basis.dim)
    elem = algebra.AlgebraElement(exact(args.shift), None, poly, basis)
    cert = algebra.nonzero_certificate(elem)
    if cfg.fmt == "json":
        doc = elem.to_dict()
        doc["certificate"] = str(cert)
        return json.dumps(doc, indent=2)
    rows = [[str(c), " ".join(map(str, v.coords))] for c, v in elem.expansion]
    body = _table(cfg, ["coefficient", "exponent_vector"], rows)
    if cfg.fmt == "csv":
        return body
    return f"basis: {', '.join(basis.descriptors())}\n{body}\ncertificate: {cert}"


def cmd_freeness(args, cfg: RunConfig) -> str:
    basis = algebra.make_basis(parse_orders(args.primes))
    rep = algebra.freeness_check(basis, args.trials, cfg.seed, args.max_degree)
    args._failed = not rep.ok
    return rep.render()


def cmd_bn(args, cfg: RunConfig) -> str:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    if args.c:
        return str(cseq(args.n))
    return str(bseq(args.n))


# -- parser --------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--precision", type=int, default=argparse.SUPPRESS, help="exported precision in bits (default 256)")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for sampled checks (default 0)")
    p.add_argument("--format", choices=("text", "csv", "json"), default=argparse.SUPPRESS, dest="fmt")
    p.add_argument("--out", default=argparse.SUPPRESS, help="write output to PATH instead of stdout")
    p.add_argument("--lerch-order-cap", type=int, default=argparse.SUPPRESS)
    p.add_argument("--g-term-cap", type=int, default=argparse.SUPPRESS)
    p.add_argument("--weierstrass-cutoff", type=int, default=argparse.SUPPRESS, dest="weierstrass_max_factors")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="smoothzeros",
        description="Certified functions with prescribed zero sets.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="which constructions apply to a zero set")
    p.add_argument("zeroset")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("build", parents=[common], help="build an expression for a zero set")
    p.add_argument("kind", choices=("smooth", "entire", "singular", "pringsheim", "lineable", "primitive", "algebra"))
    p.add_argument("zeroset")
    p.add_argument("--terms", type=int, default=None, help="fixed term count K for g")
    p.add_argument("--base", type=int, default=3, help="Lerch base")
    p.add_argument("--phi", default="1", help="multiplier: ascending coefficients 'c0,c1,...' or 'exp:c'")
    p.add_argument("--primes", default="2", help="basis primes, e.g. 2,3")
    p.add_argument("--poly", default='[["1", [1]]]', help="polynomial as [[coeff, [exponents]], ...]")
    p.add_argument("--shift", default="-1")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("eval", parents=[common], help="evaluate with tail bounds")
    p.add_argument("expr")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--x", help="comma-separated points")
    g.add_argument("--grid", help="a:b:n")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("jet", parents=[common], help="Taylor coefficients with tail bounds")
    p.add_argument("expr")
    p.add_argument("--x", required=True)
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(func=cmd_jet)

    p = sub.add_parser("radius", parents=[common], help="finite-order radius trace")
    p.add_argument("expr")
    p.add_argument("--x", default="0")
    p.add_argument("--orders", default="1..8")
    p.add_argument("--terms", type=int, default=None)
    p.set_defaults(func=cmd_radius)

    p = sub.add_parser("verify", parents=[common], help="check the zero set on samples")
    p.add_argument("expr")
    p.add_argument("zeroset")
    p.add_argument("--grid", default=None)
    p.add_argument("--window", default="-10:10")
    p.add_argument("--in-samples", type=int, default=200)
    p.add_argument("--out-samples", type=int, default=1000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("flatness", parents=[common], help="boundary flatness schedule")
    p.add_argument("expr")
    p.add_argument("--zeroset", default=None)
    p.add_argument("--c", default="0")
    p.add_argument("--orders", default="1..3")
    p.add_argument("--deltas", default="1/10,1/100,1/1000")
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_flatness)

    p = sub.add_parser("expand", parents=[common], help="expand an algebra element")
    p.add_argument("--primes", required=True)
    p.add_argument("--poly", required=True)
    p.add_argument("--shift", default="-1")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("freeness", parents=[common], help="seeded freeness trials")
    p.add_argument("--primes", default="2,3,5")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-degree", type=int, default=4)
    p.set_defaults(func=cmd_freeness)

    p = sub.add_parser("bn", parents=[common], help="exact b_n (or c_n with --c)")
    p.add_argument("n", type=int)
    p.add_argument("--c", action="store_true")
    p.set_defaults(func=cmd_bn)
    return parser


def _config(args) -> RunConfig:
    cfg = RunConfig()
    for name in ("precision_bits", "seed", "fmt", "out", "lerch_order_cap", "g_term_cap", "weierstrass_max_factors"):
        key = "precision" if name == "precision_bits" else name
        if hasattr(args, key):
            setattr(cfg, name, getattr(args, key))
    if cfg.precision_bits < 16:
        raise InputError("precision must be at least 16 bits")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        text = args.func(args, cfg)
    except PreconditionViolation as exc:
        where = f" [{exc.reason}]" if exc.reason else ""
        print(f"precondition violated{where}: {exc}", file=sys.stderr)
        return exc.exit_code
    except SmoothZerosError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except json.JSONDecodeError as exc:
        print(f"error: bad JSON argument: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        Path(cfg.out).write_text(text + "\n")
    else:
        print(text)
    return 1 if getattr(args, "_failed", False) else 0


if __name__ == "__main__":
    sys.exit(main())
