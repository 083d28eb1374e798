"""JSON round trip for expression DAGs."""

from __future__ import annotations

import json

from ..bumps import BumpKernel
from ..errors import InputError
from ..zeroset import from_dict as zeroset_from_dict
from .nodes import (
    Bump,
    BumpSum,
    Const,
    Entire,
    ExpAffine,
    FnExpr,
    LerchSeries,
    PolyCombine,
    PringsheimSeries,
    Primitive,
    Product,
    Shift,
)
from .weierstrass import WeierstrassProduct


def _poly(doc) -> dict:
    out = {}
    for coeff, mono in doc:
        out[tuple(mono)] = coeff
    return out


def expr_from_dict(doc: dict) -> FnExpr:
    if not isinstance(doc, dict) or "node" not in doc:
        raise InputError("expression document must be an object with a 'node' field")
    kind = doc["node"]
    try:
        if kind == "Const":
            return Const(doc["c"])
        if kind == "Entire":
            return Entire(tuple(doc["coeffs"]))
        if kind == "Bump":
            k = doc["kernel"]
            return Bump(BumpKernel(k["a"], k["b"]))
        if kind == "BumpSum":
            return BumpSum(zeroset_from_dict(doc["zeroset"]))
        if kind == "LerchSeries":
            return LerchSeries(int(doc.get("base", 3)), doc.get("terms"))
        if kind == "PringsheimSeries":
            return PringsheimSeries(doc.get("terms"))
        if kind == "WeierstrassProduct":
            return WeierstrassProduct(doc.get("step", "1"))
        if kind == "Shift":
            return Shift(expr_from_dict(doc["child"]), doc["c"])
        if kind == "Product":
            return Product(tuple(expr_from_dict(c) for c in doc["children"]))
        if kind == "ExpAffine":
            return ExpAffine(doc["rate"], doc["a"], expr_from_dict(doc["child"]))
        if kind == "PolyCombine":
            return PolyCombine(_poly(doc["poly"]), tuple(expr_from_dict(c) for c in doc["children"]))
        if kind == "Primitive":
            return Primitive(expr_from_dict(doc["child"]), doc.get("basepoint", "0"), doc.get("method", "auto"))
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad {kind} node: {exc}") from exc
    raise InputError(f"unknown node kind {kind!r}")


def dumps(expr: FnExpr, indent: int | None = 2) -> str:
    return json.dumps(expr.to_dict(), indent=indent, sort_keys=True)


def loads(text: str) -> FnExpr:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"not valid JSON: {exc}") from exc
    return expr_from_dict(doc)
