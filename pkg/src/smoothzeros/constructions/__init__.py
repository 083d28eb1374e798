from .builders import (
    build_entire,
    build_lerch,
    build_pringsheim_g,
    build_pringsheim_zero,
    build_singular,
    build_smooth,
    certified_shift,
    evaluate,
    jet,
    lineable_family_member,
    monotone_primitive,
    poly_from_roots,
    sup_bound,
)
from .context import EvalContext, Evaluation, Rate, SeriesBound
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
from .serialize import dumps, expr_from_dict, loads
from .series import bseq, cseq
from .weierstrass import WeierstrassProduct

__all__ = [
    "Bump",
    "BumpSum",
    "Const",
    "Entire",
    "EvalContext",
    "Evaluation",
    "ExpAffine",
    "FnExpr",
    "LerchSeries",
    "PolyCombine",
    "PringsheimSeries",
    "Primitive",
    "Product",
    "Rate",
    "SeriesBound",
    "Shift",
    "WeierstrassProduct",
    "bseq",
    "build_entire",
    "build_lerch",
    "build_pringsheim_g",
    "build_pringsheim_zero",
    "build_singular",
    "build_smooth",
    "certified_shift",
    "cseq",
    "dumps",
    "evaluate",
    "expr_from_dict",
    "jet",
    "lineable_family_member",
    "loads",
    "monotone_primitive",
    "poly_from_roots",
    "sup_bound",
]
