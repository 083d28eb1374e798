"""Acceptance criteria 1-9, each at its stated tolerance.

A summary line per criterion is printed at the end of the pytest run by the
hook in conftest.py.  Oracles are computed here independently of the code
under test (exact integer or rational arithmetic, closed forms, sympy).
"""

import random
from fractions import Fraction

import pytest

from smoothzeros.algebra import compose_element, AlgebraElement, expand, make_basis, random_polynomial
from smoothzeros.analysis import dim_le_one_demo, flatness_report, radius_trace, verify_zero_set
from smoothzeros.bumps import BumpKernel, phi_deriv_recurrence, phi_jet
from smoothzeros.cli import main
from smoothzeros.constructions import (
    Entire,
    EvalContext,
    PringsheimSeries,
    Product,
    bseq,
    build_entire,
    build_lerch,
    build_pringsheim_zero,
    build_singular,
    build_smooth,
    cseq,
    evaluate,
    jet,
)
from smoothzeros.numkit import to_mpf, working_context
from smoothzeros.zeroset import CantorMiddleThirds, FiniteSet, IntegerLattice, ReciprocalSeq, classify

F = Fraction


# -- 1. integer recursion ------------------------------------------------


def test_criterion_1_integer_recursion():
    assert cseq(1) == 8
    assert (bseq(1), bseq(2), bseq(3)) == (20, 1144, 2646088)
    for n in range(1, 13):
        assert bseq(n + 1) >= 2 * bseq(n)


# -- 2. bump dual path ---------------------------------------------------


def test_criterion_2_bump_dual_path():
    ctx = working_context(256)
    K = BumpKernel(0, 1)
    rng = random.Random(2024)
    tol = ctx.mpf(2) ** -200
    for _ in range(100):
        x = F(rng.randint(1, 10**6 - 1), 10**6)
        j = phi_jet(K, x, 10, ctx)
        for k in range(11):
            a = j.derivative(k)
            b = phi_deriv_recurrence(K, k, x, ctx)
            assert abs(a - b) <= tol * abs(b)
    for end in (0, 1):
        assert phi_jet(K, end, 10, ctx).is_zero


# -- 3. exact zero sets --------------------------------------------------

BUILDERS = {
    "smooth": ("smooth_exact_possible", build_smooth),
    "entire": ("entire_exact_possible", build_entire),
    "singular": ("singular_exact_possible", build_singular),
    "pringsheim": ("pringsheim_exact_possible", build_pringsheim_zero),
}
SETS = {
    "finite": FiniteSet([0, 1, 2]),
    "reciprocal": ReciprocalSeq(),
    "cantor": CantorMiddleThirds(20),
    "lattice": IntegerLattice(1),
}
CASES = [
    (zname, kind)
    for zname, Z in SETS.items()
    for kind, (field, _) in BUILDERS.items()
    if getattr(classify(Z), field)
]


@pytest.mark.parametrize("zname, kind", CASES, ids=[f"{z}-{k}" for z, k in CASES])
def test_criterion_3_exact_zero_sets(zname, kind):
    Z = SETS[zname]
    expr = BUILDERS[kind][1](Z)
    rep = verify_zero_set(expr, Z, seed=3, n_in=200, n_out=1000)
    assert rep.passed, rep.render()
    counts = rep.counts()
    assert counts["exact zero on Z"]["pass"] >= 200
    assert counts["nonzero off Z"]["pass"] + counts["nonzero off Z"]["skipped"] > 0
    in_set = [c for c in rep.checks if c.name == "exact zero on Z"]
    assert all(c.value == 0 and c.bound == 0 for c in in_set)


def test_criterion_3_negative_controls():
    wrong = verify_zero_set(build_smooth(FiniteSet([0, 1, 2])), ReciprocalSeq(), seed=3, n_in=200, n_out=1000)
    assert not wrong.passed
    wrong = verify_zero_set(build_entire(FiniteSet([0, 1, 2])), IntegerLattice(1), seed=3, n_in=200, n_out=1000)
    assert not wrong.passed


# -- 4. flatness at the accumulation point -------------------------------


def flatness_oracle_log(delta_inv: int, mp):
    """log of an upper bound for sup |f(x)|/x on (0, 1/delta_inv).

    Such x lie in gaps (1/(n+1), 1/n) with n >= delta_inv, of width
    w = 1/(n(n+1)); there the bump is at most exp(-8/w^2) and 1/x <= n+1.
    The bound decreases in n, so n = delta_inv gives the maximum.
    """
    n = delta_inv
    return mp.log(n + 1) - 8 * (n * (n + 1)) ** 2


def test_criterion_4_flatness():
    ec = EvalContext()
    mp = ec.mp
    Z = ReciprocalSeq()
    rep = flatness_report(build_smooth(Z), 0, [1], ["1/10", "1/100", "1/1000"], seed=0, ec=ec)
    sups = {c.point: c.value for c in rep.checks if c.name == "sup below certificate"}
    s1, s2, s3 = sups["k=1 delta=1/10"], sups["k=1 delta=1/100"], sups["k=1 delta=1/1000"]
    assert s1 > s2 > s3 > 0
    assert s2 < mp.mpf(10) ** -40
    for s, d in ((s1, 10), (s2, 100), (s3, 1000)):
        assert mp.log(s) <= flatness_oracle_log(d, mp)
    assert rep.passed


# -- 5. algebra exactness and freeness -----------------------------------

SIX_TERMS = {(2, 1): 1, (1, 1): -2, (0, 1): 1, (2, 0): -1, (1, 0): 2, (0, 0): -1}


def test_criterion_5_algebra():
    B = make_basis([2, 3])
    terms = expand({(2, 1): 1}, -1, B)
    assert {v.coords: c for c, v in terms} == SIX_TERMS
    assert terms[0][1].coords == (2, 1) and terms[0][0] == 1

    rng = random.Random(55)
    primes = (2, 3, 5)
    for _ in range(100):
        d = rng.randint(1, 3)
        P = random_polynomial(rng, d, max_degree=4)
        t = expand(P, -1, make_basis(primes[:d]))
        vecs = [v.coords for _, v in t]
        assert t and len(set(vecs)) == len(vecs)
        assert t[0][0] != 0

    ec = EvalContext()
    Z = ReciprocalSeq()
    inner = build_smooth(Z)
    f = compose_element(AlgebraElement(-1, inner, {(2, 1): 1}, B))
    for z in Z.sample_members(random.Random(5), 100, (-1, 1)):
        assert evaluate(inner, z, ec).is_exact_zero
        assert evaluate(f, z, ec).is_exact_zero

    g = compose_element(AlgebraElement(-1, build_smooth(FiniteSet([0])), {(2, 1): 1}, B))
    mp = ec.mp
    s = mp.exp(-1)
    want = (mp.exp(mp.sqrt(2) * s) - 1) ** 2 * (mp.exp(mp.sqrt(3) * s) - 1)
    got = evaluate(g, 1, ec)
    assert evaluate(g, 0, ec).is_exact_zero
    assert got.value != 0 and abs(got.value - want) <= got.tail + mp.mpf(2) ** -250 * want


# -- 6. radius collapse --------------------------------------------------


def g_coefficient_oracle(n: int, K: int) -> Fraction:
    """|c_n| at 0 for odd n: every term has the same sign, so the sum is exact."""
    return sum((Fraction(bseq(k)) ** (1 - k + n) for k in range(1, K + 1)), Fraction(0)) / _fact(n)


def _fact(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def test_criterion_6_radius_collapse():
    ec = EvalContext(4096)
    mp = ec.mp
    odd = [3, 5, 7, 9, 11, 13]
    trace = radius_trace(None, 0, odd, ec, per_order=lambda n: PringsheimSeries(n + 3))
    r = [trace.estimates[n] for n in odd]
    assert all(a > b for a, b in zip(r, r[1:]))
    assert mp.mpf("1e-3") < r[0] < mp.mpf("1e-1")
    assert r[-1] < mp.mpf(10) ** -40
    for n, rn in zip(odd, r):
        oracle = to_mpf(mp, g_coefficient_oracle(n, n + 3)) ** (-mp.mpf(1) / n)
        assert abs(rn - oracle) <= mp.mpf(2) ** -1000 * oracle

    control = build_entire(FiniteSet([0, 1, -1, 2, -2]))
    t2 = radius_trace(control, F(3, 10), range(1, 13), ec)
    assert t2.window[12] >= mp.mpf("0.1")
    # oracle: exact Taylor coefficients of x(x^2-1)(x^2-4) at 3/10
    x0 = F(3, 10)
    coeffs = [F(0), F(4), F(0), F(-5), F(0), F(1)]
    shifted = []
    for k in range(len(coeffs)):
        shifted.append(sum(c * _binom(m, k) * x0 ** (m - k) for m, c in enumerate(coeffs) if m >= k))
    rho = min(to_mpf(mp, abs(c)) ** (-mp.mpf(1) / n) for n, c in enumerate(shifted) if n >= 1 and c != 0)
    assert abs(t2.window[12] - rho) <= mp.mpf(2) ** -1000


def _binom(m: int, k: int) -> int:
    return _fact(m) // (_fact(k) * _fact(m - k))


# -- 7. Lerch checkpoints ------------------------------------------------


def test_criterion_7_lerch():
    ec = EvalContext()
    mp = ec.mp
    L = build_lerch()
    v = evaluate(L, 0, ec)
    assert abs(v.value - (mp.e - 1)) <= mp.mpf(10) ** -30
    c2 = jet(L, 0, 2, ec).coeffs[2]
    want = -(mp.exp(9) - 1) / 2
    assert abs(c2 - want) <= mp.mpf(10) ** -20 * abs(want)


# -- 8. dimension-one obstruction ----------------------------------------


def test_criterion_8_dim_le_one():
    ec = EvalContext()
    mp = ec.mp
    Z = FiniteSet([0])
    f = build_smooth(Z)
    g = Product((Entire((1, 1)), f))
    rep = dim_le_one_demo(f, g, Z, 1, [2], ec)
    at_x0 = [c for c in rep.checks if c.name == "h(x0) = 0"][0]
    assert at_x0.passed
    wit = [c for c in rep.checks if c.name == "witness h(x1) != 0"][0]
    assert wit.point == 2 and wit.passed and abs(wit.value) > 10 * wit.bound
    # h(x) = f(1) f(x) (1 - x), so h(2) = -exp(-1) exp(-1/4)
    assert abs(wit.value + mp.exp(-1) * mp.exp(-mp.mpf(1) / 4)) <= wit.bound + mp.mpf(2) ** -250


# -- 9. determinism ------------------------------------------------------


def test_criterion_9_determinism(tmp_path):
    zs = tmp_path / "recip.json"
    zs.write_text(ReciprocalSeq().dumps())
    lat = tmp_path / "lattice.json"
    lat.write_text(IntegerLattice(1).dumps())
    built = tmp_path / "f.json"
    assert main(["build", "smooth", str(zs), "--out", str(built)]) == 0
    commands = [
        ["classify", str(zs)],
        ["build", "entire", str(lat)],
        ["build", "singular", str(zs)],
        ["eval", "lerch", "--x", "0,1/3"],
        ["jet", "g", "--x", "0", "--order", "3"],
        ["radius", "g", "--orders", "3..7", "--precision", "1024"],
        ["verify", str(built), str(zs), "--seed", "9"],
        ["verify", str(built), str(zs), "--seed", "9", "--format", "json"],
        ["flatness", str(built), "--orders", "1..2", "--samples", "50"],
        ["expand", "--primes", "2,3", "--poly", '[["1", [2, 1]]]'],
        ["freeness", "--trials", "100", "--seed", "1"],
        ["bn", "5"],
    ]
    for i, cmd in enumerate(commands):
        outs = []
        for rerun in range(2):
            out = tmp_path / f"out{i}_{rerun}.txt"
            assert main(cmd + ["--out", str(out)]) == 0, cmd
            outs.append(out.read_bytes())
        assert outs[0] == outs[1], cmd
