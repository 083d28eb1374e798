import json
from fractions import Fraction

import pytest

from smoothzeros.analysis import (
    NOT_CLAIMED,
    dim_le_one_demo,
    flatness_report,
    grid_points,
    parse_grid,
    radius_trace,
    verify_zero_set,
)
from smoothzeros.constructions import (
    Const,
    Entire,
    EvalContext,
    PringsheimSeries,
    build_entire,
    build_pringsheim_zero,
    build_smooth,
)
from smoothzeros.errors import InputError, PreconditionViolation
from smoothzeros.zeroset import EmptySet, FiniteSet, IntegerLattice, ReciprocalSeq

F = Fraction


def test_radius_trace_polynomial_vanishes_beyond_degree(ec):
    t = radius_trace(Entire((1, 2, 3)), 0, range(1, 5), ec)
    assert t.estimates[3] is None and t.estimates[4] is None
    assert t.window[4] == t.window[2]
    assert NOT_CLAIMED in t.render()


def test_radius_trace_geometric(ec, mp):
    # 1/(1 - x/2) truncated: c_n = 2^-n gives r_n = 2 exactly
    coeffs = tuple(F(1, 2**n) for n in range(12))
    t = radius_trace(Entire(coeffs), 0, range(1, 11), ec)
    for n in range(1, 11):
        assert abs(t.estimates[n] - 2) < mp.mpf(2) ** -200
    assert t.to_csv().splitlines()[0] == "n,c_n,tail_bound,r_n,rho_N"


def test_radius_trace_per_order_on_g():
    ec = EvalContext(512)
    t = radius_trace(None, 0, [3, 5, 7], ec, per_order=lambda n: PringsheimSeries(n + 3))
    r = [t.estimates[n] for n in (3, 5, 7)]
    assert r[0] > r[1] > r[2]
    assert 1e-3 < r[0] < 1e-1


def test_radius_trace_rejects_bad_orders(ec):
    with pytest.raises(InputError):
        radius_trace(Const(1), 0, [0, 1], ec)


def test_grid_parsing():
    assert parse_grid("-1:1:3") == (F(-1), F(1), 3)
    assert grid_points(parse_grid("0:1:5")) == [0, F(1, 4), F(1, 2), F(3, 4), 1]
    for bad in ("1:0:3", "0:1", "a:b:c", "0:1:0"):
        with pytest.raises(InputError):
            parse_grid(bad)


def test_verify_smooth_reciprocal():
    ec = EvalContext(128)
    Z = ReciprocalSeq()
    rep = verify_zero_set(build_smooth(Z), Z, seed=1, n_in=50, n_out=200, window=(-2, 2), ec=ec)
    assert rep.passed
    counts = rep.counts()
    assert counts["exact zero on Z"]["pass"] >= 50
    assert counts["nonzero off Z"]["FAIL"] == 0


def test_verify_detects_wrong_construction():
    ec = EvalContext(64)
    rep = verify_zero_set(build_smooth(FiniteSet([0, 1])), FiniteSet([0, 2]), seed=0, n_in=10, n_out=0, ec=ec)
    assert not rep.passed and rep.failures
    assert "verdict: FAIL" in rep.render()


def test_verify_is_deterministic():
    ec = EvalContext(64)
    Z = IntegerLattice(1)
    a = verify_zero_set(build_entire(Z), Z, seed=3, n_in=10, n_out=20, window=(-3, 3), ec=ec)
    b = verify_zero_set(build_entire(Z), Z, seed=3, n_in=10, n_out=20, window=(-3, 3), ec=ec)
    assert a.to_csv() == b.to_csv() and a.to_json() == b.to_json()
    doc = json.loads(a.to_json())
    assert doc["passed"] is True and doc["precision_bits"] == 64


def test_verify_grid_on_pringsheim():
    ec = EvalContext(64)
    Z = FiniteSet([0, F(1, 2)])
    rep = verify_zero_set(build_pringsheim_zero(Z), Z, n_in=5, grid=parse_grid("-1:1:9"), ec=ec)
    assert rep.passed


def test_flatness_reciprocal():
    ec = EvalContext(128)
    Z = ReciprocalSeq()
    rep = flatness_report(build_smooth(Z), 0, [1, 2], ["1/10", "1/20", "1/100"], seed=0, samples=20, ec=ec)
    assert rep.passed
    sups = [c for c in rep.checks if c.name == "sup below certificate"]
    assert len(sups) == 6
    assert NOT_CLAIMED in rep.notes


def test_flatness_requires_boundary_point():
    with pytest.raises(PreconditionViolation):
        flatness_report(build_smooth(ReciprocalSeq()), F(2, 5), [1], ["1/10"])
    with pytest.raises(InputError):
        flatness_report(Const(1), 0, [1], ["1/10"])


def test_dim_demo_finds_witness():
    ec = EvalContext(128)
    Z = FiniteSet([0])
    f = build_smooth(Z)
    g = build_pringsheim_zero(Z)
    rep = dim_le_one_demo(f, g, Z, 1, [2], ec)
    assert rep.passed
    assert any(c.name == "witness h(x1) != 0" and c.passed for c in rep.checks)


def test_dim_demo_dependent_pair():
    ec = EvalContext(128)
    Z = EmptySet()
    rep = dim_le_one_demo(Const(2), Const(3), Z, 0, [1, 2], ec)
    assert not rep.failures
    assert len(rep.skipped) == 2
    assert any("dependent pair" in n for n in rep.notes)
    with pytest.raises(InputError):
        dim_le_one_demo(Const(1), Const(1), FiniteSet([0]), 0)
