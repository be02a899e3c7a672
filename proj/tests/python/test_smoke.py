"""Smoke tests for the Python bindings. The C++ test suite (ctest) is the
authoritative gate; these only check that the bindings are wired up."""

import math

import pytest

import menuforge as mf


def test_solve_known_point():
    out = mf.solve(1.26, 1, 1)
    assert out["schema_version"] == 1
    assert out["regime"]["label"] == "C"
    assert math.isclose(out["params"]["delta1"], 20 / 63, rel_tol=1e-6)
    assert math.isclose(out["revenue"], 1.4221481481, rel_tol=1e-8)


def test_solve_rect_and_revenue():
    out = mf.solve_rect(0.3, 0.2, 1.0, 0.9)
    assert out["regime"]["label"] == "A"
    assert mf.revenue(1.5, 1, 1) == pytest.approx(1.6499027814, rel=1e-8)


def test_verify_passes():
    rep = mf.verify(1.5, 1, 1)
    assert rep["pass"]
    assert rep["worst_margin"] >= -1e-7


def test_dual_certificate():
    for n in (1, 2, 3):
        rep = mf.dual_certificate(n)
        assert rep["pass"], rep
        assert rep["gap"] <= 1e-4
    with pytest.raises(Exception):
        mf.dual_certificate(4)


def test_certify_sweep():
    ids = mf.certify_check_ids()
    assert len(ids) >= 8
    rep = mf.certify(ids[0], grid=8)
    assert rep["pass"]
    assert rep["worst_margin"] >= -1e-9


def test_oracle_compare():
    rep = mf.oracle_compare(1.5, 1, 1, allocation_grid=0.1, price_grid=0.05)
    assert rep["gap"] >= -rep["epsilon"]
    assert rep["oracle_revenue"] <= rep["solver_revenue"] + 1e-9


def test_domain_errors():
    with pytest.raises(Exception):
        mf.solve(-1, 1, 1)
    with pytest.raises(Exception):
        mf.solve_rect(0.1, 0.9, 1, 1)  # outside the supported asymmetric regime
