"""Smoke tests of the python surface against independent oracles."""

import math

import pytest

import sgdg


def test_version():
    assert sgdg.__version__.startswith("sgdg")


def test_profiles_against_mpmath():
    mpmath = pytest.importorskip("mpmath")
    for r in (0.0, 0.5, 1.3, 2.4048255576957730, 5.0):
        assert sgdg.lane_emden_theta_2d(r) == pytest.approx(float(mpmath.besselj(0, r)), abs=1e-12)
    assert sgdg.lane_emden_theta_3d(1, math.pi) == pytest.approx(0.0, abs=1e-15)
    assert sgdg.lane_emden_theta_3d(5, 3.0) == pytest.approx(0.5, rel=1e-13)


def test_quadrature_exactness():
    rule = sgdg.gauss_rules(3)
    for deg in range(0, 8):
        q = sum(w * x**deg for x, w in zip(rule["nodes"], rule["weights"]))
        exact = 2.0 / (deg + 1) if deg % 2 == 0 else 0.0
        assert q == pytest.approx(exact, abs=1e-13)


def test_hllc_contact_property():
    for rl, rr, p in ((1.0, 2.0, 1.0), (0.3, 5.0, 2.5)):
        f = sgdg.hllc_flux([rl, 0.0, 0.0, p / 0.4], [rr, 0.0, 0.0, p / 0.4], [1.0, 0.0], 1.4)
        assert f[0] == pytest.approx(0.0, abs=1e-14)
        assert f[1] == pytest.approx(p, rel=1e-13)
        assert f[2] == pytest.approx(0.0, abs=1e-14)
        assert f[3] == pytest.approx(0.0, abs=1e-14)


def test_scenario_registry():
    ids = sgdg.list_scenarios()
    assert "wb2d" in ids and "jeans" in ids
    text = sgdg.config_defaults("jeans")
    assert "gamma = 1.66" in text


def test_tiny_balanced_run():
    out = sgdg.run_scenario("scenario = wb2d\nmesh = 6\nt_end = 0.1\n")
    assert out["invalid_states"] == 0
    for row in out["errors"]:
        assert row["linf"] < 1e-11


def test_manufactured_poisson_orders():
    out = sgdg.run_scenario("scenario = manufactured_poisson\nmesh = 8,16\ndegree = 2\n")
    rows = out["errors"]
    assert rows[1]["l2_order"] > 2.8


def test_config_error():
    with pytest.raises(sgdg.ConfigError):
        sgdg.run_scenario("scenario = wb2d\ncfl = 2.0\n")
