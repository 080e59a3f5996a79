import math

import numpy as np
import pytest

import dsqg


@pytest.fixture(scope="module")
def geo():
    return dsqg.square_geometry(32)


def test_geometry(geo):
    assert geo.n == 32
    assert geo.side_length == pytest.approx(math.pi)
    assert geo.lambda1 == pytest.approx(2.0)
    assert geo.ground_state().shape == (31, 31)
    assert geo.ground_state().min() > 0.0


def test_lambda_is_exact_on_modes(geo):
    w = dsqg.SpectralField.mode(geo, 3, 4)
    out = dsqg.lambda_power(w, 1.0).coefficients
    assert out[2, 3] == pytest.approx(5.0, rel=1e-14)
    assert np.count_nonzero(out) == 1


def test_forward_inverse_round_trip(geo):
    f = dsqg.random_family(geo, 1, 8, 3)[0]
    g = dsqg.SpectralField.from_values(geo, f.values())
    assert np.max(np.abs(g.coefficients - f.coefficients)) < 1e-13


def test_arithmetic_and_norms(geo):
    w = dsqg.SpectralField.mode(geo, 1, 1)
    assert (2.0 * w - w).l2_norm() == pytest.approx(1.0)
    assert dsqg.b1_norm(w, 2.0) == pytest.approx(math.pi)
    assert np.allclose(dsqg.boundary_ratio(w), 1.0)


def test_velocity_is_linear(geo):
    theta = dsqg.random_family(geo, 1, 5, 9)[0]
    ux, uy = dsqg.velocity(theta)
    vx, vy = dsqg.velocity(2.0 * theta)
    assert np.allclose(vx, 2.0 * ux, atol=1e-14)
    assert np.allclose(vy, 2.0 * uy, atol=1e-14)


def test_single_mode_run_decays_exactly(geo):
    w = dsqg.SpectralField.mode(geo, 1, 1)
    out = dsqg.run(w, t_end=0.5, dt=0.01, output_interval=0.25)
    assert [r["t"] for r in out["records"]] == pytest.approx([0.0, 0.25, 0.5])
    final = out["fields"][-1].coefficients
    assert final[0, 0] == pytest.approx(math.exp(-math.sqrt(2) * 0.5), abs=1e-10)
    assert abs(out["ledger_residual"]) < 1e-6


def test_checks(geo):
    family = dsqg.random_family(geo, 3, 5, 1)
    report = dsqg.verify_cordoba(geo, family)
    assert report.passed
    assert report.fitted_constants["gamma1"] > 0.0
    assert "weight_norm_bridge" in dsqg.check_names()
    bridge = dsqg.run_check("weight_norm_bridge", "[geometry]\nn = 32\n")
    assert bridge.passed


def test_precondition_error_is_raised(geo):
    with pytest.raises(dsqg.PreconditionError):
        dsqg.verify_cordoba(geo, dsqg.random_family(geo, 2, 4, 1), "reflected_square")
    with pytest.raises(ValueError):
        dsqg.run_check("cordoba", "[geometry]\nn = 4\n")


def test_checkpoint_round_trip(geo, tmp_path):
    f = dsqg.random_family(geo, 1, 10, 5)[0]
    path = str(tmp_path / "f.sqgb")
    dsqg.write_checkpoint(path, f, t=0.75, config_hash=12)
    g, t, step, h = dsqg.read_checkpoint(path)
    assert t == 0.75 and h == 12 and step == 0
    assert np.array_equal(g.coefficients, f.coefficients)
