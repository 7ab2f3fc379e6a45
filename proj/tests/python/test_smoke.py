import math

import numpy as np
import pytest

import nfmove


def test_reference_scenario_bounds():
    cfg, scene = nfmove.ArrayConfig(), nfmove.Scene()
    moving = nfmove.crb(cfg, scene, nfmove.Architecture.moving)
    fixed = nfmove.crb(cfg, scene, nfmove.Architecture.fixed)
    extended = nfmove.crb(cfg, scene, nfmove.Architecture.extended)
    assert extended.crb_position < moving.crb_position < fixed.crb_position
    assert fixed.crb_position / moving.crb_position > 1e4
    assert math.isclose(moving.rmse_lower_bound, math.sqrt(moving.crb_position))


def test_geometry_helpers():
    cfg = nfmove.ArrayConfig()
    assert nfmove.antenna_position(cfg, 999, 15) == pytest.approx(5.37)
    assert nfmove.rayleigh_distance(nfmove.platform_size(cfg), 0.05) == pytest.approx(1000.0)
    assert nfmove.distances(cfg, nfmove.Scene()).shape == (1000, 16)
    with pytest.raises(IndexError):
        nfmove.antenna_position(cfg, 1000, 0)


def test_closed_form_matches_fim_inverse():
    cfg, scene = nfmove.ArrayConfig(), nfmove.Scene()
    cfg.n_symbols = 200
    scene.target_y = 0.4
    s = nfmove.waveforms(cfg, scene, nfmove.Architecture.moving, nfmove.Scheme.sem)
    assert s.shape == (200, 16)
    assert np.allclose(np.sum(np.abs(s) ** 2, axis=1), scene.tx_power)
    F = nfmove.fim(cfg, scene, nfmove.Architecture.moving, s)
    assert F[2, 3] == 0.0 and F[3, 2] == 0.0
    closed = nfmove.crb_closed(cfg, scene, nfmove.Architecture.moving, s).crb_position
    # a double inverse is good to about cond * eps
    d = 1.0 / np.sqrt(np.diag(F))
    cond = np.linalg.cond(F * np.outer(d, d))
    assert closed == pytest.approx(nfmove.crb_from_fim(F), rel=max(1e-12, 10 * cond * np.finfo(float).eps))


def test_steering_derivative_by_differences():
    pos = np.array([0.0, 0.025, 0.05])
    a, ax, ay = nfmove.steering_at(pos, 10.0, 0.3, 0.05)
    h = 1e-6
    fd = (nfmove.steering_at(pos, 10.0 + h, 0.3, 0.05)[0] - nfmove.steering_at(pos, 10.0 - h, 0.3, 0.05)[0]) / (2 * h)
    assert np.linalg.norm(fd - ax) <= 1e-6 * np.linalg.norm(ax)


def test_noiseless_synthesis_is_rank_one():
    cfg, scene = nfmove.ArrayConfig(), nfmove.Scene()
    cfg.n_symbols = 10
    s = nfmove.waveforms(cfg, scene)
    r = nfmove.synthesize(cfg, scene, nfmove.Architecture.moving, s, seed=3, noise=False)
    a = nfmove.steering(cfg, scene, 4)
    want = a * (a @ s[4])
    assert np.allclose(r[4], want, rtol=0, atol=1e-14 * np.linalg.norm(want))


def test_likelihood_map_window():
    cfg, scene = nfmove.ArrayConfig(), nfmove.Scene()
    out = nfmove.likelihood_map(cfg, scene, nfmove.Architecture.extended, region=(9.8, 10.2, -0.2, 0.2), resolution=0.1)
    assert out["loglik"].shape == (5, 5)
    assert out["argmax"] == pytest.approx((10.0, 0.0), abs=1e-9)


def test_monte_carlo_small():
    out = nfmove.monte_carlo(nfmove.ArrayConfig(), nfmove.Scene(), trials=2, seed=4, region=(9.5, 10.5, -0.5, 0.5))
    assert len(out["errors"]) == 2
    assert out["rmse"] > 0 and out["crb_rmse"] > 0


def test_sweep_csv_and_config_errors():
    text = nfmove.crb_sweep_csv("scheme = sem\narch = moving\nL = 100\n", "power", [0.0, 10.0])
    assert text.startswith("# nfmove 0.1.0\n")
    rows = [line for line in text.splitlines() if not line.startswith("#")]
    assert rows[0].startswith("axis_value,architecture,scheme,crb_m2")
    assert len(rows) == 3
    with pytest.raises(ValueError, match="line 2"):
        nfmove.parse_config("N = 4\nbogus = 1\n")
    with pytest.raises(ValueError):
        nfmove.parse_config("N = 0")


def test_degenerate_geometry_raises():
    cfg, scene = nfmove.ArrayConfig(), nfmove.Scene()
    cfg.speed = 0.0
    with pytest.raises(ArithmeticError):
        nfmove.crb(cfg, scene, nfmove.Architecture.extended)
