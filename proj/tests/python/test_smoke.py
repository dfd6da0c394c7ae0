"""Import-level checks of the python module against numpy references."""

import math

import numpy as np
import pytest

import simcr


def hermitian(n, seed):
    rng = np.random.default_rng(seed)
    b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return b + b.conj().T


def test_version_and_catalogs():
    assert simcr.__version__ == "0.1.0"
    assert list(simcr.STAGES) == ["synth", "budget", "alternate", "train", "evaluate"]
    assert "bcrb-vs-power" in simcr.FIGURE_IDS


def test_principal_eigenpair_matches_numpy():
    for seed in range(5):
        H = hermitian(6, seed)
        value, vector = simcr.principal_eigenpair(H)
        w, V = np.linalg.eigh(H)
        assert value == pytest.approx(w[-1], rel=1e-12)
        vector = np.asarray(vector).reshape(-1)
        # Same ray: compare after phase alignment.
        ref = V[:, -1]
        ref = ref * np.exp(1j * np.angle(np.vdot(ref, vector)))
        assert np.linalg.norm(vector - ref) < 1e-10
        assert np.linalg.norm(vector) == pytest.approx(1.0, abs=1e-12)


def test_solve_spd_matches_numpy():
    rng = np.random.default_rng(3)
    b = rng.normal(size=(5, 5))
    A = b @ b.T + 5 * np.eye(5)
    rhs = rng.normal(size=5)
    x = np.asarray(simcr.solve_spd(A, rhs)).reshape(-1)
    assert np.linalg.norm(A @ x - rhs) < 1e-10 * np.linalg.norm(rhs)


def test_steering_vector_broadside_and_phases():
    lam = 0.01
    v = np.asarray(simcr.steering_vector(math.pi / 2, 0.0, lam, 0.005, 2, 3))
    v = v.reshape(-1)
    assert v.shape == (6,)
    assert np.allclose(v, 1.0, atol=1e-12)
    # Every entry keeps unit modulus off broadside too.
    v = np.asarray(simcr.steering_vector(1.0, 0.7, lam, 0.005, 3, 3)).reshape(-1)
    assert np.allclose(np.abs(v), 1.0, atol=1e-12)


def test_wrap_angle():
    assert simcr.wrap_angle(0.0) == 0.0
    assert simcr.wrap_angle(math.pi) == pytest.approx(math.pi)
    assert simcr.wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    assert simcr.wrap_angle(-0.25) == pytest.approx(-0.25)


def test_inner_solve_unconstrained_top():
    A = np.diag([2.0, 1.0]).astype(complex)
    R = np.diag([1.0, 10.0]).astype(complex)
    f, case_id, g, _mu = simcr.inner_solve(A, R, 100.0, 1.0, 1e-9)
    assert case_id == 2
    f = np.asarray(f).reshape(-1)
    assert np.linalg.norm(f - np.array([1.0, 0.0])) < 1e-12
    assert g == pytest.approx(1.0)


def test_scenario_roundtrip_and_hash():
    cfg = simcr.default_scenario()
    assert cfg.n_atoms == 36
    assert cfg.sigma2 == pytest.approx(4.116e-15, rel=1e-3)
    h1 = simcr.scenario_hash_hex(cfg)
    assert len(h1) == 16
    cfg.rng_seed += 1
    assert simcr.scenario_hash_hex(cfg) != h1

    parsed = simcr.parse_scenario_text("[scene-channels]\nI = 3\n")
    assert parsed.I == 3
    with pytest.raises(simcr.ConfigError):
        simcr.parse_scenario_text("[scene-channels]\nbogus = 1\n")


def test_budget_eps_positive_on_tiny_scene():
    cfg = simcr.default_scenario()
    cfg.N_h = cfg.N_v = 2
    cfg.L = 2
    cfg.I = 2
    cfg.Q_su_s = cfg.Q_pu_s = cfg.Q_pu_pb = 4
    eps = simcr.budget_eps(cfg)
    assert len(eps) == 2
    assert all(e > 0 for e in eps)


def test_pipeline_runs_and_writes_artifacts(tmp_path):
    cfg = simcr.default_scenario()
    cfg.N_h = cfg.N_v = 2
    cfg.L = 2
    cfg.I = 2
    cfg.M_p = 40
    cfg.Q_su_s = cfg.Q_pu_s = cfg.Q_pu_pb = 4
    cfg.N_g = 4
    cfg.N_b = 2
    cfg.N_e = 1

    out = tmp_path / "out"
    log = simcr.run_pipeline(cfg, str(out))
    assert "[synth] done" in log
    for name in [
        "channels.bin",
        "budget.json",
        "targets.json",
        "phases.json",
        "train_history.csv",
        "evaluate.csv",
        "manifest.json",
    ]:
        assert (out / name).exists(), name

    with pytest.raises(simcr.ConfigError):
        simcr.run_pipeline(cfg, str(tmp_path / "partial"), stages=["train"])

    path = simcr.write_figure("ao-convergence", cfg, str(tmp_path / "fig"))
    assert path.endswith("ao-convergence.csv")
    header = open(path).readline()
    assert "iteration" in header
