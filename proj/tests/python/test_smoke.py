import math
import os
import subprocess

import numpy as np
import pytest

import ionvac


def test_two_ion_numbers():
    a = ionvac.two_ion_analytics()
    assert a["lambda"] == pytest.approx(0.518977, abs=1e-6)
    assert a["entropy_ebits"] == pytest.approx(0.136, abs=1e-3)
    assert ionvac.entanglement_entropy(2, [1]) == pytest.approx(a["entropy_ebits"], abs=1e-12)


def test_chain_arrays():
    u = ionvac.equilibrium_positions(3)
    assert np.allclose(u, [-(1.25 ** (1 / 3)), 0.0, 1.25 ** (1 / 3)])
    freqs, vecs = ionvac.normal_modes(ionvac.coupling_matrix(3))
    assert np.allclose(freqs, [1.0, math.sqrt(3.0), math.sqrt(29 / 5)])
    assert np.allclose(vecs.T @ vecs, np.eye(3))
    sigma = ionvac.ground_state_covariance(4)
    assert sigma.shape == (8, 8)
    cut = ionvac.truncated_coupling(ionvac.coupling_matrix(4), 2)
    assert cut[0, 3] == 0.0


def test_swap_sequence():
    r = ionvac.run_sequence("V:0.31,W:0.38,V:0.50,W:0.39,V:0.53,W:0.16")
    assert 0.94 <= r["ratio_to_ground_entropy"] <= 0.99
    assert r["rho"].shape == (4, 4)
    assert np.trace(r["rho"]).real == pytest.approx(1.0)


def test_small_optimisation_is_deterministic():
    a = ionvac.optimize_sequence(n_pairs=1, restarts=2, max_evaluations=60, fock_dim=10)
    b = ionvac.optimize_sequence(n_pairs=1, restarts=2, max_evaluations=60, fock_dim=10, threads=1)
    assert a["sequence"] == b["sequence"]
    assert a["restart_eof"] == b["restart_eof"]


def test_detection_and_sweep():
    d = ionvac.detection(detuning=-1.0)
    assert d["entangled"] == (d["eta"] > 1.0)
    rows = ionvac.eta_sweep(20, 6, 15, 0.8, [-1.0, 0.0])
    assert len(rows) == 2
    prof = ionvac.commutator_profile(10, 5, [0.0, 0.5])
    assert prof.shape == (10, 2)
    disp, energy = ionvac.classical_propagation(10, 5, [0.0, 0.5, 1.0])
    assert np.allclose(disp, ionvac.commutator_profile(10, 5, [0.0, 0.5, 1.0]))
    assert np.allclose(energy, 0.5)


def test_errors_carry_the_field():
    with pytest.raises(ionvac.ConfigError) as info:
        ionvac.detection(probe_a=15, probe_b=6)
    assert info.value.field == "probes"
    assert isinstance(info.value, ValueError)
    with pytest.raises(ionvac.ConfigError):
        ionvac.run_experiment("modes", n_ions=0)
    with pytest.raises(ionvac.NumericalError):
        ionvac.detection(omega=50.0)


def test_run_experiment():
    summary, files = ionvac.run_experiment("two-ion")
    assert summary["lambda"] == pytest.approx(0.518977, abs=1e-6)
    assert "two_ion.csv" in files
    assert files["two_ion.csv"].startswith(b"# {")
    assert "eta" in ionvac.experiment_names()


@pytest.mark.skipif("IONVAC_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_matches_module(tmp_path):
    out = subprocess.run(
        [os.environ["IONVAC_CLI"], "two-ion", "--out", str(tmp_path)], capture_output=True, check=True
    )
    assert b"lambda" in out.stdout
    _, files = ionvac.run_experiment("two-ion")
    assert (tmp_path / "two_ion.csv").read_bytes() == files["two_ion.csv"]
