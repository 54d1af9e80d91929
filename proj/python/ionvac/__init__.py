"""Vacuum entanglement in trapped-ion chains."""

import json

from ._core import (
    ConfigError,
    NumericalError,
    __version__,
    classical_propagation,
    commutator_profile,
    coupling_matrix,
    detection,
    entanglement_entropy,
    entropy_vs_chain_size,
    equilibrium_positions,
    eta_sweep,
    experiment_names,
    ground_state_covariance,
    log_negativity,
    normal_modes,
    optimize_sequence,
    run_sequence,
    truncated_coupling,
    two_ion_analytics,
)
from . import _core


def run_experiment(experiment, **config):
    """Run a named experiment; returns (summary dict, {file name: bytes})."""
    config = dict(config, experiment=experiment)
    summary, files = _core.run_experiment(json.dumps(config))
    return json.loads(summary), files


__all__ = [
    "ConfigError",
    "NumericalError",
    "__version__",
    "classical_propagation",
    "commutator_profile",
    "coupling_matrix",
    "detection",
    "entanglement_entropy",
    "entropy_vs_chain_size",
    "equilibrium_positions",
    "eta_sweep",
    "experiment_names",
    "ground_state_covariance",
    "log_negativity",
    "normal_modes",
    "optimize_sequence",
    "run_experiment",
    "run_sequence",
    "truncated_coupling",
    "two_ion_analytics",
]
