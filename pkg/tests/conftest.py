"""Pytest configuration and fixtures for tests."""
import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the src directory to the Python path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from anomalous_decoherence.classical.langevin import ClassicalBathParams, TrajectoryEnsemble  # noqa: E402


def make_ensemble(x, params=None, record_dt=1.0, phase=None, equilibrium_start=True):
    """Wrap recorded samples (n x records) in a TrajectoryEnsemble."""
    x = np.asarray(x, dtype=float)
    params = params or ClassicalBathParams(gamma1=0.4, temperature=1.0)
    return TrajectoryEnsemble(
        params=params,
        dt=record_dt,
        t_max=record_dt * (x.shape[1] - 1),
        record_every=1,
        master_seed=0,
        x=x,
        phase=None if phase is None else np.asarray(phase, dtype=float),
        equilibrium_start=equilibrium_start,
    )


def ou_samples(n, n_records, record_dt, tau, seed):
    """Exact stationary Ornstein-Uhlenbeck paths with unit variance and relaxation time tau."""
    rng = np.random.default_rng(seed)
    decay = math.exp(-record_dt / tau)
    kick = math.sqrt(1.0 - decay**2)
    x = np.empty((n, n_records))
    x[:, 0] = rng.standard_normal(n)
    for k in range(1, n_records):
        x[:, k] = decay * x[:, k - 1] + kick * rng.standard_normal(n)
    return x


@pytest.fixture
def ou_ensemble():
    """4000 OU paths, tau = 2, sampled every 0.1 up to t = 19.9."""
    return make_ensemble(ou_samples(4000, 200, 0.1, 2.0, seed=7), record_dt=0.1)


@pytest.fixture
def output_dir(tmp_path):
    """Return a fresh directory for experiment outputs."""
    return tmp_path / "results"


@pytest.fixture
def ensemble_factory():
    """Return make_ensemble for building ensembles from synthetic samples."""
    return make_ensemble
