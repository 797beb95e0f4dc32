import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from gminlab.experiments import BatchSpec, run_trial_batch

FULL = os.environ.get("GMINLAB_FULL", "") == "1"
JOBS = int(os.environ.get("GMINLAB_JOBS", "0"))


def pytest_report_header(config):
    mode = "full" if FULL else "smoke"
    return f"gminlab acceptance mode: {mode} (set GMINLAB_FULL=1 for desk-scale runs)"


@pytest.fixture(scope="session")
def ideal_n16_calls():
    """Calls-to-solution of 10000 ideal trials at N=16 (shared across tests)."""
    spec = BatchSpec(group="add", n=4, strategy="ideal", master_seed=160_001)
    results = run_trial_batch(spec, 10_000, jobs=JOBS)
    assert all(r.succeeded for r in results)
    return np.array([r.calls_to_solution for r in results], dtype=float)


@pytest.fixture(scope="session")
def ideal_n32_calls():
    """Calls-to-solution of 4000 ideal trials at N=32."""
    spec = BatchSpec(group="add", n=5, strategy="ideal", master_seed=320_001)
    results = run_trial_batch(spec, 4_000, jobs=JOBS)
    assert all(r.succeeded for r in results)
    return np.array([r.calls_to_solution for r in results], dtype=float)
