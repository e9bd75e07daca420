import numpy as np
import pytest

from kzquench.evolver import SolverOptions


@pytest.fixture(scope="session")
def fast_opts():
    """Tolerances for sweep-style tests (defect densities need ~1e-4)."""
    return SolverOptions(rel_tol=1e-7, abs_tol=1e-9)


@pytest.fixture(scope="session")
def tight_opts():
    return SolverOptions(rel_tol=1e-10, abs_tol=1e-12)


def approx_rel(a, b, tol):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.all(np.abs(a - b) <= tol * np.maximum(np.abs(b), 1e-300))
