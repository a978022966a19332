import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ddreach import systems
from ddreach.data import assemble, simulate
from ddreach.reach_lti import noise_matrix_zonotope

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def lti_setup():
    """Five-state experiment with its data (3 trajectories of length 10, seed 1)."""
    E = systems.five_state_experiment()
    D = assemble(simulate(E.model, E.X0, E.U, E.Zw, K=E.K, T_i=E.T_i, seed=1))
    return E, D, noise_matrix_zonotope(E.Zw, D)


@pytest.fixture(scope="session")
def poly_setup():
    E = systems.quadratic_experiment()
    D = assemble(simulate(E.model, E.X0, E.U, E.Zw, K=E.K, T_i=E.T_i, seed=1))
    return E, D, noise_matrix_zonotope(E.Zw, D), systems.quadratic_basis()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from tests.test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
