import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ddreach import systems
from ddreach.data import SystemModel
from ddreach.matrix_sets import ConstrainedMatrixZonotope, MatrixZonotope
from ddreach.oracle import (
    ContainmentReport,
    brute_force_cmz_product,
    model_reach_lti,
    monte_carlo_check,
    nesting_report,
    support_excess,
)
from ddreach.reach_lti import ReachSequence
from ddreach.sets import Zonotope


def test_zero_dynamics_give_noise_set():
    X0, U = Zonotope([1.0, 2.0], np.eye(2)), Zonotope([3.0], [[1.0]])
    Zw = Zonotope([0.0, 0.0], [[0.1], [0.2]])
    seq = model_reach_lti(np.zeros((2, 2)), np.zeros((2, 1)), X0, U, Zw, 3)
    for k in range(1, 4):
        H = seq[k].interval_hull()
        assert np.allclose(H.lower, [-0.1, -0.2]) and np.allclose(H.upper, [0.1, 0.2])


def test_identity_without_input_or_noise_keeps_X0():
    X0 = Zonotope([1.0, -1.0], [[0.3, 0.1], [0.0, 0.2]])
    seq = model_reach_lti(np.eye(2), np.zeros((2, 1)), X0, Zonotope([0.0]), Zonotope(np.zeros(2)), 4)
    d = np.random.default_rng(0).normal(size=(10, 2))
    for k in range(5):
        assert np.allclose(seq[k].support(d), X0.support(d))


def test_scalar_closed_form():
    # x+ = 0.5 x + u + w, x0 in [0.9, 1.1], u in [-0.1, 0.1], w in [-0.01, 0.01]
    seq = model_reach_lti([[0.5]], [[1.0]], Zonotope([1.0], [[0.1]]), Zonotope([0.0], [[0.1]]),
                          Zonotope([0.0], [[0.01]]), 3)
    for k in range(4):
        center = 0.5 ** k
        radius = 0.1 * 0.5 ** k + 0.11 * sum(0.5 ** j for j in range(k))
        H = seq[k].interval_hull()
        assert H.lower[0] == pytest.approx(center - radius)
        assert H.upper[0] == pytest.approx(center + radius)


def test_monte_carlo_on_model_sets_is_complete():
    E = systems.five_state_experiment()
    seq = model_reach_lti(systems.A_LTI, systems.B_LTI, E.X0, E.U, E.Zw, E.N)
    rep = monte_carlo_check(E.model, E.X0, E.U, E.Zw, seq, 200, seed=4)
    assert rep.all_contained and rep.fraction == 1.0
    assert max(rep.max_violation) == 0.0


def test_shrunk_sets_report_violations():
    E = systems.five_state_experiment()
    seq = model_reach_lti(systems.A_LTI, systems.B_LTI, E.X0, E.U, E.Zw, E.N)
    small = ReachSequence([Zonotope(S.center, 0.5 * S.generators) for S in seq], "shrunk")
    rep = monte_carlo_check(E.model, E.X0, E.U, E.Zw, small, 200, seed=4)
    assert not rep.all_contained
    assert rep.fraction < 1.0
    assert all(v > 0 for v, f in zip(rep.max_violation, rep.step_fractions()) if f < 1.0)


def test_monte_carlo_is_seeded():
    E = systems.five_state_experiment()
    seq = model_reach_lti(systems.A_LTI, systems.B_LTI, E.X0, E.U, E.Zw, 2)
    small = ReachSequence([Zonotope(S.center, 0.8 * S.generators) for S in seq], "shrunk")
    a = monte_carlo_check(E.model, E.X0, E.U, E.Zw, small, 100, seed=9).to_dict()
    b = monte_carlo_check(E.model, E.X0, E.U, E.Zw, small, 100, seed=9).to_dict()
    assert a == b


def test_report_rejects_bad_counts():
    with pytest.raises(ValueError):
        ContainmentReport([10], [11], [0.0])


def test_support_excess_sign():
    inner = Zonotope([0.0, 0.0], 0.5 * np.eye(2))
    outer = Zonotope([0.0, 0.0], np.eye(2))
    d = np.eye(2)
    assert support_excess(inner, outer, d) == pytest.approx(-0.5)
    assert support_excess(outer, inner, d) == pytest.approx(0.5)
    seq_in, seq_out = ReachSequence([inner, inner], "a"), ReachSequence([outer, outer], "b")
    assert max(nesting_report(seq_in, seq_out, 20)) < 0


def test_brute_force_scalar_example():
    # [1, 3] * [0, 2]
    cloud = brute_force_cmz_product(MatrixZonotope([[2.0]], [[[1.0]]]), Zonotope([1.0], [[1.0]]))
    assert cloud.min() == pytest.approx(0.0) and cloud.max() == pytest.approx(6.0)


def test_brute_force_respects_constraints():
    # beta1 + beta2 = 0 ties the two scalar generators, so X = 1 + beta1 (1 - 1) = 1
    N = ConstrainedMatrixZonotope([[1.0]], [[[1.0]], [[1.0]]], [[[1.0]], [[1.0]]], [[0.0]])
    cloud = brute_force_cmz_product(N, Zonotope([2.0]))
    assert np.allclose(cloud, 2.0)


@given(st.integers(0, 1000))
def test_reduced_cloud_has_same_hull(seed):
    rng = np.random.default_rng(seed)
    M = MatrixZonotope(rng.normal(size=(2, 2)), rng.normal(size=(2, 2, 2)))
    Z = Zonotope(rng.normal(size=2), rng.normal(size=(2, 2)))
    full = brute_force_cmz_product(M, Z, grid=5, full=True)
    reduced = brute_force_cmz_product(M, Z, grid=5)
    d = rng.normal(size=(16, 2))
    assert np.allclose((full @ d.T).max(axis=0), (reduced @ d.T).max(axis=0), atol=1e-9)


def test_brute_force_size_limit():
    with pytest.raises(ValueError):
        brute_force_cmz_product(MatrixZonotope(np.zeros((1, 1)), np.zeros((4, 1, 1))), Zonotope([0.0]))


def test_nonlinear_sampling_uses_model_step():
    model = SystemModel("lipschitz", 1, 1, fn=lambda X, U: X ** 2 + U, name="square")
    seq = ReachSequence([Zonotope([1.0], [[0.1]]), Zonotope([1.01], [[0.22]])], "box")
    rep = monte_carlo_check(model, Zonotope([1.0], [[0.1]]), Zonotope([0.0]), Zonotope([0.0]), seq, 100, 0)
    # x^2 over [0.9, 1.1] is [0.81, 1.21], inside [0.79, 1.23]
    assert rep.all_contained
