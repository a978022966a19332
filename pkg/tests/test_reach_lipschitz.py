import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ddreach import systems
from ddreach.data import DataMatrices, assemble, covering_radius, simulate
from ddreach.errors import ConfigError
from ddreach.matrix_sets import mz_from_noise_zonotope
from ddreach.oracle import monte_carlo_check
from ddreach.reach_lipschitz import (
    LipschitzConfig,
    _regressor,
    alg6_reach,
    compute_Zeps,
    compute_ZL,
    data_residuals,
    fit_linear_model,
)
from ddreach.reach_lti import alg1_reach
from ddreach.sets import Zonotope


def _linear_data(noise=0.0, seed=0):
    E = systems.five_state_experiment()
    Zw = Zonotope(np.zeros(5), noise * np.ones((5, 1)))
    D = assemble(simulate(E.model, E.X0, E.U, Zw, K=3, T_i=10, seed=seed))
    return E, D, Zw


def test_fit_recovers_linear_dynamics():
    E, D, _ = _linear_data()
    xs, us = E.X0.center, E.U.center
    M = fit_linear_model(D, None, xs, us)
    A, B = systems.A_LTI, systems.B_LTI
    expected = np.hstack([(A @ xs + B @ us)[:, None], A, B])
    assert np.allclose(M, expected, atol=1e-8)


def test_residuals_orthogonal_to_regressor():
    E, D, _ = _linear_data(noise=0.005)
    xs, us = E.X0.center, E.U.center
    M = fit_linear_model(D, None, xs, us)
    r = data_residuals(D, M, xs, us)
    assert np.abs(r @ _regressor(D, xs, us).T).max() < 1e-9


def test_shifting_linearization_point_changes_affine_column_only():
    E, D, _ = _linear_data(noise=0.005)
    M1 = fit_linear_model(D, None, E.X0.center, E.U.center)
    M2 = fit_linear_model(D, None, E.X0.center + 0.3, E.U.center - 1.0)
    assert np.allclose(M1[:, 1:], M2[:, 1:], atol=1e-9)
    assert not np.allclose(M1[:, 0], M2[:, 0])


def test_ZL_vanishes_on_noise_free_linear_data():
    E, D, Zw = _linear_data()
    xs, us = E.X0.center, E.U.center
    ZL = compute_ZL(D, fit_linear_model(D, None, xs, us), Zw, xs, us)
    assert np.max(ZL.interval_hull().radius) <= 1e-8


def test_residuals_lie_in_ZL_plus_noise():
    E, D, Zw = _linear_data(noise=0.005, seed=3)
    xs, us = E.X0.center, E.U.center
    M = fit_linear_model(D, None, xs, us)
    box = compute_ZL(D, M, Zw, xs, us) + Zw
    assert box.contains_points(data_residuals(D, M, xs, us).T, 1e-9).all()


def test_more_data_never_shrinks_residual_box():
    E = systems.pendulum_experiment()
    D_small = systems.grid_data(E.model, systems.PENDULUM_REGION, 0.2, E.Zw, seed=0)
    D_big = systems.grid_data(E.model, systems.PENDULUM_REGION, 0.1, E.Zw, seed=0)
    xs, us = E.X0.center, E.U.center
    # fix the model so only the data changes; the fine grid contains the coarse one
    M = fit_linear_model(D_small, None, xs, us)
    small = np.ptp(data_residuals(D_small, M, xs, us), axis=1)
    big = np.ptp(data_residuals(D_big, M, xs, us), axis=1)
    assert np.all(big >= small - 1e-12)


def test_Zeps_zero_cases_and_linear_scaling():
    assert np.allclose(compute_Zeps(LipschitzConfig(0.0, 0.3), 2).interval_hull().radius, 0.0)
    assert np.allclose(compute_Zeps(LipschitzConfig(2.0, 0.0), 2).interval_hull().radius, 0.0)
    r1 = compute_Zeps(LipschitzConfig(2.0, 0.1), 3).interval_hull().radius
    r2 = compute_Zeps(LipschitzConfig(4.0, 0.1), 3).interval_hull().radius
    assert np.allclose(r1, 0.2) and np.allclose(r2, 2 * r1)


@given(st.sampled_from([0.2, 0.1, 0.05]))
def test_halving_spacing_halves_Zeps(h):
    L = systems.PENDULUM_LIPSCHITZ
    r = compute_Zeps(LipschitzConfig(L, systems.grid_covering_radius(h, 3)), 2).interval_hull().radius
    r_half = compute_Zeps(LipschitzConfig(L, systems.grid_covering_radius(h / 2, 3)), 2).interval_hull().radius
    assert np.array_equal(r_half, r / 2)


def test_grid_covering_radius_values():
    # the data estimate is the nearest-neighbour spacing, the analytic radius half a cell diagonal
    E = systems.pendulum_experiment()
    D = systems.grid_data(E.model, systems.PENDULUM_REGION, 0.2, E.Zw, seed=0)
    assert covering_radius(D) == pytest.approx(0.2)
    assert systems.grid_covering_radius(0.2, 3) == pytest.approx(0.1 * np.sqrt(3))


def test_per_step_constants_override():
    cfg = LipschitzConfig(1.0, 0.1, per_step=((2.0, 0.5),))
    assert cfg.constants(0) == (2.0, 0.5)
    assert cfg.constants(3) == (1.0, 0.1)


@pytest.mark.parametrize("kwargs", [dict(L_star=-1.0), dict(delta=np.inf), dict(per_step=((1.0, -0.1),))])
def test_invalid_constants_rejected(kwargs):
    with pytest.raises(ConfigError):
        LipschitzConfig(**kwargs)


def test_linear_system_stays_close_to_alg1():
    E, D, _ = _linear_data(noise=0.005, seed=1)
    Zw = E.Zw
    Mw = mz_from_noise_zonotope(Zw, D.T)
    L, delta = 0.5, 0.01
    lip = alg6_reach(D, Mw, Zw, LipschitzConfig(L, delta), E.X0, E.U, 5)
    ref = alg1_reach(D, Mw, Zw, E.X0, E.U, 5)
    rng = np.random.default_rng(0)
    dirs = rng.normal(size=(40, 5))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    # both wrap the same least-squares model; the Lipschitz one also adds the
    # residual box and L*delta per step, so it is never far outside alg1
    for k in range(1, 6):
        gap = lip[k].support(dirs) - ref[k].support(dirs)
        assert gap.max() <= k * (L * delta * np.sqrt(5) + 0.1)


def test_pendulum_containment_and_meta():
    E = systems.pendulum_experiment()
    h = 0.1
    D = systems.grid_data(E.model, systems.PENDULUM_REGION, h, E.Zw, seed=0)
    cfg = LipschitzConfig(systems.PENDULUM_LIPSCHITZ, systems.grid_covering_radius(h, 3))
    seq = alg6_reach(D, None, E.Zw, cfg, E.X0, E.U, E.N)
    rep = monte_carlo_check(E.model, E.X0, E.U, E.Zw, seq, 300, seed=0)
    assert rep.all_contained
    hull = seq.meta["coverage_hull"]
    assert np.all(np.asarray(hull["lower"]) >= systems.PENDULUM_REGION.lower)
    assert np.all(np.asarray(hull["upper"]) <= systems.PENDULUM_REGION.upper)
    assert not seq.heuristic


def test_estimated_constants_are_flagged_heuristic():
    E = systems.pendulum_experiment()
    D = systems.grid_data(E.model, systems.PENDULUM_REGION, 0.2, E.Zw, seed=0)
    seq = alg6_reach(D, None, E.Zw, LipschitzConfig(estimate_from_data=True), E.X0, E.U, 2)
    assert seq.heuristic and seq.meta["constants_estimated"]
    assert seq.meta["L_star"] > 0 and seq.meta["delta"] > 0


def test_shift_correction_only_enlarges():
    E = systems.pendulum_experiment()
    D = systems.grid_data(E.model, systems.PENDULUM_REGION, 0.2, E.Zw, seed=0)
    base = LipschitzConfig(systems.PENDULUM_LIPSCHITZ, systems.grid_covering_radius(0.2, 3))
    plain = alg6_reach(D, None, E.Zw, base, E.X0, E.U, 3, reduce_order=0)
    shifted = alg6_reach(D, None, E.Zw, LipschitzConfig(base.L_star, base.delta, shift_correction=True),
                         E.X0, E.U, 3, reduce_order=0)
    dirs = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0], [0.6, 0.8]])
    for k in range(4):
        assert np.all(shifted[k].support(dirs) >= plain[k].support(dirs) - 1e-12)


def test_empty_data_rejected():
    E = systems.pendulum_experiment()
    empty = DataMatrices(np.zeros((2, 0)), np.zeros((2, 0)), np.zeros((1, 0)), lengths=())
    with pytest.raises(ValueError):
        alg6_reach(empty, None, E.Zw, LipschitzConfig(), E.X0, E.U, 1)
