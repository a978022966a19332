import numpy as np
import pytest

from ddreach import systems
from ddreach.data import DataMatrices, SystemModel, assemble, simulate
from ddreach.errors import InfeasibleError, RankDeficiencyError, UnsupportedRegimeError
from ddreach.matrix_sets import MatrixZonotope, as_cmz, cmz_contains_matrix, mz_from_noise_zonotope
from ddreach.oracle import model_reach_lti, monte_carlo_check, nesting_report, random_directions
from ddreach.reach_lti import (
    SideInfo,
    alg1_reach,
    alg2_reach,
    alg3_reach,
    alg4_model,
    alg4_reach,
    alg4_validation_set,
    build_side_info_cmz,
    compute_Msigma,
    compute_Nsigma,
    compute_Nsigma_meas,
    compute_Nw,
    measurement_offset_set,
    prop4_reach,
    prop5_reach,
)
from ddreach.sets import ConstrainedZonotope, Zonotope


@pytest.fixture(scope="module")
def sequences(lti_setup):
    E, D, Mw = lti_setup
    info = systems.five_state_side_info()
    return {
        "alg1": alg1_reach(D, Mw, E.Zw, E.X0, E.U, 3),
        "alg2": alg2_reach(D, Mw, E.Zw, E.X0, E.U, 3),
        "alg3": alg3_reach(D, Mw, E.Zw, E.X0, E.U, 3, info),
    }


def test_noise_free_identification_is_exact():
    E = systems.five_state_experiment()
    Z0 = Zonotope(np.zeros(5))
    D = assemble(simulate(E.model, E.X0, E.U, Z0, K=3, T_i=10, seed=1))
    M = compute_Msigma(D, mz_from_noise_zonotope(Z0, D.T))
    assert np.allclose(M.center, E.model.AB, atol=1e-10)
    assert M.n_generators == 0


def test_true_model_in_all_model_sets(lti_setup):
    E, D, Mw = lti_setup
    AB = E.model.AB
    assert compute_Msigma(D, Mw).contains(AB)
    Ns = compute_Nsigma(D, compute_Nw(D, Mw))
    assert cmz_contains_matrix(Ns, AB)
    info = systems.five_state_side_info()
    assert info.holds_for(AB)
    assert cmz_contains_matrix(build_side_info_cmz(Ns, info, T=D.T), AB)


def test_sampled_noise_gives_members(lti_setup):
    E, D, Mw = lti_setup
    M = compute_Msigma(D, Mw)
    rng = np.random.default_rng(0)
    H = np.linalg.pinv(D.Z_minus)
    for _ in range(5):
        W = Mw.sample(rng)
        assert M.contains((D.X_plus - W) @ H)


def test_true_noise_in_Nw_and_kernel_condition(lti_setup):
    E, D, Mw = lti_setup
    Nw = compute_Nw(D, Mw)
    assert cmz_contains_matrix(Nw, D.W_minus)
    from ddreach.data import kernel_basis

    K = kernel_basis(D.Z_minus)
    W = Nw.sample(np.random.default_rng(1))
    assert np.allclose((D.X_plus - W) @ K, 0.0, atol=1e-7)


def test_empty_kernel_means_unconstrained():
    E = systems.five_state_experiment()
    D = assemble(simulate(E.model, E.X0, E.U, E.Zw, K=1, T_i=6, seed=3))
    Mw = mz_from_noise_zonotope(E.Zw, D.T)
    Nw = compute_Nw(D, Mw)
    assert Nw.B.size == 0 and Nw.n_generators == Mw.n_generators


def test_inconsistent_noise_bound_is_reported(lti_setup):
    E, D, _ = lti_setup
    tiny = mz_from_noise_zonotope(Zonotope(np.zeros(5), 1e-6 * np.ones((5, 1))), D.T)
    with pytest.raises(InfeasibleError):
        compute_Nw(D, tiny)


def test_rank_deficient_data():
    E = systems.five_state_experiment()
    D = assemble(simulate(E.model, E.X0, E.U, E.Zw, K=1, T_i=4, seed=0))
    with pytest.raises(RankDeficiencyError):
        alg1_reach(D, mz_from_noise_zonotope(E.Zw, D.T), E.Zw, E.X0, E.U, 2)


def test_side_info_regime_check():
    E = systems.five_state_experiment()
    D = assemble(simulate(E.model, E.X0, E.U, E.Zw, K=1, T_i=10, seed=0))
    Mw = mz_from_noise_zonotope(E.Zw, D.T)
    with pytest.raises(UnsupportedRegimeError):
        alg3_reach(D, Mw, E.Zw, E.X0, E.U, 2, systems.five_state_side_info())


def test_singleton_identity_system_is_constant():
    model = SystemModel.lti(np.eye(2), np.zeros((2, 1)))
    Z0 = Zonotope(np.zeros(2))
    U = Zonotope([0.0], [[1.0]])
    X = Zonotope([1.0, -1.0], np.eye(2))
    D = assemble(simulate(model, X, U, Z0, K=3, T_i=2, seed=0))
    x0 = Zonotope([1.0, 2.0])
    seq = alg1_reach(D, mz_from_noise_zonotope(Z0, D.T), Z0, x0, Zonotope([0.0]), 4)
    for S in seq:
        assert np.allclose(S.center, [1.0, 2.0]) and np.allclose(S.generators, 0.0, atol=1e-12)


def test_sequences_start_at_X0_and_have_expected_types(sequences, lti_setup):
    E = lti_setup[0]
    for seq in sequences.values():
        assert seq[0] is E.X0 and seq.horizon == 3
    assert isinstance(sequences["alg1"][2], Zonotope)
    assert isinstance(sequences["alg2"][2], ConstrainedZonotope)


def test_alg1_dominates_model_reach(sequences, lti_setup):
    E = lti_setup[0]
    ref = model_reach_lti(E.model.A, E.model.B, E.X0, E.U, E.Zw, 3)
    for k in range(4):
        D = random_directions(5, 100, k)
        assert np.all(sequences["alg1"][k].support(D) >= ref[k].support(D) - 1e-9)


def test_nesting_small(sequences):
    assert max(nesting_report(sequences["alg2"], sequences["alg1"], 20)) <= 1e-6
    assert max(nesting_report(sequences["alg3"], sequences["alg2"], 20)) <= 1e-6


def test_monte_carlo_small(sequences, lti_setup):
    E = lti_setup[0]
    for seq in sequences.values():
        assert monte_carlo_check(E.model, E.X0, E.U, E.Zw, seq, samples=100, seed=3).all_contained


def test_vacuous_side_info_changes_nothing(lti_setup):
    E, D, Mw = lti_setup
    Ns = compute_Nsigma(D, compute_Nw(D, Mw))
    vac = SideInfo(np.eye(5), np.zeros((5, 6)), 1e6 * np.ones((5, 6)))
    Nsi = build_side_info_cmz(Ns, vac, T=D.T)
    fb0, fb1 = Ns.factor_bounds, Nsi.factor_bounds
    g = Ns.n_generators
    assert np.allclose(fb0.lower, fb1.lower[:g], atol=1e-6)
    assert np.allclose(fb0.upper, fb1.upper[:g], atol=1e-6)
    s2 = alg2_reach(D, Mw, E.Zw, E.X0, E.U, 1)
    s3 = alg3_reach(D, Mw, E.Zw, E.X0, E.U, 1, vac)
    Dd = random_directions(5, 20, 0)
    assert np.allclose(s2[1].support(Dd), s3[1].support(Dd), atol=1e-6)


def test_tighter_side_info_shrinks_hull(lti_setup):
    E, D, Mw = lti_setup
    base = systems.five_state_side_info()
    loose = SideInfo(base.Q, base.Y, 3 * base.R)
    h_tight = alg3_reach(D, Mw, E.Zw, E.X0, E.U, 1, base)[1].interval_hull()
    h_loose = alg3_reach(D, Mw, E.Zw, E.X0, E.U, 1, loose)[1].interval_hull()
    assert np.all(h_tight.lower >= h_loose.lower - 1e-7)
    assert np.all(h_tight.upper <= h_loose.upper + 1e-7)


def test_side_info_validation():
    with pytest.raises(ValueError):
        SideInfo(np.eye(2), np.zeros((2, 3)), -np.ones((2, 3)))
    with pytest.raises(ValueError):
        SideInfo(np.eye(2), np.zeros((2, 3)), np.ones((2, 2)))


# measurement noise --------------------------------------------------------------

@pytest.fixture(scope="module")
def meas_setup():
    E = systems.five_state_experiment(measurement=True)
    D = assemble(simulate(E.model, E.X0, E.U, E.Zw, E.Zv, K=3, T_i=10, seed=1))
    Mw = mz_from_noise_zonotope(E.Zw, D.T)
    Mv = mz_from_noise_zonotope(E.Zv, D.T)
    return E, D, Mw, Mv, measurement_offset_set(Mv, E.model.A)


def test_zero_offset_prop4_equals_alg1(lti_setup):
    E, D, Mw = lti_setup
    Dy = DataMatrices(D.X_plus, D.X_minus, D.U_minus, Y_plus=D.X_plus, Y_minus=D.X_minus)
    Mo = MatrixZonotope(np.zeros_like(D.X_plus))
    a = alg1_reach(D, Mw, E.Zw, E.X0, E.U, 2)
    b = prop4_reach(Dy, Mo, Mw, E.Zw, E.X0, E.U, 2)
    Dd = random_directions(5, 20, 1)
    assert np.allclose(a[2].support(Dd), b[2].support(Dd), atol=1e-9)


def test_measurement_methods_contain_truth(meas_setup):
    E, D, Mw, Mv, Mo = meas_setup
    p4 = prop4_reach(D, Mo, Mw, E.Zw, E.X0, E.U, 2)
    p5 = prop5_reach(D, Mo, Mw, E.Zw, E.X0, E.U, 2)
    a4 = alg4_reach(D, E.Zw, E.Zv, Mw, Mv, E.X0, E.U, 2)
    assert a4.heuristic and not p4.heuristic
    for seq in (p4, p5, a4):
        assert monte_carlo_check(E.model, E.X0, E.U, E.Zw, seq, samples=100, seed=5).all_contained
    assert max(nesting_report(p5, p4, 20)) <= 1e-6
    assert cmz_contains_matrix(compute_Nsigma_meas(D, Mo, Mw), E.model.AB)


def test_alg4_noise_free_model_and_validation(meas_setup):
    E, D, Mw, Mv, _ = meas_setup
    Z0 = Zonotope(np.zeros(5))
    D0 = assemble(simulate(E.model, E.X0, E.U, Z0, Z0, K=3, T_i=10, seed=1))
    M0 = mz_from_noise_zonotope(Z0, D0.T)
    M, Zav = alg4_model(D0, Z0, Z0, M0, M0)
    assert np.allclose(M, E.model.AB, atol=1e-9)
    assert np.all(np.abs(Zav.interval_hull().upper) < 1e-9)
    M, Zav = alg4_model(D, E.Zw, E.Zv, Mw, Mv)
    assert alg4_validation_set(D, M, Zav).contains(E.model.AB)


def test_empty_kernel_prop5_equals_prop4():
    E = systems.five_state_experiment(measurement=True)
    D = assemble(simulate(E.model, E.X0, E.U, E.Zw, E.Zv, K=1, T_i=6, seed=2))
    Mw, Mv = mz_from_noise_zonotope(E.Zw, D.T), mz_from_noise_zonotope(E.Zv, D.T)
    Mo = measurement_offset_set(Mv, E.model.A)
    p4 = prop4_reach(D, Mo, Mw, E.Zw, E.X0, E.U, 1, reduce_order=None)
    p5 = prop5_reach(D, Mo, Mw, E.Zw, E.X0, E.U, 1)
    Dd = random_directions(5, 10, 2)
    assert np.allclose(p4[1].support(Dd), p5[1].support(Dd), atol=1e-8)
    assert as_cmz(Mo).n_generators == Mo.n_generators
