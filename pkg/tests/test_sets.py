import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ddreach.errors import DimensionError, InfeasibleError
from ddreach.sets import (
    ConstrainedZonotope,
    Interval,
    Zonotope,
    set_from_dict,
    zono_minkowski_sum,
)
from tests.oracles import box_lp_optimum, zonotope_vertices_hull


def random_zonotope(rng, n=None, g=None):
    n = n or int(rng.integers(1, 4))
    g = int(rng.integers(0, 5)) if g is None else g
    return Zonotope(rng.normal(size=n), rng.normal(size=(n, g)))


def random_cz(rng, n=2, g=4, m=1):
    G = rng.normal(size=(n, g))
    A = rng.normal(size=(m, g))
    b = A @ rng.uniform(-0.8, 0.8, g)
    return ConstrainedZonotope(rng.normal(size=n), G, A, b)


zonotopes = st.integers(0, 100_000).map(lambda s: random_zonotope(np.random.default_rng(s)))


# -- intervals -----------------------------------------------------------------

def test_interval_basics():
    I = Interval([-1.0, 0.0], [1.0, 4.0])
    assert np.allclose(I.center, [0.0, 2.0])
    assert np.allclose(I.radius, [1.0, 2.0])
    assert I.contains([0.5, 3.9]) and not I.contains([1.5, 0.0])
    with pytest.raises(ValueError):
        Interval([1.0], [0.0])


def test_interval_to_zonotope_drops_zero_radii():
    Z = Interval([0.0, 1.0], [2.0, 1.0]).to_zonotope()
    assert Z.n_generators == 1
    assert np.allclose(Z.interval_hull().lower, [0.0, 1.0])


# -- zonotopes -------------------------------------------------------------------

def test_zonotope_operations_by_hand():
    Z = Zonotope([1.0, 0.0], [[1.0, 0.5], [0.0, 1.0]])
    assert Z.support([1.0, 0.0]) == pytest.approx(2.5)
    H = Z.interval_hull()
    assert np.allclose(H.lower, [-0.5, -1.0]) and np.allclose(H.upper, [2.5, 1.0])
    W = Z + Zonotope([1.0, 1.0], [[0.0], [2.0]])
    assert np.allclose(W.center, [2.0, 1.0]) and W.n_generators == 3
    assert np.allclose((2 * np.eye(2)) @ Z.center, (np.diag([2.0, 2.0]) @ Z).center)
    assert np.allclose((Z - Z).center, 0.0) and (Z - Z).n_generators == 4


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        Zonotope([0.0, 0.0]) + Zonotope([0.0])
    with pytest.raises(DimensionError):
        Zonotope([0.0, 0.0]).linear_map(np.eye(3))


def test_ndarray_operands_defer_to_sets():
    Z = Zonotope([1.0, 1.0], np.eye(2))
    assert isinstance(np.eye(2) @ Z, Zonotope)
    W = np.ones(2) - Z
    assert isinstance(W, Zonotope) and np.allclose(W.center, 0.0)


@given(zonotopes, st.integers(0, 1000))
def test_support_matches_vertex_hull(Z, seed):
    if Z.n_generators == 0 or Z.dim < 2 or Z.n_generators < Z.dim:
        return
    d = np.random.default_rng(seed).normal(size=Z.dim)
    V = zonotope_vertices_hull(Z)
    assert Z.support(d) == pytest.approx(float(np.max(V @ d)), abs=1e-9)


@given(zonotopes, st.integers(0, 1000))
def test_minkowski_support_is_additive(Z, seed):
    rng = np.random.default_rng(seed)
    W = random_zonotope(rng, n=Z.dim)
    d = rng.normal(size=Z.dim)
    assert zono_minkowski_sum(Z, W).support(d) == pytest.approx(Z.support(d) + W.support(d), abs=1e-9)


@given(zonotopes, st.integers(0, 1000))
def test_linear_map_support(Z, seed):
    rng = np.random.default_rng(seed)
    L = rng.normal(size=(2, Z.dim))
    d = rng.normal(size=2)
    assert (L @ Z).support(d) == pytest.approx(Z.support(L.T @ d), abs=1e-9)


@given(zonotopes, st.integers(0, 1000))
def test_cartesian_support_splits(Z, seed):
    rng = np.random.default_rng(seed)
    W = random_zonotope(rng)
    d = rng.normal(size=Z.dim + W.dim)
    P = Z.cartesian(W)
    assert P.support(d) == pytest.approx(Z.support(d[:Z.dim]) + W.support(d[Z.dim:]), abs=1e-9)


@given(zonotopes, st.integers(0, 1000))
def test_samples_are_contained(Z, seed):
    X = Z.sample_points(20, seed)
    assert Z.contains_points(X).all()


def test_contains_rejects_outside_point():
    Z = Zonotope([0.0, 0.0], [[1.0, 1.0], [0.0, 1.0]])
    assert Z.contains_point([2.0, 1.0])
    assert not Z.contains_point([2.0, -1.0])
    assert not Z.contains_point([0.0, 1.01])


@given(zonotopes, st.integers(1, 3), st.integers(0, 1000))
def test_reduction_encloses_original(Z, order, seed):
    R = Z.reduce(order)
    assert R.n_generators <= max(Z.dim * order, Z.n_generators if Z.n_generators <= Z.dim * order else 0)
    D = np.random.default_rng(seed).normal(size=(10, Z.dim))
    assert np.all(R.support(D) >= Z.support(D) - 1e-9)


@given(st.integers(0, 1000))
def test_compact_keeps_parallel_support(seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(3, 1))
    G = np.hstack([g * s for s in rng.uniform(-2, 2, 4)] + [rng.normal(size=(3, 2)), np.zeros((3, 1))])
    Z = Zonotope(rng.normal(size=3), G)
    C = Z.compact()
    assert C.n_generators == 3
    D = rng.normal(size=(20, 3))
    assert np.allclose(C.support(D), Z.support(D), atol=1e-9)


def test_vertices_2d_count_matches_hull():
    rng = np.random.default_rng(3)
    for g in range(1, 6):
        Z = Zonotope(rng.normal(size=2), rng.normal(size=(2, g)))
        V = Z.vertices_2d()
        assert V.shape[0] == 2 * g
        if g >= 2:
            assert zonotope_vertices_hull(Z).shape[0] == 2 * g


def test_serialization_round_trip():
    Z = Zonotope([1.0, 2.0], [[1.0], [0.5]])
    Z2 = set_from_dict(Z.to_dict())
    assert np.allclose(Z2.center, Z.center) and np.allclose(Z2.generators, Z.generators)
    C = ConstrainedZonotope([0.0], [[1.0, 1.0]], [[1.0, -1.0]], [0.0])
    C2 = set_from_dict(C.to_dict())
    assert np.allclose(C2.A, C.A) and C2.support([1.0]) == pytest.approx(2.0)


# -- constrained zonotopes ---------------------------------------------------------

def test_cz_support_by_hand():
    # beta1 = beta2 gives the segment from -2 to 2 on the line of [1, 1] + [1, -1] ... collapse to x = 2 beta
    C = ConstrainedZonotope([0.0, 0.0], [[1.0, 1.0], [1.0, -1.0]], [[1.0, -1.0]], [0.0])
    assert C.support([1.0, 0.0]) == pytest.approx(2.0)
    assert C.support([0.0, 1.0]) == pytest.approx(0.0)
    assert C.contains_point([1.0, 0.0])
    assert not C.contains_point([0.0, 0.5])


def test_cz_empty_is_rejected():
    with pytest.raises(InfeasibleError):
        ConstrainedZonotope([0.0], [[1.0]], [[1.0]], [2.0])


def test_cz_support_matches_lp_oracle(rng):
    for _ in range(30):
        C = random_cz(rng, n=2, g=4, m=int(rng.integers(1, 3)))
        d = rng.normal(size=2)
        ref = d @ C.center + box_lp_optimum(d @ C.generators, C.A, C.b, "max")
        assert C.support(d) == pytest.approx(ref, abs=1e-8)


def test_cz_from_zonotope_matches():
    rng = np.random.default_rng(5)
    Z = random_zonotope(rng, n=3, g=4)
    C = ConstrainedZonotope.from_zonotope(Z)
    D = rng.normal(size=(10, 3))
    assert np.allclose(C.support(D), Z.support(D))


@given(st.integers(0, 10_000))
def test_cz_operations_support_identities(seed):
    rng = np.random.default_rng(seed)
    C = random_cz(rng, n=2, g=3, m=1)
    W = random_zonotope(rng, n=2, g=2)
    L = rng.normal(size=(2, 2))
    d = rng.normal(size=2)
    assert (C + W).support(d) == pytest.approx(C.support(d) + W.support(d), abs=1e-8)
    assert (C + C).support(d) == pytest.approx(2 * C.support(d), abs=1e-8)
    assert (L @ C).support(d) == pytest.approx(C.support(L.T @ d), abs=1e-8)
    P = C.cartesian(W)
    e = rng.normal(size=4)
    assert P.support(e) == pytest.approx(C.support(e[:2]) + W.support(e[2:]), abs=1e-8)


@given(st.integers(0, 10_000))
def test_cz_interval_hull_from_supports(seed):
    rng = np.random.default_rng(seed)
    C = random_cz(rng, n=3, g=4, m=2)
    H = C.interval_hull()
    for i in range(3):
        e = np.eye(3)[i]
        assert H.upper[i] == pytest.approx(C.support(e), abs=1e-8)
        assert H.lower[i] == pytest.approx(-C.support(-e), abs=1e-8)


@given(st.integers(0, 10_000))
def test_cz_samples_contained(seed):
    rng = np.random.default_rng(seed)
    C = random_cz(rng, n=2, g=5, m=2)
    X = C.sample_points(10, seed)
    assert C.contains_points(X).all()


@given(st.integers(0, 10_000))
def test_cz_compact_preserves_set(seed):
    rng = np.random.default_rng(seed)
    C = random_cz(rng, n=2, g=4, m=2)
    # duplicate a constraint row and add a parallel free generator
    g = rng.normal(size=(2, 1))
    G = np.hstack([C.generators, g, 2 * g, np.zeros((2, 1))])
    A = np.vstack([C.A, 3 * C.A[:1]])
    A = np.hstack([A, np.zeros((A.shape[0], 3))])
    b = np.concatenate([C.b, 3 * C.b[:1]])
    big = ConstrainedZonotope(C.center, G, A, b)
    small = big.compact()
    assert small.n_generators == C.n_generators + 1
    assert small.n_constraints == C.n_constraints
    D = rng.normal(size=(6, 2))
    assert np.allclose(small.support(D), big.support(D), atol=1e-8)


def test_cz_factor_bounds():
    C = ConstrainedZonotope([0.0], [[1.0, 1.0]], [[1.0, 1.0]], [1.5])
    lo, hi = C.factor_bounds()
    assert np.allclose(lo, [0.5, 0.5]) and np.allclose(hi, [1.0, 1.0])
