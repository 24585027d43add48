import itertools

import numpy as np
import pytest

from tsmatpi.influence import (
    PAIR_STATES,
    PairState,
    SystemParams,
    a_initial_matrix,
    a_interior_matrix,
    f_factor,
    f_minus_one,
    g_factor,
    g_matrix,
    liouville_propagator,
    system_propagator,
)


def test_pair_state_index_roundtrip():
    assert [(s.plus, s.minus) for s in PAIR_STATES] == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    for i in range(4):
        assert PairState.from_index(i).index == i
    with pytest.raises(ValueError):
        PairState(0, 1)
    with pytest.raises(ValueError):
        PairState.from_index(4)


def test_propagator_special_cases():
    np.testing.assert_array_equal(system_propagator(SystemParams(1.0, 1.0), 0.0), np.eye(2))
    dt = 0.3
    k = system_propagator(SystemParams(1.0, 0.0), dt)
    np.testing.assert_allclose(k, np.diag([np.exp(-1j * dt), np.exp(1j * dt)]), atol=1e-15)
    with pytest.raises(ValueError):
        system_propagator(SystemParams(), -0.1)


def test_propagator_unitary_and_exact():
    from scipy.linalg import expm

    for eps, delta, dt in itertools.product([0.0, 0.5, 1.0, 2.0], [0.0, 1.0, 1.7], [0.01, 0.1, 1.0]):
        sys = SystemParams(eps, delta)
        k = system_propagator(sys, dt)
        assert np.abs(k @ k.conj().T - np.eye(2)).max() <= 1e-14
        np.testing.assert_allclose(k, expm(-1j * sys.hamiltonian * dt), atol=1e-13)


def test_f_factor_properties(rng):
    for _ in range(20):
        eta = complex(*rng.normal(size=2))
        for s1, s2 in itertools.product(PAIR_STATES, repeat=2):
            if s1.diagonal:
                assert f_factor(s1, s2, eta) == 1
            assert abs(abs(f_factor(s1, s2, 1j * eta.imag)) - 1) < 1e-14
            assert abs(f_minus_one(s1, s2, eta) - (f_factor(s1, s2, eta) - 1)) < 1e-14
            assert f_factor(s1, s2, 0) == 1


def test_f_factor_example():
    a, b = 0.37, -0.81
    val = f_factor(PairState(1, -1), PairState(1, 1), complex(a, b))
    assert abs(val - np.exp(-4j * b)) < 1e-15
    assert abs(abs(val) - 1) < 1e-15


def test_f_minus_one_small_eta():
    s1, s2 = PairState(1, -1), PairState(-1, 1)
    eta = 1e-12 + 3e-13j
    expected = -2 * (-eta - np.conj(eta))  # exponent to first order
    assert abs(f_minus_one(s1, s2, eta) - expected) <= 1e-10 * abs(expected)
    assert abs(f_factor(s1, s2, eta) - 1 - expected) > 1e-6 * abs(expected)  # naive route loses digits


def test_g_identity_and_liouville():
    g = g_matrix(np.eye(2, dtype=complex))
    np.testing.assert_array_equal(g, np.eye(4))
    k = system_propagator(SystemParams(0.7, 1.3), 0.2)
    # kron(K, conj K) is ordered with spin +1 first; the pair index puts it last
    order = [3, 2, 1, 0]
    direct = np.kron(k, k.conj())[np.ix_(order, order)]
    np.testing.assert_allclose(g_matrix(k), direct, atol=1e-15)
    np.testing.assert_allclose(liouville_propagator(k), direct, atol=1e-15)
    assert abs(np.sum(np.abs(g_matrix(k)) ** 2) - 4) < 1e-13


def test_liouville_matches_density_action(rng):
    from tsmatpi.dynamics import unvectorize_density, vectorize_density

    k = system_propagator(SystemParams(1.0, 1.0), 0.1)
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = x @ x.conj().T
    rho /= np.trace(rho)
    got = unvectorize_density(liouville_propagator(k) @ vectorize_density(rho))
    np.testing.assert_allclose(got, k @ rho @ k.conj().T, atol=1e-15)


def test_step_weights(std_bath, decoupled):
    eta, k = std_bath
    assert np.abs(a_initial_matrix(eta, k) - a_interior_matrix(eta, k)).max() > 1e-6
    eta0, k0 = decoupled
    np.testing.assert_allclose(a_initial_matrix(eta0, k0), g_matrix(k0), atol=0)
    np.testing.assert_allclose(a_interior_matrix(eta0, k0), g_matrix(k0), atol=0)


def test_g_factor_scalar_matches_table():
    k = system_propagator(SystemParams(1.0, 1.0), 0.1)
    g = g_matrix(k)
    for a, b in itertools.product(PAIR_STATES, repeat=2):
        assert g[a.index, b.index] == g_factor(a, b, k)
