import itertools
import math

import numpy as np
import pytest

from ringmix.mixing import build_ring_matrix, build_uniform_matrix, conjugate_by_permutation
from ringmix.spectral import (
    expected_gram,
    fixed_consensus_curve,
    fixed_mixing_consensus_bound,
    frobenius_norm,
    monte_carlo_consensus,
    randomized_consensus_bound,
    randomized_frobenius_expectation,
    second_eigenvalue_ring,
    spectral_norm,
    spectral_rho,
)


@pytest.mark.parametrize("L", [3, 4, 5, 8, 16, 64])
def test_second_eigenvalue_matches_eigendecomposition(L):
    report = spectral_rho(build_ring_matrix(L))
    assert abs(report.rho - second_eigenvalue_ring(L)) <= 1e-12


def test_rho_values_pin_down():
    assert second_eigenvalue_ring(3) == pytest.approx(0.0, abs=1e-15)
    assert second_eigenvalue_ring(4) == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert second_eigenvalue_ring(16) == pytest.approx(0.949253021674191, abs=1e-12)


def test_spectral_rho_of_uniform_is_zero():
    report = spectral_rho(build_uniform_matrix(6))
    assert report.rho == pytest.approx(0.0, abs=1e-12)
    assert report.spectral_gap == pytest.approx(1.0, abs=1e-12)
    assert report.eigenvalues[0] == pytest.approx(1.0, abs=1e-12)


def test_spectral_rho_warns_on_asymmetry():
    T = build_ring_matrix(5).copy()
    T[0, 1] += 1e-6
    with pytest.warns(UserWarning):
        spectral_rho(T)


def test_negative_branch_never_dominates():
    # rho comes from the second-largest eigenvalue for every ring size:
    # the most negative eigenvalue stays at or above -1/3 in magnitude.
    for L in range(3, 129):
        eigs = spectral_rho(build_ring_matrix(L)).eigenvalues
        assert abs(eigs[-1]) <= second_eigenvalue_ring(L) + 1e-12


def test_fixed_power_distance_is_exactly_rho_k():
    # Symmetry makes the bound tight, not just an upper envelope.
    for L in (5, 12):
        rho = second_eigenvalue_ring(L)
        curve = fixed_consensus_curve(L, 10)
        for i, k in enumerate(curve.steps):
            assert curve.distances[i] == pytest.approx(rho ** k, abs=1e-12)


def test_fixed_bound_formula():
    assert fixed_mixing_consensus_bound(8, 0) == 1.0
    rho = second_eigenvalue_ring(8)
    assert fixed_mixing_consensus_bound(8, 3) == pytest.approx(rho**3, rel=1e-15)


def test_expected_gram_matches_enumeration():
    L = 4
    T = build_ring_matrix(L)
    total = np.zeros((L, L))
    for perm in itertools.permutations(range(L)):
        C = conjugate_by_permutation(T, np.array(perm))
        total += C.T @ C
    enumerated = total / math.factorial(L)
    assert np.allclose(enumerated, expected_gram(L), atol=1e-14)


def test_randomized_expectation_matches_pair_enumeration():
    # Exact oracle at depth 2: average ||T2' T1' - U||_F^2 over all
    # ordered permutation pairs, against the closed form.
    L = 4
    T = build_ring_matrix(L)
    U = build_uniform_matrix(L)
    perms = [np.array(p) for p in itertools.permutations(range(L))]
    acc = 0.0
    for p1 in perms:
        A = conjugate_by_permutation(T, p1)
        for p2 in perms:
            B = A @ conjugate_by_permutation(T, p2)
            acc += frobenius_norm(B - U) ** 2
    mean = acc / len(perms) ** 2
    assert mean == pytest.approx(randomized_frobenius_expectation(L, 2), rel=1e-12)


def test_randomized_expectation_single_step_via_enumeration():
    for L in (4, 5):
        curve = monte_carlo_consensus(L, 1, trials=0, seed=0, exhaustive=True)
        assert curve.trials == math.factorial(L)
        assert curve.squared_distances[0] == pytest.approx(
            randomized_frobenius_expectation(L, 1), rel=1e-12
        )
        assert curve.halfwidths[0] == 0.0


def test_randomized_expectation_degenerate_l3_is_zero():
    # One uniform-equivalent step reaches consensus exactly.
    for k in (1, 2, 5):
        assert randomized_frobenius_expectation(3, k) == pytest.approx(0.0, abs=1e-15)


def test_randomized_bound_formula():
    assert randomized_consensus_bound(4, 2) == pytest.approx(np.sqrt(3.0) / 3.0, rel=1e-15)
    assert randomized_consensus_bound(9, 4) == pytest.approx(np.sqrt(8.0) / 9.0, rel=1e-15)


def test_monte_carlo_replays_and_reports_uncertainty():
    a = monte_carlo_consensus(6, 4, trials=50, seed=3)
    b = monte_carlo_consensus(6, 4, trials=50, seed=3)
    assert np.array_equal(a.distances, b.distances)
    assert np.array_equal(a.squared_halfwidths, b.squared_halfwidths)
    assert a.norm_kind == "frobenius"
    assert np.all(a.halfwidths[1:] > 0)
    c = monte_carlo_consensus(6, 4, trials=50, seed=4)
    assert not np.array_equal(a.distances, c.distances)


def test_monte_carlo_spectral_mode():
    curve = monte_carlo_consensus(6, 3, trials=30, seed=0, norm_kind="spectral")
    assert curve.norm_kind == "spectral"
    assert curve.squared_distances is None
    assert np.all(np.diff(curve.distances) < 0)


def test_monte_carlo_input_validation():
    with pytest.raises(ValueError):
        monte_carlo_consensus(6, 0, trials=10, seed=0)
    with pytest.raises(ValueError):
        monte_carlo_consensus(6, 3, trials=1, seed=0)
    with pytest.raises(ValueError):
        monte_carlo_consensus(6, 3, trials=10, seed=0, norm_kind="nuclear")
    with pytest.raises(ValueError):
        monte_carlo_consensus(6, 2, trials=0, seed=0, exhaustive=True)
    with pytest.raises(ValueError):
        monte_carlo_consensus(7, 1, trials=0, seed=0, exhaustive=True)


def test_norm_helpers():
    D = np.array([[3.0, 0.0], [4.0, 0.0]])
    assert frobenius_norm(D) == pytest.approx(5.0, rel=1e-15)
    assert spectral_norm(D) == pytest.approx(5.0, rel=1e-12)
    assert spectral_norm(np.zeros((3, 3))) == 0.0
