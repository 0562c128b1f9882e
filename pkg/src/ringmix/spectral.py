"""Spectral analysis of ring mixing and randomized-ring consensus rates.

How fast repeated mixing pulls L learner models to their common mean is
governed by rho, the second-largest eigenvalue magnitude of the mixing
matrix: after k steps of the fixed ring the distance to the uniform
matrix is exactly rho^k in spectral norm.  For the 1/3-weighted ring

    rho(L) = 1/3 + (2/3) cos(2 pi / L),

which crawls toward 1 as L grows: a large fixed ring mixes slowly.

Re-drawing the ring's node labels uniformly at random each step changes
the picture.  With T_k = T0[p_k, p_k] for i.i.d. uniform permutations
p_k, the expected Gram matrix E[T_k' T_k] has diagonal 1/3 and
off-diagonal 2/(3(L-1)), and the expected squared Frobenius distance of
the k-step product from the uniform matrix is

    E ||T_1 ... T_k - U||_F^2 = -1 + tr(G^k) = (L-1) a^k,
    a = 1/3 - 2/(3(L-1)) < 1/3,

so consensus now decays geometrically at a rate bounded away from 1
independent of L.  The induced spectral-norm bound is
sqrt(L-1) / sqrt(3)^k.

This module provides the closed forms, eigendecomposition-based
measurement, and Monte-Carlo estimators (with an exact enumeration
mode for single steps at small L).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import seeding
from .mixing import build_ring_matrix, build_uniform_matrix, conjugate_by_permutation, sample_permutation


@dataclass(frozen=True)
class SpectralReport:
    """Spectrum summary of a mixing matrix.

    rho is the largest magnitude among the non-principal eigenvalues,
    max(|lambda_2|, |lambda_L|) with eigenvalues sorted descending;
    spectral_gap = 1 - rho.  eigenvalues is the full descending list.
    """

    rho: float
    spectral_gap: float
    eigenvalues: np.ndarray


@dataclass(frozen=True)
class ConsensusCurve:
    """Distance-to-uniform per step count.

    distances[i] is the (mean, for Monte-Carlo) distance after
    steps[i] mixing steps in the norm named by norm_kind ("spectral"
    or "frobenius").  Monte-Carlo curves carry 95% confidence
    half-widths and, for the Frobenius norm, the squared-distance
    statistics alongside (the randomized closed form predicts the
    squared mean).  Exact curves have zero half-widths.
    """

    steps: np.ndarray
    distances: np.ndarray
    norm_kind: str
    halfwidths: np.ndarray | None = None
    squared_distances: np.ndarray | None = None
    squared_halfwidths: np.ndarray | None = None
    trials: int | None = None


def second_eigenvalue_ring(n_learners: int) -> float:
    """Closed-form second eigenvalue 1/3 + (2/3) cos(2 pi / L) of the ring.

    Equals rho for every ring size: the most negative eigenvalue is
    never below -1/3 in magnitude while lambda_2 >= 1/3 for L >= 4
    (and everything is 0 at L = 3).
    """
    if n_learners < 3:
        raise ValueError(f"degenerate ring topology: need L >= 3, got {n_learners}")
    return 1.0 / 3.0 + (2.0 / 3.0) * math.cos(2.0 * math.pi / n_learners)


def spectral_rho(T: np.ndarray, symmetry_tol: float = 1e-10) -> SpectralReport:
    """Measure rho and the spectral gap of a mixing matrix by eigendecomposition.

    Expects a symmetric matrix; an asymmetric input is symmetrized to
    (T + T') / 2 with a warning when the asymmetry exceeds
    `symmetry_tol`.
    """
    T = np.asarray(T, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ValueError(f"mixing matrix must be square, got {T.shape}")
    asym = float(np.max(np.abs(T - T.T))) if T.size else 0.0
    if asym > symmetry_tol:
        warnings.warn(
            f"mixing matrix asymmetry {asym:.3e} exceeds {symmetry_tol:.1e}; "
            "symmetrizing before eigendecomposition",
            stacklevel=2,
        )
    sym = 0.5 * (T + T.T)
    eigenvalues = np.sort(np.linalg.eigvalsh(sym))[::-1]
    if len(eigenvalues) < 2:
        rho = 0.0
    else:
        rho = max(abs(float(eigenvalues[1])), abs(float(eigenvalues[-1])))
    return SpectralReport(rho=rho, spectral_gap=1.0 - rho, eigenvalues=eigenvalues)


def fixed_mixing_consensus_bound(n_learners: int, k: int) -> float:
    """rho(L)^k: spectral-norm distance of the k-step fixed ring from uniform."""
    if k < 0:
        raise ValueError(f"need k >= 0, got {k}")
    return second_eigenvalue_ring(n_learners) ** k


def expected_gram(n_learners: int) -> np.ndarray:
    """Expected Gram matrix E[T' T] of a uniformly relabelled ring.

    Diagonal 1/3 (each column of the ring has squared norm 1/3),
    off-diagonal 2/(3(L-1)) (average off-diagonal mass of the ring's
    Gram spread uniformly by the random relabelling).  Doubly
    stochastic with eigenvalues {1, a, ..., a},
    a = 1/3 - 2/(3(L-1)).
    """
    if n_learners < 3:
        raise ValueError(f"degenerate ring topology: need L >= 3, got {n_learners}")
    L = n_learners
    off = 2.0 / (3.0 * (L - 1))
    G = np.full((L, L), off)
    np.fill_diagonal(G, 1.0 / 3.0)
    return G


def _gram_decay(n_learners: int) -> float:
    return 1.0 / 3.0 - 2.0 / (3.0 * (n_learners - 1))


def randomized_frobenius_expectation(n_learners: int, k: int) -> float:
    """E ||T_1 ... T_k - U||_F^2 = (L-1) (1/3 - 2/(3(L-1)))^k, exactly.

    Equal to -1 + tr(G^k) for the expected Gram matrix G; bounded above
    by (L-1)/3^k.
    """
    if k < 0:
        raise ValueError(f"need k >= 0, got {k}")
    L = n_learners
    if L < 3:
        raise ValueError(f"degenerate ring topology: need L >= 3, got {L}")
    return (L - 1) * _gram_decay(L) ** k


def randomized_consensus_bound(n_learners: int, k: int) -> float:
    """sqrt(L-1) / sqrt(3)^k: upper bound on the expected spectral distance.

    Follows from the Frobenius expectation via Jensen and
    ||.||_2 <= ||.||_F.
    """
    if k < 0:
        raise ValueError(f"need k >= 0, got {k}")
    if n_learners < 3:
        raise ValueError(f"degenerate ring topology: need L >= 3, got {n_learners}")
    return math.sqrt(n_learners - 1) / 3.0 ** (k / 2.0)


def spectral_norm(D: np.ndarray) -> float:
    """||D||_2 via the symmetric eigendecomposition of D' D.

    Works for the non-symmetric differences produced by randomized
    products; sqrt of the largest (clipped at 0) Gram eigenvalue.
    """
    D = np.asarray(D, dtype=float)
    gram_eigs = np.linalg.eigvalsh(D.T @ D)
    return float(np.sqrt(max(float(gram_eigs[-1]), 0.0)))


def frobenius_norm(D: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(D, dtype=float)))


def fixed_consensus_curve(n_learners: int, k_max: int) -> ConsensusCurve:
    """Spectral-norm distance ||T0^k - U||_2 for k = 1..k_max by explicit powering."""
    if k_max < 1:
        raise ValueError(f"need k_max >= 1, got {k_max}")
    T0 = build_ring_matrix(n_learners)
    U = build_uniform_matrix(n_learners)
    distances = np.empty(k_max)
    power = np.eye(n_learners)
    for k in range(1, k_max + 1):
        power = power @ T0
        distances[k - 1] = spectral_norm(power - U)
    return ConsensusCurve(
        steps=np.arange(1, k_max + 1), distances=distances, norm_kind="spectral"
    )


def _measure(D: np.ndarray, norm_kind: str) -> float:
    if norm_kind == "spectral":
        return spectral_norm(D)
    if norm_kind == "frobenius":
        return frobenius_norm(D)
    raise ValueError(f"unknown norm_kind {norm_kind!r}; use 'spectral' or 'frobenius'")


def monte_carlo_consensus(
    n_learners: int,
    k_max: int,
    trials: int,
    seed: int,
    norm_kind: str = "frobenius",
    exhaustive: bool = False,
) -> ConsensusCurve:
    """Estimate E ||T_1 ... T_k - U|| for k = 1..k_max over randomized rings.

    Each trial draws k_max fresh independent uniform permutations from
    its own stream (derived from (seed, trial index), so trials could
    run in parallel and still reproduce), forms the running product of
    relabelled ring matrices, and measures the distance to the uniform
    matrix at every prefix.  Returns per-step means with 95% normal
    half-widths; for the Frobenius norm the squared distances are
    aggregated too, since the closed form predicts the squared mean.

    With `exhaustive=True` (single step only, L! <= 720) sampling is
    replaced by exact enumeration of all L! permutations: the returned
    means are exact expectations and the half-widths are zero.
    """
    if k_max < 1:
        raise ValueError(f"need k_max >= 1, got {k_max}")
    _measure(np.zeros((1, 1)), norm_kind)  # validate norm_kind early
    T0 = build_ring_matrix(n_learners)
    U = build_uniform_matrix(n_learners)

    if exhaustive:
        if k_max != 1:
            raise ValueError("exhaustive enumeration covers single steps only (k_max = 1)")
        if math.factorial(n_learners) > 720:
            raise ValueError(
                f"exhaustive enumeration needs L! <= 720, got L = {n_learners}"
            )
        import itertools

        values = []
        squares = []
        for perm in itertools.permutations(range(n_learners)):
            D = conjugate_by_permutation(T0, np.array(perm)) - U
            v = _measure(D, norm_kind)
            values.append(v)
            squares.append(frobenius_norm(D) ** 2)
        mean = float(np.mean(values))
        curve_kwargs = {}
        if norm_kind == "frobenius":
            curve_kwargs = dict(
                squared_distances=np.array([float(np.mean(squares))]),
                squared_halfwidths=np.zeros(1),
            )
        return ConsensusCurve(
            steps=np.array([1]),
            distances=np.array([mean]),
            norm_kind=norm_kind,
            halfwidths=np.zeros(1),
            trials=math.factorial(n_learners),
            **curve_kwargs,
        )

    if trials < 2:
        raise ValueError(f"need trials >= 2 for error bars, got {trials}")
    values = np.empty((trials, k_max))
    for t in range(trials):
        rng = seeding.stream(seed, seeding.TAG_TRIAL, t)
        product = np.eye(n_learners)
        for k in range(k_max):
            Tk = conjugate_by_permutation(T0, sample_permutation(n_learners, rng))
            product = product @ Tk
            values[t, k] = _measure(product - U, norm_kind)

    z95 = 1.959963984540054
    mean = values.mean(axis=0)
    halfwidth = z95 * values.std(axis=0, ddof=1) / math.sqrt(trials)
    curve_kwargs = {}
    if norm_kind == "frobenius":
        sq = values**2
        curve_kwargs = dict(
            squared_distances=sq.mean(axis=0),
            squared_halfwidths=z95 * sq.std(axis=0, ddof=1) / math.sqrt(trials),
        )
    return ConsensusCurve(
        steps=np.arange(1, k_max + 1),
        distances=mean,
        norm_kind=norm_kind,
        halfwidths=halfwidth,
        trials=trials,
        **curve_kwargs,
    )
