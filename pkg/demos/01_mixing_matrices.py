"""Build the two mixing matrices, check their invariants, and watch one
gossip exchange move a weight matrix toward consensus."""

import numpy as np

from ringmix import (
    apply_mixing,
    build_ring_matrix,
    build_uniform_matrix,
    conjugate_by_permutation,
    consensus_distance,
    permutation_for_step,
    verify_doubly_stochastic,
)


def main():
    L = 6
    ring = build_ring_matrix(L)
    uniform = build_uniform_matrix(L)

    print("ring matrix (each learner averages itself and its two neighbors):")
    print(np.array2string(ring, precision=3, suppress_small=True))

    for name, T in (("ring", ring), ("uniform", uniform)):
        report = verify_doubly_stochastic(T)
        print(
            f"{name}: doubly stochastic ok={report.ok} "
            f"row_err={report.max_row_error:.2e} col_err={report.max_col_error:.2e}"
        )

    # A shared seed gives every learner the same relabelling per step,
    # so the randomized topology needs no coordination round.
    perm = permutation_for_step(L, shared_seed=42, step=0)
    relabelled = conjugate_by_permutation(ring, perm)
    print("step-0 permutation:", perm)
    print("relabelled ring row sums:", relabelled.sum(axis=1))

    rng = np.random.default_rng(7)
    W = rng.standard_normal((4, L))
    print(f"consensus distance before mixing: {consensus_distance(W):.4f}")
    for step in range(1, 6):
        W = apply_mixing(W, ring)
        print(f"  after {step} ring exchanges: {consensus_distance(W):.4f}")
    print(f"one uniform exchange: {consensus_distance(apply_mixing(W, uniform)):.2e}")


if __name__ == "__main__":
    main()
