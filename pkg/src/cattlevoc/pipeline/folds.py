"""Stratified fold assignment and coverage-guaranteed bag sampling.

All randomness descends from one integer seed through fixed (domain, index)
spawn keys, so any bag or fold can be regenerated in isolation and parallel
runs agree with serial ones bit for bit.
"""

import numpy as np

from ..errors import BadKError, ClassTooSmallError, InfeasibleCoverageError

# Seed-derivation domains. Never renumber: stored results depend on them.
DOMAIN_FOLDS = 0
DOMAIN_BAGS = 1
DOMAIN_LEARNERS = 2
DOMAIN_INTERNAL = 3
DOMAIN_FOLD_ENSEMBLE = 4


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def derive_seed(seed: int, *key: int) -> int:
    return int(derive_rng(seed, *key).integers(2**63))


def _assign_round_robin(labels, k: int, rng: np.random.Generator) -> np.ndarray:
    folds = np.empty(len(labels), dtype=np.int64)
    for cls in sorted(set(labels)):
        members = np.flatnonzero([lab == cls for lab in labels])
        members = members[rng.permutation(len(members))]
        folds[members] = np.arange(len(members)) % k
    return folds


def stratified_folds(labels, k: int, seed: int) -> np.ndarray:
    """Per-class round-robin fold assignment after a seeded shuffle.

    Guarantees each fold's class count is within 1 of exact proportionality
    and that every class appears in every fold.
    """
    if k < 2:
        raise BadKError(f"need at least 2 folds, got {k}")
    labels = list(labels)
    for cls in sorted(set(labels)):
        count = sum(1 for lab in labels if lab == cls)
        if count < k:
            raise ClassTooSmallError(cls, count, k)
    return _assign_round_robin(labels, k, derive_rng(seed, DOMAIN_FOLDS))


def round_robin_folds(labels, k: int, rng: np.random.Generator) -> np.ndarray:
    """Like stratified_folds but tolerates classes smaller than k."""
    return _assign_round_robin(list(labels), k, rng)


def subsample_bags(
    train_indices: np.ndarray,
    r: int,
    fraction: float,
    min_inclusion: int,
    seed: int,
) -> list:
    """r distinct-index subsets of size round(fraction * n), each train index
    covered at least min_inclusion times.

    Bags are drawn independently; a deterministic repair pass then swaps
    under-covered indices in for the most-covered members of bags that lack
    them.
    """
    train_indices = np.asarray(train_indices, dtype=np.int64)
    n = len(train_indices)
    if r < 1:
        raise ValueError("r must be at least 1")
    if not 0 < fraction <= 1 or fraction * n < 1:
        raise ValueError("fraction must pick at least one index")
    if not 0 <= min_inclusion <= r:
        raise ValueError("min_inclusion must lie in [0, r]")
    size = max(1, round(fraction * n))
    if n * min_inclusion > r * size:
        raise InfeasibleCoverageError(
            f"cannot cover {n} indices {min_inclusion} times with {r} bags of {size}"
        )

    bags = [
        np.sort(derive_rng(seed, DOMAIN_BAGS, i).choice(n, size=size, replace=False))
        for i in range(r)
    ]
    coverage = np.zeros(n, dtype=np.int64)
    for bag in bags:
        coverage[bag] += 1

    guard = 2 * r * size + 1
    while True:
        deficits = np.flatnonzero(coverage < min_inclusion)
        if len(deficits) == 0:
            break
        pos = int(deficits[0])
        best = None  # (coverage, bag index, slot) of the victim
        for bi, bag in enumerate(bags):
            present = bag == pos
            if present.any():
                continue
            slot = int(np.argmax(coverage[bag]))
            cand = (int(coverage[bag[slot]]), bi, slot)
            if best is None or cand[0] > best[0]:
                best = cand
        if best is None or best[0] <= min_inclusion:
            # No swap can help without digging a new hole: counting says this
            # cannot happen while the feasibility precondition holds.
            raise InfeasibleCoverageError("coverage repair failed to converge")
        _, bi, slot = best
        coverage[bags[bi][slot]] -= 1
        coverage[pos] += 1
        bags[bi][slot] = pos
        bags[bi] = np.sort(bags[bi])
        guard -= 1
        if guard == 0:
            raise InfeasibleCoverageError("coverage repair failed to converge")

    return [train_indices[bag] for bag in bags]
