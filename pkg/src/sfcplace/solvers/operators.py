"""Selection and variation operators shared by both GA encodings."""

from __future__ import annotations

import numpy as np


def tournament_select(population, fitnesses, k: int, rng: np.random.Generator) -> int:
    """Index of the fittest (lowest) of ``k`` members drawn with replacement."""
    n = len(population)
    if n == 0:
        raise ValueError("empty population")
    picks = rng.integers(0, n, size=k)
    fit = np.asarray(fitnesses)[picks]
    return int(picks[int(np.argmin(fit))])


def two_point_crossover(parent_a, parent_b, rng: np.random.Generator, cuts: tuple[int, int] | None = None):
    """Swap the slice [p, q) between two parents; returns two new children."""
    a = np.asarray(parent_a)
    b = np.asarray(parent_b)
    if a.shape != b.shape:
        raise ValueError(f"parent length mismatch: {a.shape} vs {b.shape}")
    if cuts is None:
        p, q = sorted(rng.choice(len(a) + 1, size=2, replace=False))
    else:
        p, q = cuts
        if not 0 <= p < q <= len(a):
            raise ValueError(f"invalid cut points {cuts}")
    child_a, child_b = a.copy(), b.copy()
    child_a[p:q] = b[p:q]
    child_b[p:q] = a[p:q]
    return child_a, child_b


def swap_mutation(chromosome, rate: float, rng: np.random.Generator):
    """With probability ``rate``, exchange the values at two distinct random positions."""
    out = np.array(chromosome, copy=True)
    if len(out) < 2:
        return out
    if rng.random() < rate:
        i, j = rng.choice(len(out), size=2, replace=False)
        out[i], out[j] = out[j], out[i]
    return out
