"""Numerical reference models for group reliability.

Both oracles describe a pool of ``primaries`` nodes that must all be up, backed by
``backups`` spares. Spares wait at ``fail_standby`` and fail at ``fail_active``
once promoted; setting the two rates equal models an all-active pool.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm


def birth_death_generator(primaries: int, backups: int, fail_active: float, fail_standby: float) -> np.ndarray:
    """Generator matrix over states m = number of failures so far (0..backups+1).

    State backups+1 is absorbing (group lost). Leaving state m happens at rate
    primaries*fail_active + (backups - m)*fail_standby.
    """
    n = backups + 2
    q = np.zeros((n, n))
    for m in range(backups + 1):
        rate = primaries * fail_active + (backups - m) * fail_standby
        q[m, m] = -rate
        q[m, m + 1] = rate
    return q


def markov_survival(primaries: int, backups: int, fail_active: float, fail_standby: float, t: float) -> float:
    """P(group still up at t) from the transient distribution exp(Qt) started in state 0."""
    q = birth_death_generator(primaries, backups, fail_active, fail_standby)
    p = expm(q * t)[0]
    # summing the transient states keeps precision when loss probability is tiny
    return float(min(1.0, max(0.0, p[:-1].sum())))


def mc_survival(
    primaries: int,
    backups: int,
    fail_active: float,
    fail_standby: float,
    t: float,
    trials: int,
    seed: int,
    chunk: int = 250_000,
) -> float:
    """Monte-Carlo estimate of group survival by simulating individual node lifetimes.

    Every node gets its own exponential clock. When an active node dies, the
    lowest-numbered surviving spare is promoted and draws a fresh
    active lifetime from the promotion instant (memoryless). The group is lost when
    an active node dies with no spare left.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    survived = 0
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        survived += _simulate_chunk(rng, n, primaries, backups, fail_active, fail_standby, t)
        done += n
    return survived / trials


def _exp(rng, rate: float, size) -> np.ndarray:
    if rate <= 0:
        return np.full(size, np.inf)
    return rng.exponential(1.0 / rate, size=size)


def _simulate_chunk(rng, n, primaries, backups, fa, fs, t) -> int:
    active = _exp(rng, fa, (n, primaries))       # absolute death times of active nodes
    spare = _exp(rng, fs, (n, backups))          # absolute death times of waiting spares
    lost = np.zeros(n, dtype=bool)
    alive = np.ones(n, dtype=bool)               # trials still being simulated
    rows = np.arange(n)
    for _ in range(backups + 2):
        first_col = active.argmin(axis=1)
        first = active[rows, first_col]
        live = alive & (first <= t)
        if not live.any():
            break
        # spares that are still up at the instant the active node dies
        usable = spare > first[:, None]
        has_spare = usable.any(axis=1)
        lost |= live & ~has_spare
        promote = live & has_spare
        if promote.any():
            # promote the lowest-index live spare; choosing by remaining lifetime would bias the rest
            col = usable.argmax(axis=1)
            r = rows[promote]
            spare[r, col[promote]] = -np.inf
            active[r, first_col[promote]] = first[promote] + _exp(rng, fa, promote.sum())
        alive &= ~(live & ~has_spare)
        # spares that died before this event no longer matter
        spare = np.where(spare <= first[:, None], -np.inf, spare) if backups else spare
    return int((~lost).sum())
