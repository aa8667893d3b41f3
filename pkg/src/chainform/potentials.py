"""Potential functions measuring progress of the discrete strategies.

phi1 measures distance from the max-chain through edge-length deficits;
phi2 measures total squared per-round displacement and is the monotone
quantity driving the convergence argument.
"""

from __future__ import annotations

import numpy as np

from chainform.chain import ChainError, Configuration


def phi1(config: Configuration) -> float:
    """Sum over edges of (1 - ||w_i||)^2."""
    m = 1.0 - config.edge_lengths()
    return float(np.dot(m, m))


def displacements(config_t: Configuration, config_t1: Configuration) -> np.ndarray:
    """Per-robot displacement vectors z_i = p_i(t+1) - p_i(t)."""
    if config_t.n != config_t1.n:
        raise ChainError(
            f"configurations differ in size: {config_t.n} vs {config_t1.n}"
        )
    return config_t1.positions - config_t.positions


def phi2(config_t: Configuration, config_t1: Configuration) -> float:
    """Sum over robots of ||z_i||^2 for one round of movement."""
    z = displacements(config_t, config_t1)
    return float(np.einsum("ij,ij->", z, z))


def phi2_diff_lower_bound(
    config_t: Configuration,
    config_t1: Configuration,
    config_t2: Configuration,
) -> tuple[float, float]:
    """Evaluate both sides of the one-round potential drop inequality.

    Returns (diff, bound) with diff = phi2(t) - phi2(t+1) and
    bound = 1/4 * sum_i ||z_{i-1} - z_{i+1}||^2, where the displacement
    sequence is padded with the boundary convention z_0 = z_1 and
    z_{n+1} = z_n. The dynamics guarantee diff >= bound (up to roundoff).
    """
    z = displacements(config_t, config_t1)
    diff = phi2(config_t, config_t1) - phi2(config_t1, config_t2)
    zp = np.vstack([z[:1], z, z[-1:]])  # z_0 .. z_{n+1}
    d = zp[:-2] - zp[2:]  # z_{i-1} - z_{i+1} for i = 1..n
    bound = 0.25 * float(np.einsum("ij,ij->", d, d))
    return diff, bound
