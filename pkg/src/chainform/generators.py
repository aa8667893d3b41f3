"""Construction of all named configuration families plus seeded random chains.

Every generator returns a connected Configuration and is a pure function of
its arguments (random families are pure functions of the seed).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from chainform.chain import ETA_CONN, ChainError, Configuration, reconstruct
from chainform.classify import marching_vector


class Family(enum.Enum):
    OPPOSED_RANDOM = "opposed"
    MARCHING_RANDOM = "marching"
    MARCHING_CHAIN = "marching-chain"
    DISCRETE_DELTA_V = "delta-v"
    CONTINUOUS_DELTA_V = "cont-delta-v"
    TAU_DELTA_V = "tau-delta-v"
    RANDOM_2D = "random2d"
    LOWER_BOUND_OPPOSED = "lower-bound-opposed"


@dataclass(frozen=True)
class GeneratorSpec:
    family: Family
    n: int
    delta: float = 0.0
    tau: float = 0.25
    seed: int = 0
    epsilon: float = 1e-4


def gen_marching_chain(n: int) -> Configuration:
    """The translating fixed-point chain, laid along the +x axis.

    Edge profile 1 - 2(i-1)/n for i = 2..n; the entries are symmetric about
    the middle zero edge, which requires n even.
    """
    if n % 2 != 0 or n < 4:
        raise ChainError("marching chain requires even n >= 4")
    w = np.column_stack([marching_vector(n), np.zeros(n - 1)])
    return reconstruct(w)


def gen_discrete_delta_v(n: int, delta: float) -> Configuration:
    """Nearly-folded V chain: w_i = (delta/(n-1), 1 - 2(i-1)/n)."""
    if n % 2 != 0 or n < 4:
        raise ChainError("discrete delta-V requires even n >= 4")
    if delta <= 0:
        raise ChainError("delta must be positive")
    x = delta / (n - 1)
    w = np.column_stack([np.full(n - 1, x), marching_vector(n)])
    if float(np.linalg.norm(w[0])) > 1.0 + ETA_CONN:
        raise ChainError(f"delta={delta} makes the first edge longer than 1")
    return reconstruct(w)


def gen_continuous_delta_v(n: int, delta: float) -> Configuration:
    """Unit-edge isosceles V: apex at the origin, symmetry axis +y.

    The apex angle is theta = 2*asin(delta / floor(n/2)); each leg consists
    of floor(n/2) unit edges, so the outer robots end up at distance
    2*floor(n/2)*sin(theta/2) = 2*delta from each other.
    """
    if n % 2 != 1 or n < 5:
        raise ChainError("continuous delta-V requires odd n >= 5")
    k = n // 2
    if not 0 < delta < k:
        raise ChainError(f"delta must lie in (0, {k})")
    theta = 2.0 * math.asin(delta / k)
    left = np.array([-math.sin(theta / 2.0), math.cos(theta / 2.0)])
    right = np.array([math.sin(theta / 2.0), math.cos(theta / 2.0)])
    pos = np.empty((n, 2))
    for j in range(k + 1):
        pos[k - j] = j * left  # robots 1..k+1 descend the left leg
        pos[k + j] = j * right  # robots k+1..n climb the right leg
    return Configuration(pos)


def gen_tau_delta_v(n: int, delta: float, tau: float) -> Configuration:
    """V chain tuned to the reduced outer speed: all edges share the
    cross-axis component delta/(n-1), and the main-axis component of edge i
    is the scalar multiple (n/2 - i + 1)/(n/2 - 1) of
    y_2 = (1-tau)/(1-tau + 2/(n-2)).

    At tau = 0 this is exactly the plain discrete V chain; the endpoint
    distance of the start equals delta."""
    if n % 2 != 0 or n < 6:
        raise ChainError("tau delta-V requires even n >= 6")
    if not 0 < tau <= 0.5:
        raise ChainError("tau must lie in (0, 1/2]")
    if delta <= 0:
        raise ChainError("delta must be positive")
    w2 = np.array([delta / (n - 1), (1.0 - tau) / (1.0 - tau + 2.0 / (n - 2))])
    if float(np.linalg.norm(w2)) > 1.0 + ETA_CONN:
        raise ChainError(f"delta={delta} makes the first edge longer than 1")
    i = np.arange(2, n + 1)
    scale = (n / 2.0 - i + 1.0) / (n / 2.0 - 1.0)
    w = np.empty((n - 1, 2))
    w[:, 0] = w2[0]
    w[:, 1] = scale * w2[1]
    return reconstruct(w)


def gen_lower_bound_opposed(n: int, epsilon: float) -> Configuration:
    """Opposed chain with one near-degenerate outer edge; the slow family
    behind the Omega(n^2 log(1/eps)) bound.

    Signed edges along the x axis: -0.313 for i = 2..n-1 and -epsilon for
    the last edge. All edges share one direction, so the chain is opposed;
    the last edge must stretch from epsilon to 1-eps, which takes
    Omega(n^2 log(1/eps)) rounds.
    """
    if n < 3:
        raise ChainError("need n >= 3")
    if not 0 < epsilon < 1:
        raise ChainError("epsilon must lie in (0, 1)")
    s = np.full(n - 1, -0.313)
    s[-1] = -epsilon
    return reconstruct(np.column_stack([s, np.zeros(n - 1)]))


def gen_random(family: Family, n: int, seed: int) -> Configuration:
    """Seeded random chains: collinear opposed/marching or free 2-D.

    Edge lengths are i.i.d. uniform(0.1, 1.0) (bounded away from zero to
    avoid near-degenerate edges). Collinear families lie on a random line;
    interior edge signs are random while the outer edges fix the class.
    """
    if n < 3:
        raise ChainError("need n >= 3")
    rng = np.random.default_rng(seed)
    lengths = rng.uniform(0.1, 1.0, size=n - 1)
    if family is Family.RANDOM_2D:
        angles = rng.uniform(0.0, 2.0 * math.pi, size=n - 1)
        w = lengths[:, None] * np.column_stack([np.cos(angles), np.sin(angles)])
        return reconstruct(w)
    if family not in (Family.OPPOSED_RANDOM, Family.MARCHING_RANDOM):
        raise ChainError(f"gen_random does not handle {family}")
    phi = rng.uniform(0.0, 2.0 * math.pi)
    u = np.array([math.cos(phi), math.sin(phi)])
    signs = np.where(rng.random(n - 1) < 0.5, 1.0, -1.0)
    signs[0] = 1.0
    signs[-1] = 1.0 if family is Family.OPPOSED_RANDOM else -1.0
    return reconstruct((signs * lengths)[:, None] * u)


def generate(spec: GeneratorSpec) -> Configuration:
    """Dispatch a GeneratorSpec to the matching constructor."""
    f = spec.family
    if f is Family.MARCHING_CHAIN:
        return gen_marching_chain(spec.n)
    if f is Family.DISCRETE_DELTA_V:
        return gen_discrete_delta_v(spec.n, spec.delta)
    if f is Family.CONTINUOUS_DELTA_V:
        return gen_continuous_delta_v(spec.n, spec.delta)
    if f is Family.TAU_DELTA_V:
        return gen_tau_delta_v(spec.n, spec.delta, spec.tau)
    if f is Family.LOWER_BOUND_OPPOSED:
        return gen_lower_bound_opposed(spec.n, spec.epsilon)
    return gen_random(f, spec.n, spec.seed)
