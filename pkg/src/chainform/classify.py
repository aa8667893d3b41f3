"""Structural classification of chains and every metric defined on them.

Angle convention: alpha_i is the interior angle at robot r_i between the
rays to its two neighbors, in [0, pi]. alpha = pi means locally straight,
alpha = 0 means fully folded back.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from chainform.chain import ETA_ANG, ETA_COL, ETA_ZERO, ChainError, Configuration


class ChainTag(enum.Enum):
    OPPOSED = "opposed"
    MARCHING = "marching"
    COLLINEAR_DEGENERATE = "collinear-degenerate"
    TWO_DIMENSIONAL = "two-dimensional"


@dataclass(frozen=True)
class ChainClass:
    tag: ChainTag
    collinear: bool


@dataclass(frozen=True)
class SegmentIndices:
    """Indices of the first bend robot seen from each end.

    ``ell``/``r`` follow the outer-segment definition (edges aligned with
    the first/last edge, zero edges allowed); ``ell_plus``/``r_plus`` are
    the nearest further bends. ``defined`` is False when the whole chain is
    straight-aligned (no bend exists). When no further bend exists beyond
    ``ell`` (resp. ``r``), ``ell_plus`` falls back to n and ``r_plus`` to 1
    so that the height metrics remain defined.
    """

    ell: int
    ell_plus: int
    r: int
    r_plus: int
    defined: bool


@dataclass(frozen=True)
class ChainMetrics:
    L: float
    delta_1n: float
    O_ell: float
    O_r: float
    I: float
    gamma_ell: float
    gamma_r: float
    H_ell: float
    H_r: float
    alpha_ell: float
    alpha_r: float


def tls_line(positions: np.ndarray):
    """Total-least-squares line through the points.

    Returns (centroid, unit direction, max point-to-line distance). The
    direction of the returned unit vector is arbitrary up to sign.
    """
    mean = positions.mean(axis=0)
    c = positions - mean
    a = float(np.dot(c[:, 0], c[:, 0]))
    b = float(np.dot(c[:, 0], c[:, 1]))
    d = float(np.dot(c[:, 1], c[:, 1]))
    lam = 0.5 * ((a + d) + math.hypot(a - d, 2.0 * b))
    u = np.array([b, lam - a])
    norm = float(np.linalg.norm(u))
    if norm < 1e-300:
        u = np.array([1.0, 0.0]) if a >= d else np.array([0.0, 1.0])
    else:
        u = u / norm
    normal = np.array([-u[1], u[0]])
    dist = float(np.abs(c @ normal).max()) if len(c) else 0.0
    return mean, u, dist


def interior_angle(p_prev: np.ndarray, p: np.ndarray, p_next: np.ndarray) -> float:
    """Interior angle at p between rays to its neighbors, in [0, pi].

    Degenerate rays (a neighbor on top of p) count as straight (pi).
    """
    u = p_prev - p
    v = p_next - p
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu < ETA_ZERO or nv < ETA_ZERO:
        return math.pi
    cross = u[0] * v[1] - u[1] * v[0]
    dot = float(u @ v)
    return math.atan2(abs(cross), dot)


def interior_angles(config: Configuration) -> np.ndarray:
    """alpha_i for the inner robots i = 2..n-1."""
    p = config.positions
    return np.array(
        [interior_angle(p[i - 1], p[i], p[i + 1]) for i in range(1, config.n - 1)]
    )


def classify(
    config: Configuration,
    eta_ang: float = ETA_ANG,
    eta_col: float = ETA_COL,
) -> ChainClass:
    _, _, dist = tls_line(config.positions)
    if dist > eta_col:
        return ChainClass(ChainTag.TWO_DIMENSIONAL, collinear=False)
    w = config.vectors()
    n2 = float(np.linalg.norm(w[0]))
    nn = float(np.linalg.norm(w[-1]))
    if n2 <= ETA_ZERO or nn <= ETA_ZERO:
        return ChainClass(ChainTag.COLLINEAR_DEGENERATE, collinear=True)
    w2 = w[0] / n2
    wn = w[-1] / nn
    ang = math.atan2(abs(w2[0] * wn[1] - w2[1] * wn[0]), float(w2 @ wn))
    if ang <= eta_ang:
        return ChainClass(ChainTag.OPPOSED, collinear=True)
    if ang >= math.pi - eta_ang:
        return ChainClass(ChainTag.MARCHING, collinear=True)
    # Collinear chains always have ang close to 0 or pi; fall back on sign.
    tag = ChainTag.OPPOSED if float(w2 @ wn) > 0 else ChainTag.MARCHING
    return ChainClass(tag, collinear=True)


def is_eps_maxchain(config: Configuration, eps: float) -> bool:
    """True when the chain is an eps-approximation of the max-chain."""
    if config.endpoint_distance < (1.0 - eps) * (config.n - 1):
        return False
    return bool(np.all(config.edge_lengths() > 1.0 - eps))


def marching_vector(n: int) -> np.ndarray:
    """Signed edge profile of the marching chain: 1 - 2(i-1)/n for i=2..n."""
    i = np.arange(2, n + 1)
    return 1.0 - 2.0 * (i - 1) / n


def is_eps_marching(config: Configuration, eps: float, eta_col: float = ETA_COL) -> bool:
    """True when the chain is collinear and its signed edge profile deviates
    from the marching chain profile by at most eps in every entry.

    Both orientations of the chain line are tried (the marching profile is
    invariant under reversing the chain, which flips every sign).
    """
    _, u, dist = tls_line(config.positions)
    if dist > eta_col:
        return False
    s = config.vectors() @ u
    m = marching_vector(config.n)
    return bool(
        np.abs(s - m).max() <= eps or np.abs(-s - m).max() <= eps
    )


def segment_indices(
    config: Configuration,
    eta_col: float = ETA_COL,
    eta_zero: float = ETA_ZERO,
    eta_ang: float = ETA_ANG,
) -> SegmentIndices:
    """The straight-prefix indices ell and r plus the next-bend indices.

    Edges with norm <= eta_zero count as zero vectors; direction equality
    against the reference edge is tested by perpendicular deviation of the
    unit vectors (<= eta_col). When the first edge is itself zero, the first
    nonzero edge of the prefix serves as the direction reference.
    """
    n = config.n
    if n < 3:
        raise ChainError("segment indices need n >= 3")
    w = config.vectors()
    lens = np.linalg.norm(w, axis=1)

    def aligned(j, ref):  # j is a 0-based edge index
        if lens[j] <= eta_zero:
            return True
        u = w[j] / lens[j]
        if float(u @ ref) <= 0.0:
            return False
        perp = abs(u[0] * ref[1] - u[1] * ref[0])
        return perp <= eta_col + eta_ang

    def first_ref(order):
        for j in order:
            if lens[j] > eta_zero:
                return w[j] / lens[j]
        return None

    ell = 0
    ref = first_ref(range(n - 1))
    if ref is not None:
        for j in range(1, n - 1):  # edge indices i = 3..n
            if not aligned(j, ref):
                ell = j + 1  # edge j is w_{j+2}; bend prefix ends at robot j+1
                break
    r = 0
    ref = first_ref(range(n - 2, -1, -1))
    if ref is not None:
        for j in range(n - 3, -1, -1):  # edge indices i = n-1..2
            if not aligned(j, ref):
                r = j + 2  # edge j is w_{j+2}; r is that edge's far robot index
                break
    if ell == 0 or r == 0:
        return SegmentIndices(0, 0, 0, 0, defined=False)

    alphas = interior_angles(config)  # alphas[k] is alpha_{k+2}

    ell_plus = n
    for i in range(ell + 1, n):  # robot indices with angles: 2..n-1
        if 2 <= i <= n - 1 and alphas[i - 2] <= math.pi - eta_ang:
            ell_plus = i
            break
    r_plus = 1
    for i in range(r - 1, 1, -1):
        if 2 <= i <= n - 1 and alphas[i - 2] <= math.pi - eta_ang:
            r_plus = i
            break
    return SegmentIndices(ell, ell_plus, r, r_plus, defined=True)


def point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom < 1e-300:
        return float(np.linalg.norm(p - a))
    t = float((p - a) @ ab) / denom
    t = min(1.0, max(0.0, t))
    return float(np.linalg.norm(p - (a + t * ab)))


def metrics(config: Configuration, seg: SegmentIndices) -> ChainMetrics:
    """All scalar chain metrics for a configuration and its segment indices."""
    lens = config.edge_lengths()
    L = float(lens.sum())
    d1n = config.endpoint_distance
    if not seg.defined:
        return ChainMetrics(L, d1n, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, math.pi, math.pi)
    p = config.positions
    n = config.n
    ell, r = seg.ell, seg.r
    # lens[k] is |w_{k+2}|; the sum for O_ell runs over edges i = 2..ell.
    O_ell = float(lens[: ell - 1].sum())
    O_r = float(lens[r - 1 :].sum())
    inner = float(lens[ell - 1 : r - 1].sum()) if r > ell else 0.0
    alpha_ell = interior_angle(p[ell - 2], p[ell - 1], p[ell])
    alpha_r = interior_angle(p[r - 2], p[r - 1], p[r])
    H_ell = point_segment_distance(p[ell - 1], p[0], p[seg.ell_plus - 1])
    H_r = point_segment_distance(p[r - 1], p[seg.r_plus - 1], p[n - 1])
    return ChainMetrics(
        L=L,
        delta_1n=d1n,
        O_ell=O_ell,
        O_r=O_r,
        I=inner,
        gamma_ell=float(ell - 1),
        gamma_r=float(n - r),
        H_ell=H_ell,
        H_r=H_r,
        alpha_ell=alpha_ell,
        alpha_r=alpha_r,
    )
