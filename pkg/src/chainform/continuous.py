"""Continuous-time engine for the move-on-bisector strategy family.

Movement rules: outer robots recede from their neighbor at speed 1 - tau
while never stretching a taut edge past length 1; a bent inner robot moves
at speed 1 along its interior-angle bisector when an adjacent edge is taut
or its angle is below the sharpness threshold psi = 2*acos(1 - tau);
a locally straight inner robot chases the midpoint of its neighbors at
speed 1 and tracks it once reached. The naive variant moves outer robots
at full speed 1 and drops the sharp-angle condition.

Time discretization: explicit Euler with adaptive step halving whenever a
trial step would break connectivity (hard projection as a last resort).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from chainform import _kernels
from chainform.chain import ETA_COL, ETA_ZERO, ChainError, Configuration
from chainform.classify import is_eps_maxchain, metrics, segment_indices


@dataclass(frozen=True)
class MobParams:
    """Parameters of the continuous strategy and its integrator."""

    tau: float = 0.25
    naive: bool = False
    dt: float = 1e-3
    eta_taut: float = 1e-6
    eta_col: float = ETA_COL
    # distance below which a robot counts as collinear with its neighbors;
    # scaled with dt because straightness is only maintained to O(dt)
    straight_tol: Optional[float] = None
    # stiffness saturation: trackers farther than sat*dt from the midpoint
    # move straight at it with speed 1
    sat: float = 10.0
    # taut-check hysteresis band for bend robots that moved on the previous
    # step; scaled with dt because the tracker lag that un-tautens a moving
    # bend's adjacent edge is O(dt)
    taut_hyst: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.tau <= 0.5:
            raise ChainError("tau must lie in (0, 1/2]")
        if self.dt <= 0.0:
            raise ChainError("dt must be positive")

    @property
    def psi(self) -> float:
        """Sharp-angle threshold 2*acos(1 - tau)."""
        return 2.0 * math.acos(1.0 - self.tau)

    @property
    def straight_tolerance(self) -> float:
        if self.straight_tol is not None:
            return self.straight_tol
        return max(self.eta_col, 10.0 * self.dt)

    @property
    def taut_hysteresis(self) -> float:
        if self.taut_hyst is not None:
            return self.taut_hyst
        return 10.0 * self.dt


@dataclass(frozen=True)
class VelocityField:
    """Velocity vectors for every robot plus the movement-state tags
    (0 frozen, 1 bisector, 2 tracker, 3 saturated tracker, 4 outer)."""

    v: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        self.v.setflags(write=False)
        self.states.setflags(write=False)


class ContinuousOutcome(enum.Enum):
    EPS_MAXCHAIN = "eps-maxchain"
    COLLAPSED = "collapsed"
    TIME_BUDGET_EXCEEDED = "time-budget-exceeded"


@dataclass(frozen=True)
class ContinuousRunResult:
    final: Configuration
    elapsed: float
    outcome: ContinuousOutcome
    trace: Optional[list] = field(default=None)  # list of (time, Configuration)
    projections: int = 0  # hard connectivity projections (diagnostic)


def velocity_field(config: Configuration, params: MobParams) -> VelocityField:
    """Evaluate the strategy's velocity field at one configuration."""
    p = np.ascontiguousarray(config.positions)
    n = config.n
    if n < 3:
        raise ChainError("the continuous strategy needs n >= 3")
    v = np.zeros((n, 2))
    state = np.zeros(n, dtype=np.int8)
    cvec = np.zeros((n, 2))
    work = np.zeros((3, n))
    _kernels.mob_velocity(
        p, v, state, cvec, work,
        params.tau, params.naive, 1.0 / params.dt, params.psi,
        params.eta_taut, ETA_ZERO, params.straight_tolerance, params.sat,
        np.zeros(n, dtype=np.int8), 0.0,
    )
    return VelocityField(v=v, states=state)


def distance_rate(p_i, v_i, p_j, v_j) -> float:
    """Instantaneous rate of change of the distance between two moving
    points: -(||v_i|| cos(beta_ij) + ||v_j|| cos(beta_ji)), where beta_ij
    is the angle between v_i and the direction from p_i to p_j."""
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    d = p_j - p_i
    dist = float(np.linalg.norm(d))
    if dist < 1e-300:
        raise ChainError("distance rate undefined for coincident points")
    u = d / dist
    return float(-(np.dot(v_i, u) + np.dot(v_j, -u)))


def integrate(
    start: Configuration,
    params: MobParams,
    eps: float,
    eps_collapse: Optional[float] = None,
    t_max: float = 1e3,
    sample_dt: Optional[float] = None,
) -> ContinuousRunResult:
    """Run the strategy until an eps-approximation of the max-chain, a
    collapse of all robots to (almost) one point, or the time budget.

    ``sample_dt`` enables trace recording: the state is stored at t = 0 and
    every sample_dt of simulated time (plus the final state). Collapse is
    detected conservatively via the bounding-box diagonal, so Collapsed
    implies max pairwise distance <= eps_collapse.
    """
    if t_max <= 0.0:
        raise ChainError("t_max must be positive")
    if start.n < 3:
        raise ChainError("the continuous strategy needs n >= 3")
    if eps_collapse is None:
        eps_collapse = eps
    trace: Optional[list] = [] if sample_dt else None

    config = start
    if is_eps_maxchain(config, eps):
        return ContinuousRunResult(config, 0.0, ContinuousOutcome.EPS_MAXCHAIN,
                                   [(0.0, config)] if trace is not None else None)
    if _kernels.chain_diameter_bound(np.ascontiguousarray(config.positions)) <= eps_collapse:
        return ContinuousRunResult(config, 0.0, ContinuousOutcome.COLLAPSED,
                                   [(0.0, config)] if trace is not None else None)

    P = np.array(config.positions)
    t = 0.0
    nproj = 0
    if trace is not None:
        trace.append((0.0, config))
    chunk = sample_dt if sample_dt else t_max
    # global step allowance shared across chunks: halved steps inflate the count
    budget = int(t_max / params.dt * 64.0) + 64
    sticky = np.zeros(start.n, dtype=np.int8)
    while t < t_max - 1e-12:
        t_stop = min(t + chunk, t_max)
        t, code, proj, steps = _kernels.mob_advance(
            P, t, t_stop, params.dt, params.tau, params.naive, params.psi,
            params.eta_taut, ETA_ZERO, params.straight_tolerance, params.sat,
            eps, eps_collapse, budget, sticky, params.taut_hysteresis,
        )
        nproj += proj
        budget -= steps
        cfg = Configuration(P)
        if trace is not None:
            trace.append((t, cfg))
        if code == 1:
            return ContinuousRunResult(cfg, t, ContinuousOutcome.EPS_MAXCHAIN, trace, nproj)
        if code == 2:
            return ContinuousRunResult(cfg, t, ContinuousOutcome.COLLAPSED, trace, nproj)
        if code == 3 and budget <= 0:  # global step budget exhausted
            return ContinuousRunResult(
                cfg, t, ContinuousOutcome.TIME_BUDGET_EXCEEDED, trace, nproj
            )
    return ContinuousRunResult(
        Configuration(P), t, ContinuousOutcome.TIME_BUDGET_EXCEEDED, trace, nproj
    )


def outer_angle_watch(trace, eta_col: float = 2e-2):
    """Per-sample metric tuples (time, alpha_ell, alpha_r, O_ell, O_r, I,
    H_ell, H_r) from a recorded trace.

    The default eta_col is matched to the integration accuracy rather than
    the strict geometric tolerance: the integrator maintains collinearity
    of straight runs only to O(dt), so bend detection must allow for that
    wobble (the same tolerance is used for the angle test).
    """
    rows = []
    for t, cfg in trace:
        seg = segment_indices(cfg, eta_col=eta_col, eta_ang=eta_col)
        m = metrics(cfg, seg)
        rows.append((t, m.alpha_ell, m.alpha_r, m.O_ell, m.O_r, m.I, m.H_ell, m.H_r))
    return rows
