"""Fully synchronous round engine for the go-to-midpoint strategy family.

Three strategies share one update rule: inner robots jump to the midpoint
of their neighbors; each outer robot jumps (a 1-tau fraction of the way)
toward the midpoint of its neighbor and a virtual robot one viewing range
further out. Variants: tau > 0 slows the outer robots; one endpoint can be
frozen entirely.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from chainform import _kernels
from chainform.chain import ETA_COL, ETA_ZERO, ChainError, Configuration, ZeroOuterEdge
from chainform.classify import is_eps_marching, is_eps_maxchain
from chainform.potentials import phi1, phi2
from chainform.spectral import MatrixSpec


class StrategyKind(enum.Enum):
    MAX_GTM = "max-gtm"
    ONE_FIXED = "one-fixed-gtm"
    TAU_GTM = "tau-gtm"


@dataclass(frozen=True)
class DiscreteStrategy:
    kind: StrategyKind
    fixed_end: str = "first"  # used by ONE_FIXED: "first" | "last"
    tau: float = 0.0  # used by TAU_GTM

    def __post_init__(self):
        if self.kind is StrategyKind.TAU_GTM and not 0.0 < self.tau <= 0.5:
            raise ChainError("tau must lie in (0, 1/2]")
        if self.fixed_end not in ("first", "last"):
            raise ChainError("fixed_end must be 'first' or 'last'")

    @classmethod
    def max_gtm(cls) -> "DiscreteStrategy":
        return cls(StrategyKind.MAX_GTM)

    @classmethod
    def one_fixed(cls, fixed_end: str = "first") -> "DiscreteStrategy":
        return cls(StrategyKind.ONE_FIXED, fixed_end=fixed_end)

    @classmethod
    def tau_gtm(cls, tau: float) -> "DiscreteStrategy":
        return cls(StrategyKind.TAU_GTM, tau=tau)

    @property
    def _params(self) -> tuple[float, bool, bool]:
        """(tau, fix_first, fix_last) for the shared update kernel."""
        if self.kind is StrategyKind.ONE_FIXED:
            return 0.0, self.fixed_end == "first", self.fixed_end == "last"
        tau = self.tau if self.kind is StrategyKind.TAU_GTM else 0.0
        return tau, False, False


class Outcome(enum.Enum):
    EPS_MAXCHAIN = "eps-maxchain"
    EPS_MARCHING = "eps-marching"
    MAX_ROUNDS_EXCEEDED = "max-rounds-exceeded"


@dataclass(frozen=True)
class TraceMode:
    """Trace recording policy: stride 0 = none, 1 = full, k = every k rounds
    (round 0 and the final round are always included when recording)."""

    stride: int = 0

    @classmethod
    def none(cls) -> "TraceMode":
        return cls(0)

    @classmethod
    def full(cls) -> "TraceMode":
        return cls(1)

    @classmethod
    def every_k(cls, k: int) -> "TraceMode":
        if k < 1:
            raise ChainError("trace stride must be >= 1")
        return cls(k)


@dataclass(frozen=True)
class TraceEntry:
    round: int
    config: Configuration
    phi1: float
    phi2: float  # squared displacement into this round (0 at round 0)


@dataclass(frozen=True)
class DiscreteRunResult:
    final: Configuration
    rounds: int
    outcome: Outcome
    trace: Optional[list] = field(default=None)


def _step(config: Configuration, tau: float, fix_first: bool, fix_last: bool) -> Configuration:
    out = np.empty_like(config.positions)
    status = _kernels.gtm_step(
        np.ascontiguousarray(config.positions), out, tau, fix_first, fix_last, ETA_ZERO
    )
    if status == 1:
        raise ZeroOuterEdge("w_2")
    if status == 2:
        raise ZeroOuterEdge("w_n")
    return Configuration(out)


def step_max_gtm(config: Configuration) -> Configuration:
    """One synchronous round of the plain go-to-midpoint strategy."""
    return _step(config, 0.0, False, False)


def step_one_fixed(config: Configuration, fixed_end: str = "first") -> Configuration:
    """One round with one outer robot held stationary."""
    if fixed_end not in ("first", "last"):
        raise ChainError("fixed_end must be 'first' or 'last'")
    return _step(config, 0.0, fixed_end == "first", fixed_end == "last")


def step_tau_gtm(config: Configuration, tau: float) -> Configuration:
    """One round with outer-robot displacement scaled by 1 - tau."""
    if not 0.0 <= tau <= 0.5:
        raise ChainError("tau must lie in [0, 1/2]")
    return _step(config, tau, False, False)


def strategy_matrix(config: Configuration) -> MatrixSpec:
    """The linear map S acting on the stacked difference vectors so that
    one plain round satisfies w(t+1) = S w(t), applied coordinate-wise.

    S is (n-1)x(n-1) tridiagonal with 1/2 off the diagonal and corner
    entries 1/(2||w_2||), 1/(2||w_n||)."""
    w = config.vectors()
    lens = np.linalg.norm(w, axis=1)
    if lens[0] <= ETA_ZERO:
        raise ZeroOuterEdge("w_2")
    if lens[-1] <= ETA_ZERO:
        raise ZeroOuterEdge("w_n")
    m = config.n - 1
    S = np.zeros((m, m))
    for i in range(m - 1):
        S[i, i + 1] = 0.5
        S[i + 1, i] = 0.5
    S[0, 0] = 1.0 / (2.0 * lens[0])
    S[-1, -1] = 1.0 / (2.0 * lens[-1])
    return MatrixSpec(kind="strategy", dim=m, entries=S)


def run_discrete(
    strategy: DiscreteStrategy,
    start: Configuration,
    eps: float,
    max_rounds: int,
    record: TraceMode = TraceMode.none(),
    eta_col: float = ETA_COL,
) -> DiscreteRunResult:
    """Iterate the strategy until the chain is an eps-approximation of the
    max-chain or of the marching chain, or the round budget runs out.

    ``rounds`` is the first round index at which a predicate holds (0 when
    the start already satisfies one).
    """
    if max_rounds < 1:
        raise ChainError("max_rounds must be >= 1")
    tau, fix_first, fix_last = strategy._params
    trace: Optional[list] = [] if record.stride else None

    def record_entry(rnd, cfg, prev):
        p2 = 0.0 if prev is None else phi2(prev, cfg)
        trace.append(TraceEntry(rnd, cfg, phi1(cfg), p2))

    config = start
    if is_eps_maxchain(config, eps):
        outcome, rounds = Outcome.EPS_MAXCHAIN, 0
    elif is_eps_marching(config, eps, eta_col):
        outcome, rounds = Outcome.EPS_MARCHING, 0
    else:
        outcome, rounds = None, 0
    if trace is not None:
        record_entry(0, config, None)
    if outcome is not None:
        return DiscreteRunResult(config, rounds, outcome, trace)

    P = np.array(config.positions)
    rounds = 0
    chunk = record.stride if record.stride else max_rounds
    while rounds < max_rounds:
        budget = min(chunk, max_rounds - rounds)
        if trace is not None:
            prev = Configuration(P)
        done, code = _kernels.run_gtm(
            P, tau, fix_first, fix_last, eps, eta_col, ETA_ZERO, budget
        )
        rounds += done
        if code < 0:
            which = "w_2" if code == -1 else "w_n"
            raise ZeroOuterEdge(which, round_index=rounds + 1)
        if trace is not None and (code != 0 or done == budget):
            # Recording stride 1 sees every round; larger strides see the
            # chunk boundary states (the kernel is deterministic, so the
            # skipped states are reproducible on demand).
            cfg = Configuration(P)
            record_entry(rounds, cfg, prev if done == 1 else None)
        if code == 1:
            return DiscreteRunResult(Configuration(P), rounds, Outcome.EPS_MAXCHAIN, trace)
        if code == 2:
            return DiscreteRunResult(Configuration(P), rounds, Outcome.EPS_MARCHING, trace)
    return DiscreteRunResult(Configuration(P), rounds, Outcome.MAX_ROUNDS_EXCEEDED, trace)
