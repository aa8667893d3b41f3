"""Chain-formation simulator: discrete and continuous strategies for
stretching a connected robot chain into a straight line of maximal length,
plus the spectral machinery used to analyze them."""

from chainform.chain import Configuration, chain_vectors, reconstruct
from chainform.classify import (
    ChainClass,
    ChainMetrics,
    SegmentIndices,
    classify,
    is_eps_marching,
    is_eps_maxchain,
    marching_vector,
    metrics,
    segment_indices,
)
from chainform.potentials import phi1, phi2, phi2_diff_lower_bound
from chainform import generators
from chainform.discrete import (
    DiscreteRunResult,
    DiscreteStrategy,
    ZeroOuterEdge,
    run_discrete,
    step_max_gtm,
    step_one_fixed,
    step_tau_gtm,
    strategy_matrix,
)
from chainform.continuous import (
    ContinuousRunResult,
    MobParams,
    distance_rate,
    integrate,
    outer_angle_watch,
    velocity_field,
)
from chainform import spectral
from chainform.sweep import ExperimentSpec, SweepResult, fit_power_law, run_sweep

__version__ = "0.1.0"
