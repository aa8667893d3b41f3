"""Experiment orchestration: parameter sweeps over both engines and
scaling-law fits of the results."""

from __future__ import annotations

import itertools
import json
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from chainform.chain import ChainError
from chainform.continuous import MobParams, integrate
from chainform.discrete import DiscreteStrategy, TraceMode, run_discrete
from chainform.generators import Family, GeneratorSpec, generate
from chainform.potentials import phi1

ROW_FIELDS = (
    "engine", "strategy", "family", "n", "delta", "tau", "eps", "seed",
    "outcome", "rounds", "elapsed", "L", "delta_1n", "phi1", "error",
)


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of a sweep: the cartesian product of the
    grid lists is run once per seed."""

    engine: str  # "discrete" | "continuous"
    strategy: str  # max-gtm | one-fixed-gtm | tau-gtm | max-mob | naive-max-mob
    family: Family
    ns: tuple
    deltas: tuple = (0.0,)
    taus: tuple = (0.25,)
    epss: tuple = (1e-4,)
    seeds: tuple = (0,)
    max_rounds: int = 10**6
    t_max: float = 1e3
    dt: float = 1e-3
    eps_collapse: Optional[float] = None

    def __post_init__(self):
        if self.engine not in ("discrete", "continuous"):
            raise ChainError(f"unknown engine {self.engine!r}")
        if not (self.ns and self.deltas and self.taus and self.epss and self.seeds):
            raise ChainError("grid lists must be non-empty")
        if self.max_rounds < 1 or self.t_max <= 0:
            raise ChainError("budgets must be positive")


@dataclass(frozen=True)
class SweepResult:
    rows: list  # one dict per grid point, sorted by parameters
    fit: Optional[tuple] = field(default=None)  # (slope, intercept, r_squared)

    def to_csv(self, path_or_buf) -> None:
        lines = [",".join(ROW_FIELDS)]
        for row in self.rows:
            lines.append(",".join(_cell(row[k]) for k in ROW_FIELDS))
        text = "\n".join(lines) + "\n"
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w") as fh:
                fh.write(text)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def run_point(spec: ExperimentSpec, n: int, delta: float, tau: float,
              eps: float, seed: int) -> dict:
    """Run one grid point; errors are captured in the row, not raised."""
    row = {k: None for k in ROW_FIELDS}
    row.update(engine=spec.engine, strategy=spec.strategy,
               family=spec.family.value, n=n, delta=delta, tau=tau,
               eps=eps, seed=seed, error="")
    try:
        start = generate(GeneratorSpec(
            family=spec.family, n=n, delta=delta, tau=tau, seed=seed, epsilon=eps
        ))
        if spec.engine == "discrete":
            if spec.strategy == "max-gtm":
                strat = DiscreteStrategy.max_gtm()
            elif spec.strategy == "one-fixed-gtm":
                strat = DiscreteStrategy.one_fixed("first")
            elif spec.strategy == "tau-gtm":
                strat = DiscreteStrategy.tau_gtm(tau)
            else:
                raise ChainError(f"unknown discrete strategy {spec.strategy!r}")
            res = run_discrete(strat, start, eps, spec.max_rounds, TraceMode.none())
            final, measure = res.final, ("rounds", res.rounds)
            row["outcome"] = res.outcome.value
        else:
            if spec.strategy == "max-mob":
                params = MobParams(tau=tau, naive=False, dt=spec.dt)
            elif spec.strategy == "naive-max-mob":
                params = MobParams(tau=tau, naive=True, dt=spec.dt)
            else:
                raise ChainError(f"unknown continuous strategy {spec.strategy!r}")
            res = integrate(start, params, eps,
                            eps_collapse=spec.eps_collapse, t_max=spec.t_max)
            final, measure = res.final, ("elapsed", res.elapsed)
            row["outcome"] = res.outcome.value
        row[measure[0]] = measure[1]
        row["L"] = final.length
        row["delta_1n"] = final.endpoint_distance
        row["phi1"] = phi1(final)
    except Exception as exc:  # recorded, never aborts the sweep
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _grid(spec: ExperimentSpec):
    return sorted(itertools.product(spec.ns, spec.deltas, spec.taus,
                                    spec.epss, spec.seeds))


def run_sweep(spec: ExperimentSpec, out_dir=None, workers: Optional[int] = None) -> SweepResult:
    """Run every grid point; deterministic given the spec.

    Parallelism: points are independent; the worker count is capped by the
    CHAINFORM_WORKERS environment variable (default 1 = sequential). Rows
    come back sorted by parameters regardless of completion order.
    """
    cap = int(os.environ.get("CHAINFORM_WORKERS", "1") or "1")
    if workers is None:
        workers = cap
    workers = max(1, min(workers, cap if cap > 0 else 1))
    points = _grid(spec)
    t0 = time.time()
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_point, spec, *pt) for pt in points]
            rows = [f.result() for f in futures]
    else:
        rows = [run_point(spec, *pt) for pt in points]
    wall = time.time() - t0
    result = SweepResult(rows=rows)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        result.to_csv(out / "results.csv")
        meta = dict(asdict(spec))
        meta["family"] = spec.family.value
        from chainform import __version__ as version

        with open(out / "metadata.json", "w") as fh:
            json.dump({"spec": meta, "version": version,
                       "wall_time_s": round(wall, 3)}, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return result


def fit_power_law(points) -> tuple[float, float, float]:
    """Ordinary least squares of log(y) on log(x): returns
    (slope, intercept, r_squared)."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise ChainError("need at least 3 points")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ChainError("power-law fit requires positive values")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


def fit_affine_log(points) -> tuple[float, float, float]:
    """OLS of y on log(x): returns (slope, intercept, r_squared). Used for
    rounds ~ a*log(1/eps) + b shapes."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise ChainError("need at least 3 points")
    if any(x <= 0 for x, _ in pts):
        raise ChainError("log-affine fit requires positive x")
    lx = np.log([x for x, _ in pts])
    y = np.array([y for _, y in pts])
    slope, intercept = np.polyfit(lx, y, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2
