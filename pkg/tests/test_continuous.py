"""Continuous-time engine: velocity field, integration, termination."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chainform.chain import ChainError, Configuration, reconstruct
from chainform.continuous import (
    ContinuousOutcome,
    MobParams,
    distance_rate,
    integrate,
    outer_angle_watch,
    velocity_field,
)
from chainform.generators import gen_continuous_delta_v
from conftest import max_chain, random_2d


def test_params_validation():
    with pytest.raises(ChainError):
        MobParams(tau=0.0)
    with pytest.raises(ChainError):
        MobParams(tau=0.7)
    with pytest.raises(ChainError):
        MobParams(dt=0.0)


def test_psi_identity():
    assert MobParams(tau=0.5).psi == pytest.approx(2.0 * math.pi / 3.0)
    assert MobParams(tau=0.1).psi == pytest.approx(2.0 * math.acos(0.9))


def test_velocity_field_on_v_chain():
    params = MobParams(tau=0.1)
    cfg = gen_continuous_delta_v(9, 0.5)
    vf = velocity_field(cfg, params)
    speeds = np.linalg.norm(vf.v, axis=1)
    # apex angle theta ~ 0.25 < psi ~ 0.90: bisector motion at speed 1, up
    # the symmetry axis
    assert vf.states[4] == 1
    assert np.allclose(vf.v[4], (0.0, 1.0), atol=1e-12)
    # outer robots recede at the reduced speed
    assert speeds[0] == pytest.approx(1.0 - params.tau, abs=1e-9)
    assert speeds[-1] == pytest.approx(1.0 - params.tau, abs=1e-9)
    # universal speed caps
    assert np.all(speeds[1:-1] <= 1.0 + 1e-12)


def test_velocity_field_max_chain_terminal():
    vf = velocity_field(max_chain(8), MobParams(tau=0.25))
    assert np.allclose(vf.v, 0.0, atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(n=st.integers(3, 24), seed=st.integers(0, 2**32 - 1),
       naive=st.booleans())
def test_speed_caps(n, seed, naive):
    params = MobParams(tau=0.25, naive=naive)
    cfg = random_2d(n, seed)
    speeds = np.linalg.norm(velocity_field(cfg, params).v, axis=1)
    outer_cap = 1.0 if naive else 1.0 - params.tau
    assert speeds[0] <= outer_cap + 1e-12
    assert speeds[-1] <= outer_cap + 1e-12
    assert np.all(speeds[1:-1] <= 1.0 + 1e-12)


def test_distance_rate():
    p = np.array
    assert distance_rate(p((0.0, 0.0)), p((1.0, 0.0)),
                         p((2.0, 0.0)), p((0.0, 0.0))) == pytest.approx(-1.0)
    assert distance_rate(p((0.0, 0.0)), p((0.0, 1.0)),
                         p((2.0, 0.0)), p((0.0, 1.0))) == pytest.approx(0.0)
    assert distance_rate(p((0.0, 0.0)), p((1.0, 0.0)),
                         p((2.0, 0.0)), p((1.0, 0.0))) == pytest.approx(0.0)
    with pytest.raises(ChainError):
        distance_rate(p((1.0, 1.0)), p((0.0, 0.0)), p((1.0, 1.0)), p((0.0, 0.0)))


def test_naive_v_chain_spread_rate():
    # outer robots of the unit-edge V move outward at speed 1; the endpoint
    # distance grows at rate sin(theta) while the triangle persists
    cfg = gen_continuous_delta_v(9, 0.5)
    params = MobParams(tau=0.25, naive=True)
    vf = velocity_field(cfg, params)
    theta = 2.0 * math.asin(0.125)
    rate = distance_rate(cfg.positions[0], vf.v[0],
                         cfg.positions[-1], vf.v[-1])
    assert rate == pytest.approx(math.sin(theta), abs=1e-6)


def test_integrate_immediate_outcomes():
    res = integrate(max_chain(6), MobParams(), eps=1e-6)
    assert res.outcome is ContinuousOutcome.EPS_MAXCHAIN and res.elapsed == 0.0
    collapsed = Configuration(np.full((5, 2), 0.25))
    res = integrate(collapsed, MobParams(), eps=1e-6, eps_collapse=1e-3)
    assert res.outcome is ContinuousOutcome.COLLAPSED and res.elapsed == 0.0
    with pytest.raises(ChainError):
        integrate(max_chain(6), MobParams(), eps=1e-6, t_max=0.0)


def test_integrate_v_chain_within_bound():
    tau = 0.25
    res = integrate(gen_continuous_delta_v(9, 0.5), MobParams(tau=tau), eps=1e-3)
    assert res.outcome is ContinuousOutcome.EPS_MAXCHAIN
    bound = 9 * (1.0 / tau + 1.0 / (1.0 - tau))
    assert res.elapsed <= bound * 1.05


def test_integrate_one_dimensional_fold_collapses():
    # fully folded collinear chain with coincident outer robots gathers in
    # time at most (n-1)/(2 tau)
    tau = 0.25
    k = 4
    w = np.array([(1.0, 0.0)] * k + [(-1.0, 0.0)] * k)
    cfg = reconstruct(w)  # n = 9, p_1 = p_n
    res = integrate(cfg, MobParams(tau=tau), eps=1e-3, eps_collapse=1e-3,
                    t_max=100.0)
    assert res.outcome is ContinuousOutcome.COLLAPSED
    assert res.elapsed <= (cfg.n - 1) / (2.0 * tau) * 1.05


def test_trace_sampling_and_connectivity():
    params = MobParams(tau=0.25)
    res = integrate(random_2d(9, 7), params, eps=1e-3, t_max=100.0,
                    sample_dt=0.1)
    assert res.trace is not None and len(res.trace) >= 2
    times = [t for t, _ in res.trace]
    assert times[0] == 0.0
    assert all(b > a for a, b in zip(times, times[1:]))
    for _, cfg in res.trace:
        # taut edges may overshoot length 1 by the integrator's dt-scaled slop
        assert np.all(cfg.edge_lengths() <= 1.0 + params.eta_taut + 2.0 * params.dt)


def test_outer_angle_watch_rows():
    res = integrate(gen_continuous_delta_v(9, 0.5), MobParams(tau=0.25),
                    eps=1e-3, sample_dt=0.1)
    rows = outer_angle_watch(res.trace)
    assert len(rows) == len(res.trace)
    inner = [row[5] for row in rows]
    assert all(b <= a + 1e-2 for a, b in zip(inner, inner[1:]))
    assert all(len(row) == 8 for row in rows)


def test_integrate_time_budget():
    res = integrate(random_2d(12, 3), MobParams(tau=0.25), eps=1e-9,
                    t_max=0.05)
    assert res.outcome is ContinuousOutcome.TIME_BUDGET_EXCEEDED
    assert res.elapsed == pytest.approx(0.05, abs=1e-9)
