"""Command-line front end: generate configurations, run simulations and
sweeps, compute spectra, render reports, and run the acceptance suite.

Exit codes: 0 success, 1 usage error, 2 run failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from chainform.chain import ChainError, Configuration
from chainform.continuous import MobParams, integrate, outer_angle_watch
from chainform.discrete import DiscreteStrategy, TraceMode, run_discrete
from chainform.generators import Family, GeneratorSpec, generate
from chainform import spectral
from chainform.sweep import ExperimentSpec, run_sweep

FAMILIES = {f.value: f for f in Family}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_gen_args(p):
    p.add_argument("--family", required=True, choices=sorted(FAMILIES))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--tau", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=0)


def _gen_config(args, eps: float) -> Configuration:
    return generate(GeneratorSpec(
        family=FAMILIES[args.family], n=args.n, delta=args.delta,
        tau=args.tau, seed=args.seed, epsilon=eps,
    ))


def _load_or_gen(args) -> Configuration:
    if getattr(args, "config", None):
        return Configuration.from_csv(args.config)
    if getattr(args, "family", None) is None:
        raise ChainError("either --config or --family is required")
    return _gen_config(args, getattr(args, "eps", 1e-4))


def _write_trace_csv(path, rows):
    """Long-format trace: t,i,x,y."""
    with open(path, "w") as fh:
        fh.write("t,i,x,y\n")
        for t, cfg in rows:
            for i, (x, y) in enumerate(cfg.positions, start=1):
                fh.write(f"{t!r},{i},{x!r},{y!r}\n")


def _cmd_gen(args) -> int:
    cfg = _gen_config(args, args.eps)
    if args.out:
        cfg.to_csv(args.out)
    else:
        cfg.to_csv(sys.stdout)
    return 0


def _trace_mode(args) -> TraceMode:
    if args.trace == "none":
        return TraceMode.none()
    if args.trace == "full":
        return TraceMode.full()
    return TraceMode.every_k(args.trace_k)


def _cmd_simulate(args, render: bool = False) -> int:
    start = _load_or_gen(args)
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    if args.engine == "discrete":
        if args.strategy not in ("max-gtm", "one-fixed-gtm", "tau-gtm"):
            raise ChainError(f"strategy {args.strategy!r} needs --engine continuous")
        if args.strategy == "max-gtm":
            strat = DiscreteStrategy.max_gtm()
        elif args.strategy == "one-fixed-gtm":
            strat = DiscreteStrategy.one_fixed("first")
        else:
            strat = DiscreteStrategy.tau_gtm(args.tau)
        mode = _trace_mode(args) if out or render else TraceMode.none()
        res = run_discrete(strat, start, args.eps, args.max_rounds, mode)
        print(f"outcome={res.outcome.value} rounds={res.rounds}")
        if out:
            res.final.to_csv(out / "final.csv")
            if res.trace:
                _write_trace_csv(out / "trace.csv", [(e.round, e.config) for e in res.trace])
                with open(out / "metrics.csv", "w") as fh:
                    fh.write("t,phi1,phi2,L,delta_1n\n")
                    for e in res.trace:
                        fh.write(f"{e.round},{e.phi1!r},{e.phi2!r},"
                                 f"{e.config.length!r},{e.config.endpoint_distance!r}\n")
            if render:
                _render_report(out, start, res.final,
                               [(e.round, e.config) for e in (res.trace or [])],
                               discrete=True, trace_entries=res.trace)
        return 0
    # continuous
    if args.strategy not in ("max-mob", "naive-max-mob"):
        raise ChainError(f"strategy {args.strategy!r} needs --engine discrete")
    params = MobParams(tau=args.tau, naive=args.strategy == "naive-max-mob", dt=args.dt)
    sample = args.sample_dt if (out or render) else None
    res = integrate(start, params, args.eps, eps_collapse=args.eps_collapse,
                    t_max=args.t_max, sample_dt=sample)
    print(f"outcome={res.outcome.value} elapsed={res.elapsed!r} "
          f"projections={res.projections}")
    if out:
        res.final.to_csv(out / "final.csv")
        if res.trace:
            _write_trace_csv(out / "trace.csv", res.trace)
            watch = outer_angle_watch(res.trace)
            with open(out / "metrics.csv", "w") as fh:
                fh.write("t,alpha_ell,alpha_r,O_ell,O_r,I,H_ell,H_r,L,delta_1n\n")
                for (t, cfg), w in zip(res.trace, watch):
                    fh.write(",".join(repr(float(x)) for x in w)
                             + f",{cfg.length!r},{cfg.endpoint_distance!r}\n")
        if render:
            _render_report(out, start, res.final, res.trace or [], discrete=False)
    return 0


def _render_report(out: Path, start, final, trace, discrete: bool, trace_entries=None):
    from chainform import plotting

    plotting.save_chain_figure([start, final], ["start", "final"],
                               out / "chains.png", title="chain configurations")
    if discrete and trace_entries:
        t = [e.round for e in trace_entries]
        plotting.save_series_figure(
            t,
            {"phi1": [e.phi1 for e in trace_entries],
             "L": [e.config.length for e in trace_entries],
             "delta_1n": [e.config.endpoint_distance for e in trace_entries]},
            out / "metrics.png", title="per-round metrics")
    elif trace:
        watch = outer_angle_watch(trace)
        t = [w[0] for w in watch]
        plotting.save_series_figure(
            t,
            {"O_ell": [w[3] for w in watch], "O_r": [w[4] for w in watch],
             "I": [w[5] for w in watch],
             "L": [cfg.length for _, cfg in trace],
             "delta_1n": [cfg.endpoint_distance for _, cfg in trace]},
            out / "metrics.png", title="sampled metrics")


def _floats(text):
    return tuple(float(x) for x in text.split(","))


def _ints(text):
    return tuple(int(x) for x in text.split(","))


def _cmd_sweep(args) -> int:
    spec = ExperimentSpec(
        engine=args.engine, strategy=args.strategy, family=FAMILIES[args.family],
        ns=_ints(args.n), deltas=_floats(args.delta), taus=_floats(args.tau),
        epss=_floats(args.eps), seeds=_ints(args.seed),
        max_rounds=args.max_rounds, t_max=args.t_max, dt=args.dt,
        eps_collapse=args.eps_collapse,
    )
    result = run_sweep(spec, out_dir=args.out)
    errors = [r for r in result.rows if r["error"]]
    print(f"rows={len(result.rows)} errors={len(errors)}")
    return 0


def _cmd_spectrum(args) -> int:
    m = spectral.build(args.matrix, n=args.n)
    spec_res = spectral.eigenvalues(m)
    lines = ["k,lambda,residual"]
    for k, (lam, res) in enumerate(zip(spec_res.eigenvalues, spec_res.residuals), start=1):
        lines.append(f"{k},{float(lam)!r},{float(res)!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    radius = spectral.spectral_radius(m)
    summary = f"spectral_radius={radius!r}"
    if m.symmetric:
        summary += f" rayleigh_bound={spectral.rayleigh_bound(m)!r}"
    print(summary)
    return 0


def _cmd_verify(args) -> int:
    import subprocess

    if args.suite != "acceptance":
        raise ChainError(f"unknown suite {args.suite!r}")
    # the acceptance tests live in the repository, not the installed package
    here = Path(__file__).resolve()
    candidates = [p / "tests" / "test_acceptance.py" for p in here.parents]
    target = next((c for c in candidates if c.exists()), None)
    if target is None:
        print("error: tests/test_acceptance.py not found near the package",
              file=sys.stderr)
        return 2
    rc = subprocess.call([sys.executable, "-m", "pytest", "-v", str(target)])
    return 0 if rc == 0 else 2


def build_parser() -> _Parser:
    p = _Parser(prog="chainform", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a configuration CSV")
    _add_gen_args(g)
    g.add_argument("--eps", type=float, default=1e-4,
                   help="epsilon for the lower-bound family")
    g.add_argument("--out", default=None)

    for name in ("simulate", "report"):
        s = sub.add_parser(name, help="run one simulation"
                           + (" and render figures" if name == "report" else ""))
        s.add_argument("--engine", choices=("discrete", "continuous"), required=True)
        s.add_argument("--strategy", required=True, choices=(
            "max-gtm", "one-fixed-gtm", "tau-gtm", "max-mob", "naive-max-mob"))
        s.add_argument("--config", default=None, help="start configuration CSV")
        s.add_argument("--family", choices=sorted(FAMILIES), default=None)
        s.add_argument("--n", type=int, default=8)
        s.add_argument("--delta", type=float, default=0.1)
        s.add_argument("--tau", type=float, default=0.25)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--eps", type=float, default=1e-4)
        s.add_argument("--eps-collapse", type=float, default=None)
        s.add_argument("--dt", type=float, default=1e-3)
        s.add_argument("--sample-dt", type=float, default=0.1)
        s.add_argument("--max-rounds", type=int, default=10**6)
        s.add_argument("--t-max", type=float, default=1e3)
        s.add_argument("--out", default=None, help="output directory")
        s.add_argument("--trace", choices=("none", "every-k", "full"),
                       default="every-k")
        s.add_argument("--trace-k", type=int, default=100)

    w = sub.add_parser("sweep", help="run a parameter sweep")
    w.add_argument("--engine", choices=("discrete", "continuous"), required=True)
    w.add_argument("--strategy", required=True, choices=(
        "max-gtm", "one-fixed-gtm", "tau-gtm", "max-mob", "naive-max-mob"))
    w.add_argument("--family", choices=sorted(FAMILIES), required=True)
    w.add_argument("--n", required=True, help="comma-separated list")
    w.add_argument("--delta", default="0.1", help="comma-separated list")
    w.add_argument("--tau", default="0.25", help="comma-separated list")
    w.add_argument("--eps", default="1e-4", help="comma-separated list")
    w.add_argument("--seed", default="0", help="comma-separated list")
    w.add_argument("--max-rounds", type=int, default=10**6)
    w.add_argument("--t-max", type=float, default=1e3)
    w.add_argument("--dt", type=float, default=1e-3)
    w.add_argument("--eps-collapse", type=float, default=None)
    w.add_argument("--out", default=None, help="output directory")

    sp = sub.add_parser("spectrum", help="eigenvalues of a named matrix")
    sp.add_argument("--matrix", required=True,
                    choices=("A1", "A2", "A3", "jacobian-marching"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out", default=None)

    v = sub.add_parser("verify", help="run a test suite")
    v.add_argument("--suite", default="acceptance")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "report":
            return _cmd_simulate(args, render=True)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "spectrum":
            return _cmd_spectrum(args)
        if args.command == "verify":
            return _cmd_verify(args)
        raise ChainError(f"unknown command {args.command!r}")
    except SystemExit as exc:
        return int(exc.code or 0)
    except ChainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # unexpected failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
