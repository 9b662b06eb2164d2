"""Command-line interface: law evaluation, exact series checks, Monte Carlo
gates, and grouped suite runs with CSV/JSON reports."""

from __future__ import annotations

import argparse
import csv
import inspect
import math
import sys

from . import exactlaws, harness, series
from .samplers import RngStream

_LAW_FUNCS = {
    "duration_laplace": exactlaws.duration_laplace,
    "local_time_laplace": exactlaws.local_time_laplace,
    "local_time_density": exactlaws.local_time_density,
    "h_mu": exactlaws.h_mu,
    "lt_sigma_laplace": exactlaws.lt_sigma_laplace,
    "pair_laplace": exactlaws.pair_laplace,
    "pair_density": exactlaws.pair_density,
    "pair_marginal_density": exactlaws.pair_marginal_density,
    "exit_laplace": exactlaws.exit_laplace,
    "hitting_prob": exactlaws.hitting_prob,
    "lt_level_laplace": exactlaws.lt_level_laplace,
    "sbm_local_time_laplace": exactlaws.sbm_local_time_laplace,
    "sbm_pair_laplace": exactlaws.sbm_pair_laplace,
    "y0_z0_laplace": exactlaws.y0_z0_laplace,
    "lt_sigma_laplace_from_x": exactlaws.lt_sigma_laplace_from_x,
    "excursion_sign_kernel": exactlaws.excursion_sign_kernel,
}


def _cmd_laws(args) -> int:
    if args.action != "eval":
        print(f"unknown laws action {args.action!r}", file=sys.stderr)
        return 2
    func = _LAW_FUNCS.get(args.name)
    if func is None:
        print(f"unknown law {args.name!r}; choose from "
              f"{sorted(_LAW_FUNCS)}", file=sys.stderr)
        return 2
    params = inspect.signature(func).parameters
    try:
        kwargs = {}
        for item in args.params:
            key, _, val = item.partition("=")
            if key not in params:
                raise ValueError(f"{args.name} takes {list(params)}, "
                                 f"not {key!r}")
            kwargs[key] = float(val)
        result = func(**kwargs)
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if hasattr(result, "value"):
        print(f"{result.value:.15g} (residual {result.residual:.3g})")
    else:
        print(f"{result:.15g}")
    return 0


def _cmd_series(args) -> int:
    if args.action == "dump":
        rows = series.dump_coefficients(args.order)
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["n", "coef_F", "coef_Fplus"])
        writer.writerows(rows)
        return 0
    if args.action == "check":
        reports = harness.GROUPS["exact"](harness.RunConfig())
        bad = 0
        for r in reports:
            print(f"[{'PASS' if r.passed else 'FAIL'}] {r.test_id}")
            bad += not r.passed
        return 1 if bad else 0
    print(f"unknown series action {args.action!r}", file=sys.stderr)
    return 2


def _cmd_mc(args) -> int:
    import numpy as np

    from . import discretesnake as ds
    from . import levycsbp as lc
    from . import samplers as sp

    rng = RngStream(args.seed)
    reports = []
    if args.law == "stable":
        batch = sp.SampleBatch(
            sp.sample_stable_two_thirds(rng, args.n), "stable-2/3", rng)
        reports = harness.laplace_gate(
            batch, [1.0, 2.0], lambda lam: math.exp(-lam ** (2.0 / 3.0)),
            "positive stable law of index 2/3")
    elif args.law == "u-kernel":
        batch = sp.SampleBatch(sp.sample_U(rng, args.n), "u-kernel", rng)
        reports = harness.laplace_gate(
            batch, [0.5, 1.0],
            lambda b: (1.0 + math.sqrt(2.0 * b))
            * math.exp(-math.sqrt(2.0 * b)),
            "excursion duration kernel transform")
    elif args.law in ("lt-sigma", "lt-sigma-plus"):
        tag = "sigma" if args.law == "lt-sigma" else "sigma_plus"
        sampler = (sp.sample_lt_given_sigma if tag == "sigma"
                   else sp.sample_lt_given_sigma_plus)
        x = sampler(1.0, rng, args.n)
        for order in (1, 2):
            vals = x**order
            se = float(vals.std(ddof=1) / math.sqrt(args.n))
            reports.append(harness._report(
                f"moment:{tag}:n={order}", "conditional local-time moment",
                series.conditional_moment(order, tag), float(vals.mean()),
                f"se={se:.3e}", 4.0 * se, f"seed={args.seed}"))
    elif args.law == "snake":
        counts = ds.batch_snake_stats(args.edges, args.n, rng)
        z = counts[:, 0] * float(args.edges) ** -0.75
        limit = ds.LIMIT_CONST * series.conditional_moment(1, "sigma")
        se = float(z.std(ddof=1) / math.sqrt(len(z)))
        reports.append(harness._report(
            "snake:rescaled-zero-count-mean",
            "rescaled zero-label count vs continuum conditional mean",
            limit, float(z.mean()), f"se={se:.3e}", 0.05 * limit,
            f"seed={args.seed}"))
        pf = counts[:, 1] / (args.edges + 1)
        from scipy import stats as st
        reports.append(harness._report(
            "snake:positive-fraction-ks", "positive fraction vs uniform",
            0.0, float(st.kstest(pf, "uniform").statistic),
            f"one-sample, N={args.n}", harness.KS_THRESHOLD_2E4,
            f"seed={args.seed}"))
    elif args.law == "csbp":
        cfg = lc.PathConfig(dt=args.dt, t_max=args.t_max)
        t0s = lc.simulate_hitting_times(cfg, rng, args.n)
        for lam in (0.5, 1.0, 2.0):
            reports.append(harness._report(
                f"levy:hitting-laplace:lam={lam:g}",
                "hitting time of 0, spectrally positive 3/2-stable walk",
                lc.hitting_laplace(lam), float(np.mean(np.exp(-lam * t0s))),
                f"N={args.n},dt={args.dt:g}", 0.02, f"seed={args.seed}"))
        reports.append(lc.csbp_integral_consistency(
            cfg, rng.substream(1), n_paths=min(args.n, 200)))
    bad = 0
    for r in reports:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.test_id}: "
              f"estimate={r.estimate:.6g} theory={r.theory:.6g} "
              f"tol={r.tolerance:.3g}")
        bad += not r.passed
    return 1 if bad else 0


def _cmd_run(args) -> int:
    overrides = {"group": args.group, "seed": args.seed, "out_dir": args.out}
    cfg = harness.RunConfig.from_sources(args.config, overrides)
    return harness.run_suite(cfg)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="snakelaws",
        description="verification toolkit for tree-indexed Brownian "
                    "local-time laws")
    sub = parser.add_subparsers(dest="command", required=True)

    p_laws = sub.add_parser("laws", help="evaluate a closed-form law")
    p_laws.add_argument("action", choices=["eval"])
    p_laws.add_argument("name")
    p_laws.add_argument("params", nargs="*", metavar="key=value")
    p_laws.set_defaults(func=_cmd_laws)

    p_series = sub.add_parser("series", help="exact coefficient machinery")
    p_series.add_argument("action", choices=["check", "dump"])
    p_series.add_argument("--order", type=int, default=40)
    p_series.set_defaults(func=_cmd_series)

    p_mc = sub.add_parser("mc", help="Monte Carlo gates")
    p_mc.add_argument("law", choices=["stable", "u-kernel", "lt-sigma",
                                      "lt-sigma-plus", "snake", "csbp"])
    p_mc.add_argument("--n", type=int, default=100_000)
    p_mc.add_argument("--seed", type=int, default=42)
    p_mc.add_argument("--edges", type=int, default=5000)
    p_mc.add_argument("--dt", type=float, default=1e-3)
    p_mc.add_argument("--t-max", type=float, default=100.0)
    p_mc.set_defaults(func=_cmd_mc)

    p_run = sub.add_parser("run", help="run a grouped suite with reports")
    p_run.add_argument("--group", default="exact",
                       choices=list(harness.GROUPS) + ["all"])
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--config", default=None)
    p_run.set_defaults(func=_cmd_run)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
