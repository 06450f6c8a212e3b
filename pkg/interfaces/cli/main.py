"""Command-line entry point.

Usage::

    stefan-logistic stability --config configs/deterministic.cfg
    stefan-logistic ensemble --config configs/constant.cfg --method ff --K 100 --workers 4
    stefan-logistic compare --config configs/variable.cfg --T 1

Every command writes its CSV tables, the effective ``config.cfg`` and a
``manifest.json`` under ``--out``.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from config import DEFAULT_WORKERS, LOG_LEVEL, OUT_DIR
from core.analysis.convergence import k_ladder, m_ladder, n_ladder
from core.analysis.metrics import ErrorReport, absdev_front_moments, relerr_ff_ft
from core.defaults import K_LADDER, M_LADDER, N_LADDER
from core.dichotomy.outcome import classify_outcome
from core.dichotomy.threshold import rstar, spreading_guarantee
from core.ensemble.accumulator import EnsembleStats, MomentAccumulator
from core.ensemble.runner import (
    EnsembleConfig,
    common_step_size,
    run_ensemble,
    run_realizations,
    solve_realization,
)
from core.errors import ConfigurationError, StefanModelError
from core.model.constants import derive_constants
from core.model.sampling import realization_rng, sample_parameters
from core.model.schema import ModelSpec
from core.solvers.front_fixing import ff_stability_limit
from core.solvers.front_tracking import ft_stability_limit
from core.solvers.grid import auto_step_count
from core.solvers.result import RealizationResult
from interfaces.cli.config_file import RunParameters, parse_config, render_config
from interfaces.cli.outputs import OutputWriter, RunManifest

logger = logging.getLogger(__name__)

CONFIG_NAME = "config.cfg"

EXIT_OK = 0
EXIT_INTERRUPTED = 1
EXIT_FAILED = 2


@dataclass
class RunContext:
    """State shared by one command invocation."""

    args: argparse.Namespace
    spec: ModelSpec
    params: RunParameters
    writer: OutputWriter
    case: str
    M_values: list[int] = field(default_factory=list)
    stage: str = "config"
    outcomes: dict[str, int] = field(default_factory=dict)
    details: dict[str, object] = field(default_factory=dict)

    @contextmanager
    def output(self) -> Iterator[OutputWriter]:
        """Mark the enclosed block as the output stage."""
        previous, self.stage = self.stage, "output"
        yield self.writer
        self.stage = previous

    def ensemble_config(self, method: str, **overrides: object) -> EnsembleConfig:
        p = self.params
        cfg = EnsembleConfig(
            spec=self.spec,
            method=method,
            K=p.K,
            seed=p.seed,
            M=p.M,
            N=p.N,
            T=p.T,
            eps=p.eps,
            tail_window=p.tail_window,
            tol=p.tol,
        )
        return replace(cfg, **overrides) if overrides else cfg


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _summary(result: RealizationResult) -> dict[str, object]:
    return {
        "D": result.sample.D,
        "eta": result.sample.eta,
        "N": result.levels,
        "h": result.h,
        "k": result.k,
        "H_T": result.front,
        "node_count": result.node_count,
        **result.diagnostics(),
    }


def _solve(ctx: RunContext, method: str) -> None:
    p = ctx.params
    for M in ctx.M_values or [p.M]:
        cfg = ctx.ensemble_config(method, K=1, M=M)
        result = solve_realization(cfg, 0)
        outcome = classify_outcome(result, p.tail_window, p.tol).value
        ctx.outcomes[outcome] = ctx.outcomes.get(outcome, 0) + 1
        tag = f"{method.lower()}_M{M}"
        with ctx.output() as out:
            out.write_profile(f"{tag}_profile.csv", result)
            out.write_trajectory(f"{tag}_trajectory.csv", result)
        ctx.details[tag] = {**_summary(result), "outcome": outcome}
        logger.info(
            "%s M=%d: H(T)=%.10g, %d nodes, %s", method, M, result.front, result.node_count, outcome
        )


def _solve_ff(ctx: RunContext) -> None:
    _solve(ctx, "FF")


def _solve_ft(ctx: RunContext) -> None:
    _solve(ctx, "FT")


def _ensemble(ctx: RunContext) -> None:
    method = ctx.args.method.upper()
    stats = run_ensemble(ctx.ensemble_config(method, classify_outcomes=True), ctx.args.workers)
    ctx.outcomes = dict(stats.outcomes)
    with ctx.output() as out:
        out.write_ensemble(f"{method.lower()}_ensemble", stats)
    ctx.details.update(
        {
            "method": method,
            "K_effective": stats.K_effective,
            "N": stats.times.size - 1,
            "h": stats.h,
            "k": stats.k,
            "I_max": stats.I_max,
            "mean_H_T": float(stats.mean_H[-1]),
            "std_H_T": float(stats.std_H[-1]),
        }
    )
    print(f"{method} ensemble K={stats.K_effective}: outcomes {ctx.outcomes}")


def _stats(results: Sequence[RealizationResult]) -> EnsembleStats:
    acc = MomentAccumulator()
    for result in results:
        acc.add(result)
    return acc.finalize()


def _compare(ctx: RunContext) -> None:
    p = ctx.params
    N = p.N if p.N is not None else common_step_size(ctx.spec, p.M, p.T, p.eps)
    ff_runs = run_realizations(ctx.ensemble_config("FF", N=N), ctx.args.workers)
    ft_runs = run_realizations(ctx.ensemble_config("FT", N=N), ctx.args.workers)
    rel = relerr_ff_ft(ff_runs, ft_runs, p.T)
    ff_stats, ft_stats = _stats(ff_runs), _stats(ft_runs)
    dev_mean, dev_std = absdev_front_moments(ff_stats, ft_stats)
    reports = [
        ErrorReport("RelErr", rel, T=p.T, case=ctx.case),
        ErrorReport("AbsDev:mean[H]", float(dev_mean.max()), T=p.T, case=ctx.case),
        ErrorReport("AbsDev:std[H]", float(dev_std.max()), T=p.T, case=ctx.case),
    ]
    with ctx.output() as out:
        out.write_reports("compare_errors.csv", reports)
        out.write_moments("compare_front_absdev.csv", "time", ff_stats.times, dev_mean, dev_std)
    ctx.details.update({"N": N, "k": ff_stats.k, "K": p.K, **{r.metric: r.value for r in reports}})
    for report in reports:
        print(f"{report.metric} (K={p.K}, T={p.T:g}) = {report.value:.4e}")


def _rstar(ctx: RunContext) -> None:
    spec = ctx.spec
    guarantee = spreading_guarantee(spec)
    results = [("d1", rstar(spec.d1, spec.alpha)), ("d2", rstar(spec.d2, spec.alpha))]
    with ctx.output() as out:
        out.write_csv(
            "rstar.csv",
            ("bound", "D", "r_star", "method", "residual"),
            [(label, r.D_used, r.r_star, r.method, r.residual) for label, r in results],
        )
    ctx.details.update(
        {
            "H0": spec.H0,
            "guaranteed": guarantee.guaranteed,
            "r_star_max": guarantee.r_star_max,
            "r_star_min": results[0][1].r_star,
            "method": guarantee.method,
        }
    )
    print(f"guaranteed: {str(guarantee.guaranteed).lower()}, R*_max = {guarantee.r_star_max:.4f}")


def _parse_ladder(text: str | None, default: Sequence[int]) -> list[int]:
    if text is None:
        return list(default)
    return _parse_int_list(text, "--values")


def _convergence(ctx: RunContext) -> None:
    p, args = ctx.params, ctx.args
    common = {"T": p.T, "seed": p.seed, "workers": args.workers, "case": ctx.case}
    if args.ladder == "K":
        values = _parse_ladder(args.values, K_LADDER)
        reports = k_ladder(ctx.spec, values, M=p.M, N=p.N, method=args.method.upper(), **common)
    elif args.ladder == "M":
        values = _parse_ladder(args.values, M_LADDER)
        reports = m_ladder(ctx.spec, values, K=p.K, N=p.N, **common)
    else:
        values = _parse_ladder(args.values, N_LADDER)
        reports = n_ladder(ctx.spec, values, K=p.K, M=p.M, **common)
    with ctx.output() as out:
        out.write_reports(f"convergence_{args.ladder}.csv", reports)
    ctx.details.update({"ladder": args.ladder, "values": values})


def _stability(ctx: RunContext) -> None:
    spec, p = ctx.spec, ctx.params
    consts = derive_constants(spec)
    h_ft = spec.H0 / p.M
    limits = [
        ("FF", 1.0 / p.M, ff_stability_limit(spec, consts, 1.0 / p.M)),
        ("FT", h_ft, ft_stability_limit(spec, consts, h_ft, p.M - 1, p.eps)),
    ]
    rows = [(method, p.M, h, k, auto_step_count(p.T, k)) for method, h, k in limits]
    with ctx.output() as out:
        out.write_csv("stability.csv", ("method", "M", "h", "k_limit", "N_auto"), rows)
    ctx.details.update({"constants": consts.to_dict(), **{f"{m}_k_limit": k for m, _, k in limits}})
    print(f"FF k-limit (M={p.M}, d2={spec.d2:g}): {limits[0][2]:.4e}")
    print(f"FT k-limit (M={p.M}, d2={spec.d2:g}, eps={p.eps:g}): {limits[1][2]:.4e}")


def _histogram(ctx: RunContext) -> None:
    spec, p = ctx.spec, ctx.params
    samples = [sample_parameters(spec, realization_rng(p.seed, index)) for index in range(p.K)]
    D = np.array([s.D for s in samples])
    eta = np.array([s.eta for s in samples])
    thresholds: dict[float, float] = {}
    for d in D.tolist():
        if d not in thresholds:
            thresholds[d] = rstar(d, spec.alpha).r_star
    r_star = np.array([thresholds[d] for d in D.tolist()])
    spreads = spec.H0 >= r_star
    fraction = float(spreads.mean())

    with ctx.output() as out:
        out.write_csv(
            "samples.csv",
            ("index", "D", "eta", "r_star", "H0_ge_rstar"),
            [(i, D[i], eta[i], r_star[i], int(spreads[i])) for i in range(p.K)],
        )
        out.write_histogram("histogram_D.csv", D, p.bins, (spec.d1, spec.d2))
        out.write_histogram(
            "histogram_eta.csv", eta, p.bins, (spec.eta_dist.support_lo, spec.eta_dist.support_hi)
        )
        out.write_histogram("histogram_rstar.csv", r_star, p.bins)
    ctx.details.update({"K": p.K, "bins": p.bins, "H0": spec.H0, "fraction_H0_ge_rstar": fraction})
    print(f"H0 >= R* for {fraction:.1%} of {p.K} samples (H0={spec.H0:g})")


HANDLERS: dict[str, Callable[[RunContext], None]] = {
    "solve-ff": _solve_ff,
    "solve-ft": _solve_ft,
    "ensemble": _ensemble,
    "compare": _compare,
    "rstar": _rstar,
    "convergence": _convergence,
    "stability": _stability,
    "histogram": _histogram,
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise ConfigurationError(f"{flag} expects comma-separated integers, got {text!r}") from None
    if not values:
        raise ConfigurationError(f"{flag} is empty")
    return values


def _parse_steps(text: str | None) -> int | str | None:
    if text is None or text == "auto":
        return text
    try:
        return int(text)
    except ValueError:
        raise ConfigurationError(f"--N expects an integer or auto, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="Problem config file (key=value)")
    common.add_argument("--seed", type=int, help="Master seed (overrides mc.seed)")
    common.add_argument(
        "--workers",
        type=int,
        default=DEFAULT_WORKERS,
        help=f"Worker processes for ensembles (default: {DEFAULT_WORKERS}, env STEFAN_WORKERS)",
    )
    common.add_argument("--out", default=OUT_DIR, help=f"Output directory (default: {OUT_DIR})")
    common.add_argument("--method", choices=("ff", "ft"), default="ff", help="Scheme for ensemble/convergence")
    common.add_argument("--K", type=int, help="Number of realizations (overrides mc.K)")
    common.add_argument("--M", help="Spatial intervals; solve-* accept a comma-separated list")
    common.add_argument("--N", help="Time steps or 'auto' (overrides grid.N)")
    common.add_argument("--T", type=float, help="Final time (overrides grid.T)")
    common.add_argument("--eps", type=float, help="FT rebase threshold in (0,1) (overrides ft.eps)")

    parser = argparse.ArgumentParser(
        prog="stefan-logistic",
        description="Random free-boundary diffusive logistic model: FF/FT solvers and Monte Carlo moments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve-ff", parents=[common], help="One front-fixing realization")
    sub.add_parser("solve-ft", parents=[common], help="One front-tracking realization")
    sub.add_parser("ensemble", parents=[common], help="Monte Carlo mean and std")
    sub.add_parser("compare", parents=[common], help="FF vs FT on matched samples")
    sub.add_parser("rstar", parents=[common], help="Spreading threshold R* and guarantee")
    convergence = sub.add_parser("convergence", parents=[common], help="Pairwise errors over a ladder")
    convergence.add_argument("--ladder", choices=("K", "M", "N"), default="K")
    convergence.add_argument("--values", help="Comma-separated ladder (default: built-in ladder)")
    sub.add_parser("stability", parents=[common], help="Step-size limits of both schemes")
    sub.add_parser("histogram", parents=[common], help="Histograms of D, eta and R*")
    return parser


def _load(args: argparse.Namespace) -> tuple[ModelSpec, RunParameters, list[int]]:
    spec, params = parse_config(args.config)
    M_values: list[int] = []
    if args.M is not None:
        M_values = _parse_int_list(args.M, "--M")
        if len(M_values) > 1 and not args.command.startswith("solve-"):
            raise ConfigurationError(f"--M takes a single value for {args.command}, got {args.M!r}")
    steps = _parse_steps(args.N)
    params = params.with_overrides(
        seed=args.seed,
        K=args.K,
        M=M_values[0] if M_values else None,
        N=steps if isinstance(steps, int) else None,
        T=args.T,
        eps=args.eps,
    )
    if steps == "auto":
        params = replace(params, N=None)
    if args.workers < 1:
        raise ConfigurationError(f"--workers must be >= 1, got {args.workers}")
    return spec, params, M_values


def _rerun_args(args: argparse.Namespace, config_path: Path) -> list[str]:
    argv = ["stefan-logistic", args.command, "--config", str(config_path)]
    if args.command in {"ensemble", "convergence"}:
        argv += ["--method", args.method]
    if args.command.startswith("solve-") and args.M is not None:
        argv += ["--M", args.M]
    if args.command == "convergence":
        argv += ["--ladder", args.ladder]
        if args.values is not None:
            argv += ["--values", args.values]
    return argv


def run(argv: Sequence[str] | None = None) -> int:
    """Parse *argv*, run one command and return the exit status."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=LOG_LEVEL,
        format="%(asctime)s [%(levelname)s] %(message)s",
        datefmt="%H:%M:%S",
    )

    stage = "config"
    ctx: RunContext | None = None
    started = time.perf_counter()
    try:
        spec, params, M_values = _load(args)
        stage = "output"
        writer = OutputWriter(args.out)
        config_text = render_config(spec, params)
        config_path = writer.write_text(CONFIG_NAME, config_text)
        ctx = RunContext(
            args=args,
            spec=spec,
            params=params,
            writer=writer,
            case=Path(args.config).stem,
            M_values=M_values,
            stage=args.command,
        )
        logger.info("Running %s on %s (seed=%d)", args.command, args.config, params.seed)
        HANDLERS[args.command](ctx)

        ctx.stage = "output"
        manifest = RunManifest(
            command=args.command,
            config=config_text,
            seed=params.seed,
            rerun=_rerun_args(args, config_path),
            duration_s=time.perf_counter() - started,
            outcomes=ctx.outcomes,
            details=ctx.details,
        )
        writer.write_manifest(manifest)
    except KeyboardInterrupt:
        logger.info("Interrupted.")
        return EXIT_INTERRUPTED
    except (StefanModelError, OSError) as exc:
        failed = ctx.stage if ctx is not None else stage
        logger.error("Stage %s failed: %s", failed, exc)
        return EXIT_FAILED
    logger.info("%s finished in %.2fs", args.command, time.perf_counter() - started)
    return EXIT_OK


def main() -> None:
    """Console-script entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
