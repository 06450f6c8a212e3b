#!/usr/bin/env python
"""Batch run of the FF/FT comparison and convergence tables.

Runs, for the shipped constant and variable configs:

    compare:
        - RelErr and AbsDev of FT against FF on matched samples
          for K in {25, 50, 100}

    convergence (variable case):
        - K ladder (reduced {25..400} by default, full with --full)
        - M ladder {25, 50, 100, 200}
        - N ladder {2500, 5000, 10000, 20000}

Each table is written as CSV under ``--out`` together with a
``summary.json``.

Usage::

    python scripts/reproduce_tables.py [--out DIR] [--workers N] [--full]
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from core.analysis.convergence import k_ladder, m_ladder, n_ladder
from core.analysis.metrics import ErrorReport, absdev_front_moments, relerr_ff_ft
from core.defaults import K_LADDER
from core.ensemble.accumulator import MomentAccumulator
from core.ensemble.runner import EnsembleConfig, common_step_size, run_realizations
from core.errors import StefanModelError
from interfaces.cli.config_file import parse_config
from interfaces.cli.outputs import OutputWriter

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(message)s",
    datefmt="%H:%M:%S",
)
logger = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"

# (config name, final time) per comparison table
_COMPARE_CASES: list[tuple[str, float]] = [("constant", 10.0), ("variable", 1.0)]
_COMPARE_K = (25, 50, 100)

_REDUCED_K_LADDER = (25, 50, 100, 200, 400)
_M_LADDER = (25, 50, 100, 200)
_N_LADDER = (2500, 5000, 10_000, 20_000)


def _compare_case(name: str, T: float, workers: int) -> list[ErrorReport]:
    spec, params = parse_config(CONFIG_DIR / f"{name}.cfg")
    N = common_step_size(spec, params.M, T, params.eps)
    reports: list[ErrorReport] = []
    for K in _COMPARE_K:
        common = dict(spec=spec, K=K, seed=params.seed, M=params.M, N=N, T=T, eps=params.eps)
        ff_runs = run_realizations(EnsembleConfig(method="FF", **common), workers)
        ft_runs = run_realizations(EnsembleConfig(method="FT", **common), workers)
        stats = []
        for runs in (ff_runs, ft_runs):
            acc = MomentAccumulator()
            for result in runs:
                acc.add(result)
            stats.append(acc.finalize())
        dev_mean, dev_std = absdev_front_moments(*stats)
        reports += [
            ErrorReport("RelErr", relerr_ff_ft(ff_runs, ft_runs, T), pair=(K, K), T=T, case=name),
            ErrorReport("AbsDev:mean[H]", float(dev_mean.max()), pair=(K, K), T=T, case=name),
            ErrorReport("AbsDev:std[H]", float(dev_std.max()), pair=(K, K), T=T, case=name),
        ]
        logger.info("%s K=%d: RelErr=%.4e", name, K, reports[-3].value)
    return reports


def run_tables(out_dir: str, workers: int, full: bool) -> dict[str, object]:
    writer = OutputWriter(out_dir)
    started = time.perf_counter()

    compare: list[ErrorReport] = []
    for name, T in _COMPARE_CASES:
        compare += _compare_case(name, T, workers)
    writer.write_reports("compare_errors.csv", compare)

    spec, params = parse_config(CONFIG_DIR / "variable.cfg")
    ladders = {
        "K": k_ladder(
            spec,
            K_LADDER if full else _REDUCED_K_LADDER,
            M=params.M,
            N=None,
            T=1.0,
            seed=params.seed,
            workers=workers,
            case="variable",
        ),
        "M": m_ladder(spec, _M_LADDER, K=100, T=1.0, seed=params.seed, workers=workers, case="variable"),
        "N": n_ladder(spec, _N_LADDER, K=100, M=params.M, T=1.0, seed=params.seed, workers=workers, case="variable"),
    }
    for label, reports in ladders.items():
        writer.write_reports(f"convergence_{label}.csv", reports)

    summary = {
        "duration_s": time.perf_counter() - started,
        "workers": workers,
        "full": full,
        "compare": [report.to_row() for report in compare],
        "ladders": {label: [r.to_row() for r in reports] for label, reports in ladders.items()},
        "files": list(writer.files),
    }
    writer.write_text("summary.json", json.dumps(summary, ensure_ascii=False, indent=2))
    return summary


def main() -> None:
    """Entry point for the table reproduction script."""
    parser = argparse.ArgumentParser(description="FF/FT comparison and convergence tables")
    parser.add_argument("--out", default="artifacts/tables", help="Output directory (default: artifacts/tables)")
    parser.add_argument("--workers", type=int, default=4, help="Worker processes (default: 4)")
    parser.add_argument("--full", action="store_true", help="Run the full K ladder up to 3200")
    args = parser.parse_args()

    try:
        summary = run_tables(args.out, args.workers, args.full)
    except KeyboardInterrupt:
        logger.info("Run interrupted.")
        sys.exit(1)
    except StefanModelError as exc:
        logger.error("Run failed: %s", exc, exc_info=True)
        sys.exit(2)
    logger.info("Tables written to %s in %.1fs", args.out, summary["duration_s"])


if __name__ == "__main__":
    main()
