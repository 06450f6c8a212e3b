"""CSV tables and the JSON run manifest written by every CLI command."""

from __future__ import annotations

import csv
import json
import logging
import platform
import tomllib
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike

from core.analysis.metrics import ErrorReport, mean_radius_map
from core.analysis.spline import profile_knots
from core.defaults import CSV_FLOAT_FORMAT
from core.ensemble.accumulator import EnsembleStats
from core.solvers.result import RealizationResult

logger = logging.getLogger(__name__)

__all__ = [
    "DISTRIBUTION_NAME",
    "OutputWriter",
    "RunManifest",
    "format_cell",
    "package_version",
]

DISTRIBUTION_NAME = "stefan-logistic"
_PYPROJECT = Path(__file__).resolve().parents[2] / "pyproject.toml"


def package_version() -> str:
    """Installed distribution version, else the version in ``pyproject.toml``."""
    try:
        return version(DISTRIBUTION_NAME)
    except PackageNotFoundError:
        pass
    try:
        with _PYPROJECT.open("rb") as fh:
            return str(tomllib.load(fh)["project"]["version"])
    except (OSError, KeyError, tomllib.TOMLDecodeError):
        return "unknown"


def format_cell(value: object) -> str:
    """Floats with 17 significant digits; everything else via ``str``."""
    if isinstance(value, float | np.floating):
        return CSV_FLOAT_FORMAT.format(float(value))
    return str(value)


@dataclass
class RunManifest:
    """Everything needed to re-run a CLI job and locate its outputs."""

    command: str
    config: str
    seed: int
    rerun: list[str]
    version: str = field(default_factory=package_version)
    python: str = field(default_factory=platform.python_version)
    duration_s: float = 0.0
    files: list[str] = field(default_factory=list)
    outcomes: dict[str, int] = field(default_factory=dict)
    details: dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict[str, object]:
        return asdict(self)


class OutputWriter:
    """Writes tables under one output directory and records every file."""

    def __init__(self, out_dir: str | Path) -> None:
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []

    def _record(self, path: Path) -> Path:
        name = path.relative_to(self.out_dir).as_posix()
        if name not in self.files:
            self.files.append(name)
        logger.info("Wrote %s", path)
        return path

    def write_text(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        path.write_text(text, encoding="utf-8")
        return self._record(path)

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
        path = self.out_dir / name
        with path.open("w", encoding="utf-8", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(header)
            for row in rows:
                out.writerow([format_cell(cell) for cell in row])
        return self._record(path)

    # -- realizations ------------------------------------------------------

    def write_profile(self, name: str, result: RealizationResult) -> Path:
        """Final profile ``(index, radius, value)`` ending at the front point."""
        radii, values = profile_knots(result)
        rows = ((j, float(r), float(v)) for j, (r, v) in enumerate(zip(radii, values, strict=True)))
        return self.write_csv(name, ("index", "radius", "value"), rows)

    def write_trajectory(self, name: str, result: RealizationResult) -> Path:
        rows = (
            (n, float(t), float(H), float(p))
            for n, (t, H, p) in enumerate(zip(result.times, result.H, result.peak, strict=True))
        )
        return self.write_csv(name, ("index", "time", "H", "peak"), rows)

    # -- ensembles ---------------------------------------------------------

    def write_moments(
        self, name: str, axis: str, coords: ArrayLike, mean: ArrayLike, std: ArrayLike
    ) -> Path:
        rows = (
            (j, float(x), float(m), float(s))
            for j, (x, m, s) in enumerate(zip(np.asarray(coords), np.asarray(mean), np.asarray(std), strict=True))
        )
        return self.write_csv(name, ("index", axis, "mean", "std"), rows)

    def write_ensemble(self, prefix: str, stats: EnsembleStats) -> list[Path]:
        """Field moments, front moments and (FF) the mean-radius profile."""
        axis = "z" if stats.method == "FF" else "radius"
        paths = [
            self.write_moments(f"{prefix}_field.csv", axis, stats.grid, stats.mean_u, stats.std_u),
            self.write_moments(f"{prefix}_front.csv", "time", stats.times, stats.mean_H, stats.std_H),
        ]
        if stats.method == "FF":
            mapped = mean_radius_map(stats)
            paths.append(
                self.write_moments(
                    f"{prefix}_mean_radius.csv", "radius", mapped.final_radii, mapped.mean, mapped.std
                )
            )
        return paths

    # -- reports -----------------------------------------------------------

    def write_reports(self, name: str, reports: Sequence[ErrorReport]) -> Path:
        header = ("metric", "pair", "T", "case", "value")
        rows = ([report.to_row()[key] for key in header] for report in reports)
        return self.write_csv(name, header, rows)

    def write_histogram(
        self, name: str, samples: ArrayLike, bins: int, support: tuple[float, float] | None = None
    ) -> Path:
        """Uniform-bin counts ``(bin, lo, hi, count)`` over *support* (default: sample range)."""
        data = np.asarray(samples, dtype=float)
        counts, edges = np.histogram(data, bins=bins, range=support)
        rows = (
            (b, float(edges[b]), float(edges[b + 1]), int(counts[b])) for b in range(counts.size)
        )
        return self.write_csv(name, ("bin", "lo", "hi", "count"), rows)

    # -- manifest ----------------------------------------------------------

    def write_manifest(self, manifest: RunManifest) -> Path:
        """Write ``manifest.json`` listing every file written so far."""
        manifest.files = list(self.files)
        path = self.out_dir / "manifest.json"
        path.write_text(
            json.dumps(manifest.to_dict(), ensure_ascii=False, indent=2, default=_json_default),
            encoding="utf-8",
        )
        logger.info("Wrote %s", path)
        return path


def _json_default(value: object) -> object:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serialisable")
