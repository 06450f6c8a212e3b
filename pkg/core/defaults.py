"""Centralised numeric defaults for the solver suite.

Tuneable thresholds and factors used across the model, solver, dichotomy,
ensemble and CLI layers are collected here so that a run can be tuned from
a single location.

Each module still uses local names and simply imports them from here.
"""

from __future__ import annotations

# ── Model (core/model) ───────────────────────────────────────────
WORKING_DOMAIN_FACTOR: float = 11.0      # r_max = H0 + 10·H0
DENSE_SCAN_POINTS: int = 10_001
MAX_REJECTION_DRAWS: int = 100_000

# ── Front-fixing (core/solvers/front_fixing.py) ──────────────────
FF_MIN_INTERVALS: int = 4
AUTO_K_SAFETY: float = 0.9

# ── Front-tracking (core/solvers/front_tracking.py) ──────────────
FT_EPS: float = 0.5
FT_INITIAL_CAPACITY_FACTOR: int = 4

# ── Dichotomy (core/dichotomy) ───────────────────────────────────
IVP_STEP_FACTOR: float = 1e-4            # Δr = factor · sqrt(D / κ1)
IVP_ROOT_XTOL: float = 1e-8
IVP_CAP_FACTOR: float = 1.25
OUTCOME_TOL: float = 1e-4
OUTCOME_TAIL_FRACTION: float = 0.10

# ── Ensemble (core/ensemble) ─────────────────────────────────────
ENSEMBLE_CHUNK_SIZE: int = 16

# ── CLI (interfaces/cli) ─────────────────────────────────────────
DEFAULT_M: int = 50
DEFAULT_T: float = 1.0
DEFAULT_K: int = 100
DEFAULT_SEED: int = 0
HISTOGRAM_BINS: int = 20
CSV_FLOAT_FORMAT: str = "{:.17g}"

# ── Convergence ladders (core/analysis/convergence.py) ───────────
K_LADDER: tuple[int, ...] = (25, 50, 100, 200, 400, 800, 1600, 3200)
M_LADDER: tuple[int, ...] = (25, 50, 100, 200, 400, 800)
N_LADDER: tuple[int, ...] = (2500, 5000, 10_000, 20_000, 40_000, 80_000)
