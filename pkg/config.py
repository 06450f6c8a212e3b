from __future__ import annotations

import os

from dotenv import load_dotenv

load_dotenv()

LOG_LEVEL = os.getenv("LOG_LEVEL", os.getenv("STEFAN_LOG_LEVEL", "INFO")).upper()

# ── Monte Carlo worker pool ──────────────────────────────────────
DEFAULT_WORKERS = max(1, int(os.getenv("STEFAN_WORKERS", "1")))

# ── Output location for CSV / manifest files ─────────────────────
OUT_DIR = os.getenv("STEFAN_OUT_DIR", "artifacts")
