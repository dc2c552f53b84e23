"""
Configuration management for the treelike geodesic-distance audit toolkit
"""
import logging
import os
from pathlib import Path

logger = logging.getLogger(__name__)


class Config:
    """Run-time defaults. Every value can be overridden by a CLI flag; only the
    output directory also reads the environment."""

    # Output directory for ledgers and reports (env override)
    OUTPUT_DIR = os.getenv("TREEAUDIT_OUTPUT_DIR", "")

    # Memory guard for grow(): refuse models whose corrected |V| exceeds this
    MAX_VERTICES = 5_000_000

    # cmd_wiener prints the BFS oracle value only up to this order
    ORACLE_MAX_VERTICES = 200_000
    # audit sweeps use per-vertex BFS up to this order and the O(n) edge-cut oracle above it
    BFS_ORACLE_MAX_VERTICES = 64
    # exact first-passage sweeps (O(n^2) rationals) are offered up to this order
    EXACT_SOLVE_MAX_VERTICES = 2000
    # dense Gauss-Jordan cross-check is limited to tiny systems
    DENSE_SOLVE_MAX_VERTICES = 60

    # Audit grid
    AUDIT_MAX_VERTICES = 20_000
    AUDIT_PROGRESS_EVERY = 500

    # Parallelism (1 keeps logs reproducible)
    DEFAULT_THREADS = 1

    # Monte-Carlo walks: max_steps defaults to MC_MAX_STEPS_FACTOR * n^2
    MC_MAX_STEPS_FACTOR = 100
    MC_CHUNK_TRIALS = 1024
    MC_DEFAULT_TRIALS = 10_000

    # Logging
    LOG_FILE = ""
    LOG_MAX_BYTES = 2_000_000
    LOG_BACKUP_COUNT = 3

    @classmethod
    def output_dir(cls) -> Path:
        """Directory used for relative --output paths ('' means current directory)."""
        return Path(cls.OUTPUT_DIR) if cls.OUTPUT_DIR else Path.cwd()

    @classmethod
    def validate(cls) -> bool:
        """Validate that caps are positive and consistently ordered"""
        ok = True
        caps = {
            "MAX_VERTICES": cls.MAX_VERTICES,
            "ORACLE_MAX_VERTICES": cls.ORACLE_MAX_VERTICES,
            "BFS_ORACLE_MAX_VERTICES": cls.BFS_ORACLE_MAX_VERTICES,
            "EXACT_SOLVE_MAX_VERTICES": cls.EXACT_SOLVE_MAX_VERTICES,
            "AUDIT_MAX_VERTICES": cls.AUDIT_MAX_VERTICES,
            "MC_CHUNK_TRIALS": cls.MC_CHUNK_TRIALS,
        }
        for name, value in caps.items():
            if not isinstance(value, int) or value <= 0:
                logger.error(f"Config {name} must be a positive integer, got {value!r}")
                ok = False
        if ok and cls.AUDIT_MAX_VERTICES > cls.MAX_VERTICES:
            logger.error("AUDIT_MAX_VERTICES exceeds MAX_VERTICES")
            ok = False
        if cls.DEFAULT_THREADS < 1:
            logger.error("DEFAULT_THREADS must be at least 1")
            ok = False
        if cls.OUTPUT_DIR and not Path(cls.OUTPUT_DIR).is_dir():
            logger.warning(f"TREEAUDIT_OUTPUT_DIR={cls.OUTPUT_DIR} does not exist yet; it will be created on write")
        return ok
