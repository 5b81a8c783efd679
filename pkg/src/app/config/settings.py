"""
Configuration Settings for hierpin

This module contains the numerical constants, stopping rules and defaults used
throughout the recursions, the Monte Carlo layer and the certificate search.
It provides a centralized location for managing them.
"""

import os
from pathlib import Path
from typing import ClassVar, List


class RecursionSettings:
    """Annealed / variance recursion stopping rules."""

    # Divergence: stop once log r_n exceeds this
    DIVERGENCE_LOG_THRESHOLD: float = 700.0
    # Fixed point detection on r_n (linear scale)
    FIXED_POINT_TOLERANCE: float = 1e-15
    DEFAULT_LEVEL_CAP: int = 10_000

    # Annealed free energy extrapolation
    FREE_ENERGY_REL_TOL: float = 1e-10
    FREE_ENERGY_LEVEL_CAP: int = 10_000

    # n1 search
    N1_CAP: int = 1_000_000

    # log of (v+1)^s exp((s-1) gamma) above which v is reported as blown up
    VARIANCE_SATURATION_LOG: float = 700.0

    # |b - sqrt(s)| <= MARGINAL_TOLERANCE * sqrt(s) labels the marginal regime
    MARGINAL_TOLERANCE: float = 1e-12


class DisorderSettings:
    """Disorder law validation."""

    FINITE_DIFFERENCE_STEP: float = 1e-4
    BUILTIN_NORMALIZATION_TOL: float = 1e-6
    TABLE_NORMALIZATION_TOL: float = 1e-3
    TABLE_CONVEXITY_TOL: float = 1e-12
    TABLE_SYMMETRY_TOL: float = 1e-12


class FractionalSettings:
    """Fractional moment scalars."""

    X_THETA_GRID_SIZE: int = 10_000
    X_THETA_TOLERANCE: float = 1e-12


class MonteCarloSettings:
    """Pool dynamics and oracle settings."""

    DEFAULT_POOL_SIZE: int = 100_000
    DEFAULT_REPLICAS: int = 16
    DEFAULT_LEVEL: int = 20
    # Output samples per substream; part of the reproducibility identity
    DEFAULT_CHUNK_SIZE: int = 16_384

    EXACT_TREE_LEAF_GUARD: int = 10_000_000
    # Leaves materialized at once when batching exact-tree draws
    EXACT_TREE_BATCH_LEAVES: int = 4_000_000
    ENUMERATION_MAX_LEVEL: int = 2


class CertificateSettings:
    """Certificate soundness margins and caps."""

    DELOC_SAFETY_MARGIN: float = 1e-9  # relative, applied to u_bound
    LOC_SAFETY_MARGIN: float = 1e-9  # absolute, applied to the energy comparison
    PLAIN_LEVEL_CAP: int = 10_000
    LOC_LEVEL_CAP: int = 10_000
    CHEBYSHEV_SPLIT: float = 0.5
    STRICT_DIGITS: int = 32


class SearchSettings:
    """Parameter search for the delocalization bound and the bracket."""

    THETA_GRID: ClassVar[List[float]] = [
        0.6,
        0.65,
        0.7,
        0.75,
        0.8,
        0.85,
        0.87,
        0.9,
        0.93,
        0.95,
        0.97,
    ]
    ETA_GRID: ClassVar[List[float]] = [
        0.05,
        0.08,
        0.12,
        0.18,
        0.25,
        0.35,
        0.5,
        0.7,
        1.0,
    ]
    # Marginal ranks are multiples of the reference rank 1/(eta beta)^2
    N_MULTIPLIERS: ClassVar[List[float]] = [1.0]
    # Homogeneous ranks are free
    HOMOGENEOUS_RANKS: ClassVar[List[int]] = list(range(1, 17))
    N_CAP: int = 2_000

    LOG_H_FLOOR: float = -690.0  # ~1e-300
    BISECTION_REL_TOL: float = 1e-3
    BISECTION_MAX_STEPS: int = 60
    MAX_EVALUATIONS: int = 4_000

    # Local refinement half-widths around the best grid point
    THETA_REFINE_HALF_WIDTH: float = 0.05
    THETA_MAX: float = 0.999
    LOG_ETA_REFINE_HALF_WIDTH: float = 0.4
    # Homogeneous only; marginal ranks follow eta
    N_REFINE_OFFSETS: ClassVar[List[int]] = [-2, -1, 1, 2]

    # Log-spaced h above h_ub where the loc verdict must stay certified
    MONOTONICITY_CHECKS: int = 8
    # c5 values scanned by the lemma22 task
    C5_GRID: ClassVar[List[float]] = [0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5]


class OutputSettings:
    """CSV / JSON / checkpoint formats."""

    FLOAT_DIGITS: int = 17
    CSV_DELIMITER: str = ","
    CHECKPOINT_MAGIC: bytes = b"HPPOOL"
    CHECKPOINT_VERSION: int = 1
    DEFAULT_OUT: str = "hierpin_run.csv"


class LoggingSettings:
    """Logging configuration."""

    DEFAULT_LOG_LEVEL: str = os.getenv("HIERPIN_LOG_LEVEL", "INFO")
    FILE_LOG_LEVEL: str = "DEBUG"

    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    DATE_FORMAT: str = "%Y-%m-%d %H:%M:%S"

    LOG_DIR: str = "logs"
    LOG_FILE_NAME: str = "hierpin.log"
    MAX_LOG_SIZE_MB: int = 10
    BACKUP_COUNT: int = 5


class DevelopmentSettings:
    """Development and debugging settings."""

    DEBUG: bool = os.getenv("HIERPIN_DEBUG", "false").lower() == "true"
    # 0 means: ask psutil
    THREADS: int = int(os.getenv("HIERPIN_THREADS", "0"))


class Settings:
    """Main settings class that aggregates all configuration."""

    def __init__(self) -> None:
        self.recursion = RecursionSettings()
        self.disorder = DisorderSettings()
        self.fractional = FractionalSettings()
        self.monte_carlo = MonteCarloSettings()
        self.certificates = CertificateSettings()
        self.search = SearchSettings()
        self.output = OutputSettings()
        self.logging = LoggingSettings()
        self.development = DevelopmentSettings()

    @property
    def project_root(self) -> Path:
        """Get the project root directory."""
        return Path(__file__).parent.parent.parent.parent

    @property
    def logs_dir(self) -> Path:
        """Get the logs directory."""
        return self.project_root / self.logging.LOG_DIR


# Global settings instance
settings = Settings()
