"""
Run configuration and run records.
"""

from enum import Enum
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, model_validator

from src.app.config.settings import settings
from src.app.models.certificates import DelocSearchSpace
from src.app.models.params import DisorderModel

CellValue = Union[float, int, str, bool, None]


class SweepTask(str, Enum):
    ANNEALED = "annealed"
    VARIANCE = "variance"
    MC = "mc"
    CERTIFY_DELOC = "certify_deloc"
    CERTIFY_LOC = "certify_loc"
    BRACKET = "bracket"
    GREEN = "green"
    LEMMA22 = "lemma22"
    CHECKPOINT = "checkpoint"


class LatticeSpec(BaseModel):
    """ModelParams without (beta, h)."""

    s: int = Field(ge=2)
    b: float = Field(gt=1.0)


class McControls(BaseModel):
    pool_size: int = Field(default=settings.monte_carlo.DEFAULT_POOL_SIZE, ge=1)
    replicas: int = Field(default=settings.monte_carlo.DEFAULT_REPLICAS, ge=2)
    level: int = Field(default=settings.monte_carlo.DEFAULT_LEVEL, ge=1)
    chunk_size: int = Field(default=settings.monte_carlo.DEFAULT_CHUNK_SIZE, ge=1)
    # Also estimate E[R_n^theta] when set
    theta: Optional[float] = Field(default=None, gt=0.0, le=1.0)


class RecursionControls(BaseModel):
    n_max: int = Field(default=settings.recursion.DEFAULT_LEVEL_CAP, ge=1)
    div_threshold: float = Field(
        default=settings.recursion.DIVERGENCE_LOG_THRESHOLD, gt=0.0
    )
    green_levels: int = Field(default=20, ge=1)


class CertificateControls(BaseModel):
    # System rank used by the "s^-n" keyword
    n: Optional[int] = Field(default=None, ge=1)
    search: DelocSearchSpace = Field(default_factory=DelocSearchSpace)
    split: float = Field(default=settings.certificates.CHEBYSHEV_SPLIT, gt=0.0, lt=1.0)
    strict: bool = False
    c5: Optional[float] = Field(default=None, gt=0.0)
    c5_grid: List[float] = Field(
        default_factory=lambda: list(settings.search.C5_GRID), min_length=1
    )


class SweepSpec(BaseModel):
    model: LatticeSpec
    disorder: DisorderModel = Field(default_factory=DisorderModel)
    beta_grid: List[float] = Field(default_factory=lambda: [0.0], min_length=1)
    h_grid: List[float] = Field(default_factory=lambda: [0.0], min_length=1)
    task: SweepTask
    mc_controls: McControls = Field(default_factory=McControls)
    recursion_controls: RecursionControls = Field(default_factory=RecursionControls)
    certificate_controls: CertificateControls = Field(
        default_factory=CertificateControls
    )
    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _check(self) -> "SweepSpec":
        errors: List[str] = []
        if any(beta < 0 for beta in self.beta_grid):
            errors.append("beta_grid values must be >= 0")
        sampled = self.task in (SweepTask.MC, SweepTask.CHECKPOINT)
        if sampled and self.seed is None:
            errors.append(f"seed is mandatory for the {self.task.value} task")
        if sampled and not self.disorder.can_sample:
            errors.append("table_mgf disorder cannot be sampled by the mc task")
        if errors:
            raise ValueError("; ".join(errors))
        return self


class PointResult(BaseModel):
    index: int
    beta: Optional[float] = None
    h: Optional[float] = None
    values: Dict[str, CellValue]
    # Certificates or traces kept for audit in the JSON record
    payload: Optional[Dict[str, Any]] = None
    budget_exhausted: bool = False


class RunRecord(BaseModel):
    spec_hash: str
    task: SweepTask
    points: List[PointResult]
    wall_time: float
    version: str

    @property
    def budget_exhausted(self) -> bool:
        return any(p.budget_exhausted for p in self.points)
