"""
Certificate records.

Every intermediate of an inequality chain is stored so a verdict can be
replayed by hand.
"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from src.app.config.settings import settings
from src.app.models.params import ModelParams


class ShiftKind(str, Enum):
    MARGINAL = "marginal"
    HOMOGENEOUS = "homogeneous"
    CUSTOM = "custom"


class ShiftProfile(BaseModel):
    """Downward shifts delta_0..delta_{n-1}; delta_i acts on every site of V_i."""

    model_config = ConfigDict(frozen=True)

    s: int = Field(ge=2)
    n: int = Field(ge=1)
    deltas: List[float]
    kind: ShiftKind = ShiftKind.CUSTOM
    # eta for marginal profiles, delta for homogeneous ones
    parameter: Optional[float] = None


class SearchFamily(str, Enum):
    PLAIN = "plain"
    MARGINAL = "marginal"
    HOMOGENEOUS = "homogeneous"


class DelocVerdict(str, Enum):
    CERTIFIED_F_ZERO = "certified_f_zero"
    INCONCLUSIVE = "inconclusive"


class LocVerdict(str, Enum):
    CERTIFIED_F_POSITIVE = "certified_f_positive"
    INCONCLUSIVE = "inconclusive"


class DelocCertificate(BaseModel):
    params: ModelParams
    theta: float
    profile: Optional[ShiftProfile] = None
    log_a_theta: float
    a_theta_value: float
    x_theta_value: Optional[float] = None
    holder_cost: Optional[float] = None
    shifted_r_final: Optional[float] = None
    u_bound: float
    witness_n: int
    safety_margin: float
    verdict: DelocVerdict
    reason: Optional[str] = None
    strict_checked: bool = False

    @property
    def certified(self) -> bool:
        return self.verdict is DelocVerdict.CERTIFIED_F_ZERO

    @property
    def eta(self) -> Optional[float]:
        if self.profile is None:
            return None
        return self.profile.parameter


class LocCertificate(BaseModel):
    params: ModelParams
    witness_n: Optional[int] = None
    log_r_at_n: float
    v_at_n: float
    elog_lower_bound: Optional[float] = None
    threshold: float
    split: float
    variance_condition: bool
    energy_condition: bool
    levels_checked: int
    verdict: LocVerdict
    reason: Optional[str] = None
    strict_checked: bool = False

    @property
    def certified(self) -> bool:
        return self.verdict is LocVerdict.CERTIFIED_F_POSITIVE


class DelocSearchSpace(BaseModel):
    """Grids and budgets of the delocalization search."""

    thetas: List[float] = Field(
        default_factory=lambda: list(settings.search.THETA_GRID), min_length=1
    )
    etas: List[float] = Field(
        default_factory=lambda: list(settings.search.ETA_GRID), min_length=1
    )
    n_multipliers: List[float] = Field(
        default_factory=lambda: list(settings.search.N_MULTIPLIERS), min_length=1
    )
    ranks: List[int] = Field(
        default_factory=lambda: list(settings.search.HOMOGENEOUS_RANKS), min_length=1
    )
    families: List[SearchFamily] = Field(
        default_factory=lambda: [
            SearchFamily.MARGINAL,
            SearchFamily.HOMOGENEOUS,
            SearchFamily.PLAIN,
        ],
        min_length=1,
    )
    n_cap: int = Field(default=settings.search.N_CAP, ge=1)
    log_h_floor: float = settings.search.LOG_H_FLOOR
    rel_tol: float = Field(default=settings.search.BISECTION_REL_TOL, gt=0.0)
    max_bisection_steps: int = Field(default=settings.search.BISECTION_MAX_STEPS, ge=1)
    max_evaluations: int = Field(default=settings.search.MAX_EVALUATIONS, ge=1)
    refine: bool = True


class DelocSearchResult(BaseModel):
    certificate: Optional[DelocCertificate] = None
    h_lb: float = 0.0
    evaluations: int = 0
    budget_exhausted: bool = False
    reason: Optional[str] = None


class HcBracket(BaseModel):
    beta: float
    h_lb: Optional[float] = None
    h_ub: Optional[float] = None
    lb_certificate: Optional[DelocCertificate] = None
    ub_certificate: Optional[LocCertificate] = None
    lb_evaluations: int = 0
    ub_evaluations: int = 0
    monotonicity_violations: int = 0
    budget_exhausted: bool = False

    @property
    def lb_status(self) -> str:
        return "ok" if self.h_lb is not None else "unknown"

    @property
    def ub_status(self) -> str:
        return "ok" if self.h_ub is not None else "unknown"


class Lemma22Result(BaseModel):
    passed: bool
    c5: float
    beta: float
    h: float
    n1: Optional[int] = None
    v_at_n1: Optional[float] = None
    details: str = ""
