"""
Data models for splitting-tensor evolution along nullity geodesics
"""
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


class SplittingState(BaseModel):
    """Curvature constant kappa and initial splitting tensor C0 on the conullity"""
    model_config = ConfigDict(frozen=True)

    kappa: float
    C0: Tuple[Tuple[float, ...], ...]

    @field_validator("C0", mode="before")
    @classmethod
    def _coerce(cls, value):
        return tuple(tuple(float(x) for x in row) for row in np.asarray(value, dtype=float))

    @field_validator("C0")
    @classmethod
    def _check(cls, value):
        k = len(value)
        if k < 1 or any(len(row) != k for row in value):
            raise ValueError("C0 must be a non-empty square matrix")
        if not np.all(np.isfinite(np.array(value))):
            raise ValueError("C0 must have finite entries")
        return value

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.array(self.C0, dtype=float)

    @property
    def k(self) -> int:
        return len(self.C0)


class TraceLimitReport(BaseModel):
    """
    Limits of tr C(t) as t -> +-inf for the kappa = -1 flow

    A limit is None when the flow meets a singularity of J0 in that
    direction; the singular time is then reported instead.
    """
    m: int
    sigma: List[float]
    k_plus: int
    k_minus: int
    limit_plus: Optional[float] = None
    limit_minus: Optional[float] = None
    singularity_plus: Optional[float] = None
    singularity_minus: Optional[float] = None
    p_coefficients: List[float] = Field(default_factory=list)
    q_coefficients: List[float] = Field(default_factory=list)
    identity_residual: float = 0.0
    flags: List[str] = Field(default_factory=list)


class SplittingTrace(BaseModel):
    """Samples of C(t), tr C(t), det J0(t) and optionally K_D(t)"""
    kappa: float
    k: int
    rows: List[List[float]] = Field(default_factory=list)
    with_kd: bool = False

    @property
    def header(self) -> List[str]:
        cols = ["t"] + [f"C_{i}{j}" for i in range(self.k) for j in range(self.k)] + ["trC", "detJ0"]
        if self.with_kd:
            cols.append("KD")
        return cols


class BlowupReport(BaseModel):
    """Blow-up bound for beta' >= delta^2 + beta^2 and the numeric escape time"""
    beta0: float
    delta: float
    bound: float
    numeric_blowup: float
    escape_threshold: float
    within_bound: bool
