"""
Data models for the catalogue of named metric Lie algebras
"""
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field


class MilnorTriple(BaseModel):
    """Coefficients of [e1,e2] = l3 e3, [e2,e3] = l1 e1, [e3,e1] = l2 e2"""
    model_config = ConfigDict(frozen=True)

    lambda1: float
    lambda2: float
    lambda3: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.lambda1, self.lambda2, self.lambda3)


class TableRowExpectation(BaseModel):
    """Values a table row predicts for one parameter choice"""
    family: str
    theta: float
    group: str
    scal: float
    plane_curvature: float
    nullity_kappa: float
    nullity_index: int
    nullity_direction: Optional[List[float]] = None


class TableRowReport(BaseModel):
    """Computed values against a table row"""
    expectation: TableRowExpectation
    triple: MilnorTriple
    group: str
    scal: float
    plane_curvature: float
    nullity_index: int
    nullity_basis: List[List[float]]
    detected_kappas: List[float] = Field(default_factory=list)
    splitting_trace: Optional[float] = None
    splitting_det: Optional[float] = None
    checks: dict[str, bool] = Field(default_factory=dict)
    flags: List[str] = Field(default_factory=list)
    passed: bool = False
