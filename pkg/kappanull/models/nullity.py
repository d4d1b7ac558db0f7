"""
Data models for kappa-nullity computations
"""
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class NullityResult(BaseModel):
    """
    Kernel of the stacked nullity operator at a fixed kappa

    `basis` columns are metric-orthonormal frame-coefficient vectors spanning
    N_kappa; `conullity` columns span D = N_kappa^perp.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kappa: float
    index: int
    basis: np.ndarray
    conullity: np.ndarray
    residual: float
    sigma_max: float

    def basis_vectors(self) -> List[List[float]]:
        """Basis as a list of vectors"""
        return self.basis.T.tolist()

    def to_report(self) -> dict:
        """Exchange form {"kappa", "index", "basis", "residual"}"""
        return {
            "kappa": self.kappa,
            "index": self.index,
            "basis": self.basis_vectors(),
            "residual": self.residual,
        }


class KappaSample(BaseModel):
    kappa: float
    sigma_min: float
    index: int


class KappaScanResult(BaseModel):
    """Scan of sigma_min(L_kappa) over a grid plus refined detections"""
    samples: List[KappaSample] = Field(default_factory=list)
    detected: List[float] = Field(default_factory=list)
    detected_index: List[int] = Field(default_factory=list)
    candidates: List[Tuple[float, float]] = Field(default_factory=list)
