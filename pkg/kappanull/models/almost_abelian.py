"""
Data models for almost-Abelian groups R x_A V and their lattice checks
"""
from functools import cached_property
from typing import Any, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from kappanull.models.nullity import NullityResult


class AlmostAbelianGroup(BaseModel):
    """
    Semidirect product R x_A V with [xi, X] = A X and xi a unit normal to V

    Basis order of the full algebra is (xi, X_1, ..., X_m).
    """
    model_config = ConfigDict(frozen=True)

    A: Tuple[Tuple[float, ...], ...]
    label: str = ""

    @field_validator("A", mode="before")
    @classmethod
    def _coerce(cls, value):
        return tuple(tuple(float(x) for x in row) for row in np.asarray(value, dtype=float))

    @field_validator("A")
    @classmethod
    def _check(cls, value):
        m = len(value)
        if m < 1 or any(len(row) != m for row in value):
            raise ValueError("A must be a non-empty square matrix")
        if not np.any(np.array(value)):
            raise ValueError("A must be nonzero")
        return value

    @property
    def m(self) -> int:
        return len(self.A)

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.array(self.A, dtype=float)

    @cached_property
    def a_sy(self) -> np.ndarray:
        """Symmetric part"""
        return 0.5 * (self.matrix + self.matrix.T)

    @cached_property
    def a_sk(self) -> np.ndarray:
        """Skew part"""
        return 0.5 * (self.matrix - self.matrix.T)

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "AlmostAbelianGroup":
        """Parse {"m": m, "A": [[...]]}"""
        group = cls(A=data["A"], label=str(data.get("label", "")))
        if "m" in data and int(data["m"]) != group.m:
            raise ValueError(f"m={data['m']} does not match A of size {group.m}")
        return group

    def to_json_dict(self) -> dict[str, Any]:
        return {"m": self.m, "A": self.matrix.tolist()}


class IntegralityResult(BaseModel):
    """Integrality of the characteristic polynomial of lambda*A or exp(lambda*A)"""
    passed: bool
    mode: str
    lam: float
    coefficients: List[int]
    raw_coefficients: List[float]
    max_deviation: float
    determinant: Optional[float] = None


class Example5Report(BaseModel):
    """Unimodular almost-Abelian group of 0-nullity 1 with a lattice"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    alpha: float
    beta: float
    gamma: float
    sigma: float
    mu: float
    nu: float
    a: float
    b: float
    c: float
    A: List[List[float]]
    charpoly_A: List[float]
    charpoly_B: List[float]
    charpoly_deviation: float
    trace_A: float
    nullity_index: int
    nullity_basis: List[List[float]]
    nullity_angle_to_X2: float
    splitting_vector: List[float]
    C_eigenvalues: List[Tuple[float, float]] = Field(default_factory=list)
    lattice: Optional[IntegralityResult] = None


class Nul1Report(BaseModel):
    """Almost-Abelian group diag(I, -I) with its kappa = -1 nullity and lattice witness"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    m: int
    A: List[List[float]]
    scal: float
    nullity: NullityResult
    nullity_ok: bool           # index 1 for m >= 4
    witness: IntegralityResult
    expected_coefficients: List[int]
    witness_matches: bool
