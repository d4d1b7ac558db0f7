"""
Data models for metric Lie algebras and their curvature
Structure constants are stored sparsely; antisymmetry is synthesised on demand
"""
from functools import cached_property
from typing import Any, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class BracketTerm(BaseModel):
    """One structure constant: [e_i, e_j] contains c * e_k"""
    model_config = ConfigDict(frozen=True)

    i: int = Field(ge=0)
    j: int = Field(ge=0)
    k: int = Field(ge=0)
    c: float


class LieMetricSpace(BaseModel):
    """
    Metric Lie algebra given by structure constants and a Gram matrix

    `structure` holds the terms as supplied. Terms with i > j are read through
    antisymmetry, so [e_1, e_0] = -e_2 and [e_0, e_1] = e_2 describe the same
    constant. Conflicting duplicates are kept so validation can report them;
    the assembled tensor uses the first occurrence.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dim: int = Field(gt=0)
    structure: Tuple[BracketTerm, ...] = ()
    metric: Optional[Tuple[Tuple[float, ...], ...]] = None
    label: str = ""

    @model_validator(mode="after")
    def _check_shapes(self) -> "LieMetricSpace":
        for term in self.structure:
            if max(term.i, term.j, term.k) >= self.dim:
                raise ValueError(f"bracket index out of range for dim={self.dim}: {term}")
        if self.metric is not None:
            if len(self.metric) != self.dim or any(len(row) != self.dim for row in self.metric):
                raise ValueError(f"metric must be {self.dim}x{self.dim}")
        return self

    @cached_property
    def gram(self) -> np.ndarray:
        """Gram matrix <e_i, e_j>"""
        if self.metric is None:
            return np.eye(self.dim)
        return np.array(self.metric, dtype=float)

    @cached_property
    def canonical_terms(self) -> dict[tuple[int, int, int], float]:
        """Constants keyed by (i, j, k) with i < j; first occurrence wins"""
        table: dict[tuple[int, int, int], float] = {}
        for term in self.structure:
            if term.i == term.j:
                continue
            key, value = _canonical(term)
            table.setdefault(key, value)
        return table

    @cached_property
    def structure_tensor(self) -> np.ndarray:
        """Dense c[i, j, k] with c[j, i, k] = -c[i, j, k]"""
        n = self.dim
        tensor = np.zeros((n, n, n))
        for (i, j, k), value in self.canonical_terms.items():
            tensor[i, j, k] = value
            tensor[j, i, k] = -value
        return tensor

    def bracket(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Bracket of two coefficient vectors"""
        return np.einsum("i,j,ijk->k", np.asarray(u, float), np.asarray(v, float), self.structure_tensor)

    @classmethod
    def from_arrays(
        cls,
        structure_tensor: np.ndarray,
        metric: Optional[np.ndarray] = None,
        label: str = "",
        atol: float = 0.0,
    ) -> "LieMetricSpace":
        """
        Build from a dense structure tensor (only i < j entries are read)

        Args:
            structure_tensor: (n, n, n) array
            metric: Optional Gram matrix
            label: Optional name
            atol: Entries with |c| <= atol are dropped
        """
        tensor = np.asarray(structure_tensor, dtype=float)
        n = tensor.shape[0]
        terms = [
            BracketTerm(i=i, j=j, k=k, c=float(tensor[i, j, k]))
            for i in range(n)
            for j in range(i + 1, n)
            for k in range(n)
            if abs(tensor[i, j, k]) > atol
        ]
        gram = None if metric is None else tuple(tuple(float(x) for x in row) for row in np.asarray(metric, dtype=float))
        return cls(dim=n, structure=tuple(terms), metric=gram, label=label)

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "LieMetricSpace":
        """
        Parse the exchange schema {"dim", "brackets": [{"i", "j", "coeffs"}], "metric"}

        Args:
            data: Decoded JSON object

        Returns:
            LieMetricSpace
        """
        dim = int(data["dim"])
        terms: List[BracketTerm] = []
        for entry in data.get("brackets", []):
            coeffs = entry["coeffs"]
            if len(coeffs) != dim:
                raise ValueError(f"bracket ({entry['i']},{entry['j']}) needs {dim} coefficients, got {len(coeffs)}")
            for k, value in enumerate(coeffs):
                if value != 0:
                    terms.append(BracketTerm(i=int(entry["i"]), j=int(entry["j"]), k=k, c=float(value)))
        metric = data.get("metric")
        gram = None if metric is None else tuple(tuple(float(x) for x in row) for row in metric)
        return cls(dim=dim, structure=tuple(terms), metric=gram, label=str(data.get("label", "")))

    def to_json_dict(self) -> dict[str, Any]:
        """Emit the exchange schema (i < j brackets, identity metric spelled out)"""
        tensor = self.structure_tensor
        brackets = [
            {"i": i, "j": j, "coeffs": tensor[i, j].tolist()}
            for i in range(self.dim)
            for j in range(i + 1, self.dim)
            if np.any(tensor[i, j] != 0)
        ]
        return {"dim": self.dim, "brackets": brackets, "metric": self.gram.tolist()}


def _canonical(term: BracketTerm) -> tuple[tuple[int, int, int], float]:
    if term.i < term.j:
        return (term.i, term.j, term.k), term.c
    return (term.j, term.i, term.k), -term.c


class ValidationReport(BaseModel):
    """Outcome of the algebra gate; failure details are carried, not raised"""
    passed: bool
    antisymmetry_violation: float
    jacobi_residual: float
    metric_min_eigenvalue: float
    metric_asymmetry: float
    issues: List[str] = Field(default_factory=list)


class CurvatureData(BaseModel):
    """
    Curvature of a left-invariant metric in the given frame

    gamma[i, j, k]: nabla_{e_i} e_j = sum_k gamma[i, j, k] e_k
    endo[i, j, k, l]: R(e_i, e_j) e_k = sum_l endo[i, j, k, l] e_l
    riem[i, j, k, l] = <R(e_i, e_j) e_k, e_l>
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    gamma: np.ndarray
    endo: np.ndarray
    riem: np.ndarray
    ricci: np.ndarray
    scal: float
    metric: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.metric.shape[0])


class GrowthVector(BaseModel):
    """Dimensions of the bracket filtration D, D^2, ... until it stabilises"""
    vector: List[int]
    bracket_generating: bool
    step: Optional[int] = None
