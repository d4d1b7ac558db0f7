"""
Services module - Curvature, nullity, splitting flow and model constructions
"""
from .errors import (
    KappaNullError,
    InputError,
    FlatGroupError,
    NumericalError,
    SingularFlowError,
    VerificationError,
)
from .lie_metric import LieMetricService
from .nullity_solver import NullitySolverService
from .splitting_flow import SplittingFlowService
from .almost_abelian import AlmostAbelianService
from .model_catalog import ModelCatalogService

__all__ = [
    "KappaNullError",
    "InputError",
    "FlatGroupError",
    "NumericalError",
    "SingularFlowError",
    "VerificationError",
    "LieMetricService",
    "NullitySolverService",
    "SplittingFlowService",
    "AlmostAbelianService",
    "ModelCatalogService",
]
