"""
Data models module
"""
from .lie import BracketTerm, LieMetricSpace, ValidationReport, CurvatureData, GrowthVector
from .nullity import NullityResult, KappaSample, KappaScanResult
from .splitting import SplittingState, TraceLimitReport, SplittingTrace, BlowupReport
from .almost_abelian import AlmostAbelianGroup, IntegralityResult, Example5Report, Nul1Report
from .catalog import MilnorTriple, TableRowExpectation, TableRowReport

__all__ = [
    "BracketTerm",
    "LieMetricSpace",
    "ValidationReport",
    "CurvatureData",
    "GrowthVector",
    "NullityResult",
    "KappaSample",
    "KappaScanResult",
    "SplittingState",
    "TraceLimitReport",
    "SplittingTrace",
    "BlowupReport",
    "AlmostAbelianGroup",
    "IntegralityResult",
    "Example5Report",
    "Nul1Report",
    "MilnorTriple",
    "TableRowExpectation",
    "TableRowReport",
]
