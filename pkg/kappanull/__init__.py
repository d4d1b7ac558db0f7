"""
Kappa-nullity toolkit - curvature, nullity and splitting tensors of left-invariant metrics
"""

__version__ = "0.1.0"
