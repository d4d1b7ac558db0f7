"""
Exception hierarchy shared by the services

InputError subclasses map to CLI exit code 1, NumericalError subclasses to 2.
"""
from typing import Optional


class KappaNullError(Exception):
    """Base exception for toolkit operations"""
    pass


class InputError(KappaNullError):
    """Invalid input or violated precondition"""
    pass


class FlatGroupError(InputError):
    """Operation requires a non-flat group"""
    pass


class NumericalError(KappaNullError):
    """Numerical failure (singular matrix, failed convergence)"""
    pass


class SingularFlowError(NumericalError):
    """J0(t) is singular at the requested time"""

    def __init__(self, t: float, message: Optional[str] = None):
        self.t = t
        super().__init__(message or f"J0(t) is singular at t={t!r}")


class VerificationError(NumericalError):
    """A verification stage of a construction failed"""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")
