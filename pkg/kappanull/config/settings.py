"""
Configuration settings management
Numeric tolerances and runtime options, overridable through environment variables
"""
import os
from pathlib import Path
from functools import lru_cache
from dotenv import load_dotenv


class Settings:
    """Toolkit settings loaded from environment variables"""

    # Logging
    log_level: str = "INFO"

    # Rank and validation tolerances
    rank_rtol: float = 1e-9
    jacobi_tol: float = 1e-10
    symmetry_tol: float = 1e-10
    metric_eig_tol: float = 1e-12

    # Kappa scan
    scan_threshold: float = 0.05
    golden_width: float = 1e-10
    scan_workers: int = 1

    # Splitting flow
    eig_cluster_tol: float = 1e-8
    singular_guard: float = 1e-12
    ode_rtol: float = 1e-10
    escape_threshold: float = 1e8

    # Lattice criteria
    integrality_tol: float = 1e-6

    def __init__(self):
        """Load settings from environment variables"""
        # Load .env file from project root
        env_path = Path(__file__).parent.parent.parent / '.env'
        if env_path.exists():
            load_dotenv(env_path)
        else:
            load_dotenv()

        self._errors: list[str] = []

        self.log_level = os.getenv('KAPPANULL_LOG_LEVEL', 'INFO').upper()

        self.rank_rtol = self._float('KAPPANULL_RANK_RTOL', '1e-9')
        self.jacobi_tol = self._float('KAPPANULL_JACOBI_TOL', '1e-10')
        self.symmetry_tol = self._float('KAPPANULL_SYMMETRY_TOL', '1e-10')
        self.metric_eig_tol = self._float('KAPPANULL_METRIC_EIG_TOL', '1e-12')

        self.scan_threshold = self._float('KAPPANULL_SCAN_THRESHOLD', '0.05')
        self.golden_width = self._float('KAPPANULL_GOLDEN_WIDTH', '1e-10')
        self.scan_workers = self._int('KAPPANULL_SCAN_WORKERS', '1')

        self.eig_cluster_tol = self._float('KAPPANULL_EIG_CLUSTER_TOL', '1e-8')
        self.singular_guard = self._float('KAPPANULL_SINGULAR_GUARD', '1e-12')
        self.ode_rtol = self._float('KAPPANULL_ODE_RTOL', '1e-10')
        self.escape_threshold = self._float('KAPPANULL_ESCAPE_THRESHOLD', '1e8')

        self.integrality_tol = self._float('KAPPANULL_INTEGRALITY_TOL', '1e-6')

        # Validate settings
        self._validate()

    def _float(self, key: str, default: str) -> float:
        raw = os.getenv(key, default)
        try:
            return float(raw)
        except ValueError:
            self._errors.append(f"{key}={raw!r} is not a number")
            return float(default)

    def _int(self, key: str, default: str) -> int:
        raw = os.getenv(key, default)
        try:
            return int(raw)
        except ValueError:
            self._errors.append(f"{key}={raw!r} is not an integer")
            return int(default)

    def _validate(self):
        """Validate settings"""
        positive = {
            'KAPPANULL_RANK_RTOL': self.rank_rtol,
            'KAPPANULL_JACOBI_TOL': self.jacobi_tol,
            'KAPPANULL_SYMMETRY_TOL': self.symmetry_tol,
            'KAPPANULL_METRIC_EIG_TOL': self.metric_eig_tol,
            'KAPPANULL_SCAN_THRESHOLD': self.scan_threshold,
            'KAPPANULL_GOLDEN_WIDTH': self.golden_width,
            'KAPPANULL_SCAN_WORKERS': self.scan_workers,
            'KAPPANULL_EIG_CLUSTER_TOL': self.eig_cluster_tol,
            'KAPPANULL_SINGULAR_GUARD': self.singular_guard,
            'KAPPANULL_ODE_RTOL': self.ode_rtol,
            'KAPPANULL_ESCAPE_THRESHOLD': self.escape_threshold,
            'KAPPANULL_INTEGRALITY_TOL': self.integrality_tol,
        }

        errors = list(self._errors)
        errors += [f"{key} must be positive" for key, value in positive.items() if not value > 0]
        if self.log_level not in {"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}:
            errors.append(f"KAPPANULL_LOG_LEVEL={self.log_level!r} is not a loguru level")

        if errors:
            raise ValueError(
                f"Invalid settings: {'; '.join(errors)}\n"
                f"Please fix them in .env file or environment variables"
            )

    def with_overrides(self, **overrides) -> "Settings":
        """
        Return a copy with selected fields replaced

        Args:
            **overrides: Field names and new values (None values are ignored)

        Returns:
            New Settings instance
        """
        clone = object.__new__(Settings)
        clone.__dict__.update(self.__dict__)
        for key, value in overrides.items():
            if value is None:
                continue
            if not hasattr(self, key):
                raise ValueError(f"Unknown setting: {key}")
            setattr(clone, key, value)
        clone._errors = []
        clone._validate()
        return clone


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()
