"""
Splitting-tensor flow along kappa-nullity geodesics
C(t) = -J0'(t) J0(t)^{-1} with J0 affine in C0, its singularities, trace asymptotics,
conullity-2 curvature evolution and the scalar Riccati blow-up bound
"""
import math
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import linalg
from scipy.integrate import solve_ivp
from loguru import logger

from kappanull.config import Settings
from kappanull.models import BlowupReport, SplittingState, SplittingTrace, TraceLimitReport
from kappanull.services.errors import InputError, NumericalError, SingularFlowError, VerificationError


class SplittingFlowService:
    """Closed-form solutions of C' = C^2 + kappa I"""

    def __init__(self, settings: Optional[Settings] = None):
        """
        Initialize splitting flow service

        Args:
            settings: Toolkit settings (if None, will load from environment)
        """
        if settings is None:
            from kappanull.config import get_settings
            settings = get_settings()

        self.settings = settings

    @staticmethod
    def _coefficients(kappa: float, t: float) -> tuple[float, float, float, float]:
        """(a, b, a', b') with J0 = a I - b C0 and J0' = a' I - b' C0"""
        if kappa > 0:
            s = math.sqrt(kappa)
            return math.cos(s * t), math.sin(s * t) / s, -s * math.sin(s * t), math.cos(s * t)
        if kappa < 0:
            s = math.sqrt(-kappa)
            return math.cosh(s * t), math.sinh(s * t) / s, s * math.sinh(s * t), math.cosh(s * t)
        return 1.0, t, 0.0, 1.0

    def j0_matrix(self, state: SplittingState, t: float) -> np.ndarray:
        """
        Jacobi tensor J0(t): cos/cosh/affine combination of I and C0; J0(0) = I

        Args:
            state: Splitting state
            t: Time along the nullity geodesic

        Returns:
            (k, k) matrix
        """
        a, b, _, _ = self._coefficients(state.kappa, t)
        return a * np.eye(state.k) - b * state.matrix

    def j0_derivative(self, state: SplittingState, t: float) -> np.ndarray:
        """J0'(t)"""
        _, _, da, db = self._coefficients(state.kappa, t)
        return da * np.eye(state.k) - db * state.matrix

    def det_j0(self, state: SplittingState, t: float) -> float:
        """det J0(t)"""
        return float(linalg.det(self.j0_matrix(state, t)))

    def _check_regular(self, J: np.ndarray, t: float) -> None:
        det = abs(float(linalg.det(J)))
        scale = max(1.0, float(np.max(np.abs(J)))) ** J.shape[0]
        if det <= self.settings.singular_guard * scale or np.linalg.cond(J) > 1.0 / self.settings.singular_guard:
            raise SingularFlowError(t)

    def splitting_at(self, state: SplittingState, t: float) -> np.ndarray:
        """
        C(t) = -J0'(t) J0(t)^{-1}

        J0 and J0' are polynomials in C0 and commute, so one solve suffices.

        Raises:
            SingularFlowError: If J0(t) is singular
        """
        J = self.j0_matrix(state, t)
        self._check_regular(J, t)
        try:
            return -linalg.solve(J, self.j0_derivative(state, t))
        except linalg.LinAlgError:
            raise SingularFlowError(t)

    def riccati_residual(self, state: SplittingState, t: float, h: float = 1e-4) -> float:
        """
        max |(C(t+h) - C(t-h)) / 2h - (C(t)^2 + kappa I)|

        Raises:
            SingularFlowError: If the stencil touches a singularity
        """
        if h <= 0:
            raise InputError("step h must be positive")
        forward = self.splitting_at(state, t + h)
        backward = self.splitting_at(state, t - h)
        C = self.splitting_at(state, t)
        derivative = (forward - backward) / (2.0 * h)
        return float(np.max(np.abs(derivative - (C @ C + state.kappa * np.eye(state.k)))))

    def _real_eigenvalues(self, matrix: np.ndarray) -> list[float]:
        values = linalg.eigvals(matrix)
        tol = self.settings.eig_cluster_tol
        return [float(v.real) for v in values if abs(v.imag) <= tol * max(1.0, abs(v))]

    def _singular_time(self, kappa: float, lam: float) -> Optional[float]:
        """First t > 0 where the scalar factor of J0 for eigenvalue lam vanishes"""
        if kappa > 0:
            s = math.sqrt(kappa)
            return (math.pi / 2 - math.atan(lam / s)) / s
        if kappa < 0:
            s = math.sqrt(-kappa)
            if lam <= s * (1.0 + self.settings.eig_cluster_tol):
                return None
            return math.atanh(s / lam) / s
        if lam <= 0:
            return None
        return 1.0 / lam

    def first_singularity(self, state: SplittingState) -> Optional[float]:
        """
        Smallest t > 0 with det J0(t) = 0, or None

        Only real eigenvalues of C0 can make J0 singular. The closed-form
        answer is cross-checked by sampling det J0 on a guard grid.

        Raises:
            VerificationError: If det J0 reaches zero on the guard grid before the closed-form time
        """
        times = [t for t in (self._singular_time(state.kappa, lam) for lam in self._real_eigenvalues(state.matrix)) if t is not None]
        first = min(times) if times else None

        horizon = first if first is not None else 10.0
        guard = np.linspace(0.0, horizon, 401)[1:-1]
        dets = np.array([self.det_j0(state, t) for t in guard])
        if dets.size and np.any(dets <= 0.0):
            early = float(guard[np.argmax(dets <= 0.0)])
            raise VerificationError(
                "first_singularity",
                f"det J0 reaches zero at t={early:.6g} before the closed-form singularity {first} (kappa={state.kappa})",
            )
        return first

    def singular_times(self, state: SplittingState, horizon: float) -> list[float]:
        """
        Singular times of J0 in (-horizon, horizon), both directions

        Backward times come from the flow of -C0, since J0(-t; C0) = J0(t; -C0).
        """
        found: list[float] = []
        for sign in (1.0, -1.0):
            for lam in self._real_eigenvalues(sign * state.matrix):
                t = self._singular_time(state.kappa, lam)
                if t is None:
                    continue
                period = math.pi / math.sqrt(state.kappa) if state.kappa > 0 else None
                while t < horizon:
                    found.append(sign * t)
                    if period is None:
                        break
                    t += period
        return sorted(found)

    def trace(
        self,
        state: SplittingState,
        grid: Sequence[float],
        kd0: Optional[float] = None,
    ) -> SplittingTrace:
        """
        Sample C(t), tr C(t), det J0(t) (and K_D(t) for 2x2 states with kd0)

        Raises:
            SingularFlowError: If a sample hits a singularity
        """
        with_kd = kd0 is not None
        if with_kd and state.k != 2:
            raise InputError("K_D evolution is defined for conullity 2 only")
        rows = []
        for t in grid:
            C = self.splitting_at(state, float(t))
            row = [float(t)] + C.ravel().tolist() + [float(np.trace(C)), self.det_j0(state, float(t))]
            if with_kd:
                row.append(self.conullity2_evolution(kd0, state.kappa, state.matrix, float(t)))
            rows.append(row)
        return SplittingTrace(kappa=state.kappa, k=state.k, rows=rows, with_kd=with_kd)

    @staticmethod
    def elementary_symmetric(C0: np.ndarray) -> np.ndarray:
        """sigma_0..sigma_m of the eigenvalues (sigma_0 = 1)"""
        coeffs = np.real_if_close(np.poly(C0), tol=1000)
        coeffs = np.real(coeffs)
        signs = np.array([(-1) ** j for j in range(len(coeffs))])
        return signs * coeffs

    @staticmethod
    def q_polynomial(sigma: np.ndarray) -> np.ndarray:
        """Q(xi) = sum_j (-1)^j sigma_j xi^j = det(I - xi C0), ascending coefficients"""
        return np.array([(-1) ** j * s for j, s in enumerate(sigma)])

    @staticmethod
    def p_polynomial(sigma: np.ndarray) -> np.ndarray:
        """P(xi) = sum_j (-1)^j [(m-j) xi^{j+1} + j xi^{j-1}] sigma_j, ascending coefficients"""
        m = len(sigma) - 1
        coeffs = np.zeros(m + 2)
        for j, s in enumerate(sigma):
            sign = (-1) ** j
            coeffs[j + 1] += sign * (m - j) * s
            if j >= 1:
                coeffs[j - 1] += sign * j * s
        return coeffs

    @staticmethod
    def rational_trace(C0: np.ndarray, t: float) -> float:
        """
        -P(tanh t) / Q(tanh t) evaluated in factored form

        P = m xi Q + (1 - xi^2) Q', so -P/Q = -m xi + (1 - xi^2) sum_i lam_i / (1 - xi lam_i).
        """
        xi = math.tanh(t)
        values = linalg.eigvals(C0)
        m = C0.shape[0]
        return float(np.real(-m * xi + (1.0 - xi * xi) * np.sum(values / (1.0 - xi * values))))

    def trace_limits(self, C0: np.ndarray, grid: Optional[Sequence[float]] = None) -> TraceLimitReport:
        """
        Limits of tr C(t) for the kappa = -1 flow as t -> +-inf

        limit_plus = -(m - 2 k_+), limit_minus = m - 2 k_-, with k_+- the
        multiplicities of +-1. A direction that meets a singularity of J0
        reports the singular time instead of a limit.

        Args:
            C0: Square initial splitting tensor
            grid: Times at which tr C(t) = -P(tanh t)/Q(tanh t) is verified (default 201 points in [-5, 5])

        Returns:
            TraceLimitReport
        """
        C0 = np.asarray(C0, dtype=float)
        if C0.ndim != 2 or C0.shape[0] != C0.shape[1]:
            raise InputError("C0 must be square")
        m = C0.shape[0]
        tol = self.settings.eig_cluster_tol
        flags: list[str] = []

        values = linalg.eigvals(C0)
        k_plus = int(sum(1 for v in values if abs(v - 1.0) <= tol))
        k_minus = int(sum(1 for v in values if abs(v + 1.0) <= tol))
        for v in values:
            for target in (1.0, -1.0):
                if abs(v.real - target) <= tol and abs(v.imag) > tol:
                    flags.append(f"eigenvalue {v} has real part {target:+g} but nonzero imaginary part; multiplicity ambiguous")

        sigma = self.elementary_symmetric(C0)
        p_coeffs = self.p_polynomial(sigma)
        q_coeffs = self.q_polynomial(sigma)

        state = SplittingState(kappa=-1.0, C0=C0)
        forward = self.first_singularity(state)
        backward = self.first_singularity(SplittingState(kappa=-1.0, C0=-C0))

        limit_plus = None if forward is not None else float(-(m - 2 * k_plus))
        limit_minus = None if backward is not None else float(m - 2 * k_minus)
        if forward is not None:
            flags.append(f"flow meets a singularity at t={forward:.17g}; no limit at +inf")
        if backward is not None:
            flags.append(f"flow meets a singularity at t={-backward:.17g}; no limit at -inf")

        grid = np.linspace(-5.0, 5.0, 201) if grid is None else np.asarray(grid, dtype=float)
        residual = 0.0
        factored_gap = 0.0
        for t in grid:
            if (forward is not None and t >= forward - 1e-3) or (backward is not None and t <= -backward + 1e-3):
                continue
            try:
                trC = float(np.trace(self.splitting_at(state, float(t))))
            except SingularFlowError:
                continue
            xi = math.tanh(float(t))
            q_value = P.polyval(xi, q_coeffs)
            if q_value == 0.0:
                continue
            quotient = -float(P.polyval(xi, p_coeffs) / q_value)
            residual = max(residual, abs(trC - quotient))
            factored_gap = max(factored_gap, abs(quotient - self.rational_trace(C0, float(t))) / max(1.0, abs(quotient)))

        if factored_gap > 1e-8:
            flags.append(f"-P/Q from sigma_j departs from the eigenvalue form by {factored_gap:.3e}")

        # The coefficient form must agree with the factored form away from +-1
        for xi in np.linspace(-0.9, 0.9, 7):
            q_direct = float(linalg.det(np.eye(m) - xi * C0))
            if abs(P.polyval(xi, q_coeffs) - q_direct) > 1e-9 * max(1.0, abs(q_direct)):
                flags.append(f"Q({xi:.2f}) from sigma_j disagrees with det(I - xi C0)")

        logger.info(f"trace limits m={m}: k+={k_plus}, k-={k_minus}, +inf -> {limit_plus}, -inf -> {limit_minus}")
        return TraceLimitReport(
            m=m,
            sigma=sigma.tolist(),
            k_plus=k_plus,
            k_minus=k_minus,
            limit_plus=limit_plus,
            limit_minus=limit_minus,
            singularity_plus=forward,
            singularity_minus=-backward if backward is not None else None,
            p_coefficients=p_coeffs.tolist(),
            q_coefficients=q_coeffs.tolist(),
            identity_residual=residual,
            flags=flags,
        )

    @staticmethod
    def det_j0_closed_form(kappa: float, C0: np.ndarray, t: float) -> float:
        """
        det J0(t) for 2x2 C0 in terms of tr C0 and det C0

        kappa = 0: 1 - tr t + det t^2; kappa < 0: exponential combination in
        e^{+-2 sqrt(-kappa) t}; kappa > 0: the trigonometric analogue.
        """
        C0 = np.asarray(C0, dtype=float)
        if C0.shape != (2, 2):
            raise InputError("closed-form det J0 is for 2x2 C0")
        tr, det = float(np.trace(C0)), float(linalg.det(C0))
        if kappa == 0:
            return 1.0 - tr * t + det * t * t
        if kappa < 0:
            s = math.sqrt(-kappa)
            return (
                0.5 * (1.0 + det / kappa)
                + 0.25 * (1.0 - det / kappa - tr / s) * math.exp(2.0 * s * t)
                + 0.25 * (1.0 - det / kappa + tr / s) * math.exp(-2.0 * s * t)
            )
        s = math.sqrt(kappa)
        return (
            0.5 * (1.0 + det / kappa)
            + 0.5 * (1.0 - det / kappa) * math.cos(2.0 * s * t)
            - 0.5 * (tr / s) * math.sin(2.0 * s * t)
        )

    def conullity2_evolution(self, KD0: float, kappa: float, C0: np.ndarray, t: float) -> float:
        """
        K_D(t) = kappa + (K_D(0) - kappa) / |det J0(t)| for conullity 2

        Raises:
            InputError: If kappa > 0 or C0 is not 2x2
            SingularFlowError: If J0(t) is singular
        """
        if kappa > 0:
            raise InputError("K_D evolution is stated for kappa <= 0")
        det = self.det_j0_closed_form(kappa, C0, t)
        if abs(det) <= self.settings.singular_guard:
            raise SingularFlowError(t)
        return kappa + (KD0 - kappa) / abs(det)

    def scalar_riccati_blowup(self, beta0: float, delta: float) -> BlowupReport:
        """
        Blow-up time of beta' = delta^2 + beta^2 against arctan bound

        arctan(beta/delta) grows at least like delta t, so beta escapes before
        (pi/2 - arctan(beta0/delta)) / delta.

        Raises:
            InputError: If delta <= 0
            NumericalError: If the integrator fails before escaping
        """
        if not delta > 0:
            raise InputError(f"delta must be positive, got {delta}")
        bound = (math.pi / 2 - math.atan(beta0 / delta)) / delta
        escape = self.settings.escape_threshold

        def rhs(_t, y):
            return [delta * delta + y[0] * y[0]]

        def escaped(_t, y):
            return abs(y[0]) - escape

        escaped.terminal = True
        escaped.direction = 1

        solution = solve_ivp(
            rhs,
            (0.0, 2.0 * bound + 1.0),
            [float(beta0)],
            method="RK45",
            rtol=self.settings.ode_rtol,
            atol=1e-12,
            events=escaped,
        )
        if solution.status != 1 or not len(solution.t_events[0]):
            logger.error(f"Riccati integration did not escape: {solution.message}")
            raise NumericalError(f"integration did not reach |beta| > {escape:g}: {solution.message}")

        numeric = float(solution.t_events[0][0])
        logger.info(f"Riccati blow-up beta0={beta0}, delta={delta}: bound={bound:.12g}, numeric={numeric:.12g}")
        return BlowupReport(
            beta0=float(beta0),
            delta=float(delta),
            bound=bound,
            numeric_blowup=numeric,
            escape_threshold=escape,
            within_bound=numeric <= bound * 1.01,
        )
