"""
Almost-Abelian groups R x_A V
Closed-form curvature and 0-nullity, characteristic-polynomial lattice criteria
and the explicit unimodular constructions with nullity one
"""
import math
from typing import Any, Optional

import numpy as np
import sympy
from scipy import linalg, optimize
from loguru import logger

from kappanull.config import Settings
from kappanull.models import (
    AlmostAbelianGroup,
    BracketTerm,
    CurvatureData,
    Example5Report,
    IntegralityResult,
    LieMetricSpace,
    Nul1Report,
    NullityResult,
)
from kappanull.services.errors import FlatGroupError, InputError, VerificationError
from kappanull.services.lie_metric import LieMetricService
from kappanull.services.nullity_solver import NullitySolverService
from kappanull.utils.linalg import kernel_basis, max_principal_angle

# Integer matrix whose characteristic polynomial exp(A) of the nullity-one group reproduces
EXAMPLE5_C = np.array(
    [
        [1, 0, 0, 1],
        [1, 2, 0, 2],
        [0, 1, 3, 0],
        [0, 0, 1, 0],
    ],
    dtype=float,
)

# log of the larger root of x^2 - 3x + 1
GOLDEN_LOG = math.log((3.0 + math.sqrt(5.0)) / 2.0)


class AlmostAbelianService:
    """Geometry of left-invariant metrics on almost-Abelian groups"""

    def __init__(
        self,
        lie_metric: Optional[LieMetricService] = None,
        nullity_solver: Optional[NullitySolverService] = None,
        settings: Optional[Settings] = None,
    ):
        """
        Initialize almost-Abelian service

        Args:
            lie_metric: Curvature engine (if None, will create new)
            nullity_solver: Nullity solver (if None, will create new)
            settings: Toolkit settings (if None, will load from environment)
        """
        if settings is None:
            from kappanull.config import get_settings
            settings = get_settings()

        self.settings = settings
        self.lie_metric = lie_metric or LieMetricService(settings)
        self.nullity_solver = nullity_solver or NullitySolverService(settings)

    # Matrix JSON

    def from_matrix_json(self, data: dict[str, Any]) -> AlmostAbelianGroup:
        """Parse {"m": m, "A": [[...]]}"""
        try:
            return AlmostAbelianGroup.from_json_dict(data)
        except (KeyError, ValueError) as e:
            raise InputError(f"Invalid matrix JSON: {e}")

    def to_matrix_json(self, group: AlmostAbelianGroup) -> dict[str, Any]:
        return group.to_json_dict()

    # Geometry

    def connection(self, group: AlmostAbelianGroup) -> np.ndarray:
        """
        Connection coefficients on (xi, X_1..X_m)

        nabla_xi X = A_sk X, nabla_X xi = -A_sy X, nabla_X Y = <A_sy X, Y> xi, nabla_xi xi = 0.
        """
        m = group.m
        S, K = group.a_sy, group.a_sk
        gamma = np.zeros((m + 1, m + 1, m + 1))
        gamma[0, 1:, 1:] = K.T
        gamma[1:, 0, 1:] = -S.T
        gamma[1:, 1:, 0] = S
        return gamma

    def aa_curvature(self, group: AlmostAbelianGroup) -> CurvatureData:
        """
        Curvature assembled from the closed-form blocks

        On V: <R(X,Y)Z,W> = <A_sy X,Z><A_sy Y,W> - <A_sy Y,Z><A_sy X,W>;
        R(X,Y)xi = 0; <R(xi,X)Y,xi> = <(A_sk A_sy - A_sy A_sk - A_sy^2) X, Y>.

        Args:
            group: Almost-Abelian group

        Returns:
            CurvatureData in the orthonormal basis (xi, X_1..X_m)
        """
        m = group.m
        S, K = group.a_sy, group.a_sk
        M1 = K @ S - S @ K - S @ S

        riem = np.zeros((m + 1,) * 4)
        riem[1:, 1:, 1:, 1:] = np.einsum("ac,bd->abcd", S, S) - np.einsum("bc,ad->abcd", S, S)
        riem[0, 1:, 1:, 0] = M1.T
        riem[0, 1:, 0, 1:] = -M1.T
        riem[1:, 0, 1:, 0] = -M1.T
        riem[1:, 0, 0, 1:] = M1.T

        ricci = np.einsum("ijki->jk", riem)
        scal = float(np.trace(ricci))
        logger.debug(f"Closed-form curvature of almost-Abelian group (m={m}): scal={scal:.12g}")
        return CurvatureData(
            gamma=self.connection(group),
            endo=riem,
            riem=riem,
            ricci=ricci,
            scal=scal,
            metric=np.eye(m + 1),
        )

    def to_lie_metric(self, group: AlmostAbelianGroup) -> LieMetricSpace:
        """
        Metric Lie algebra with [xi, X_i] = sum_k A_ki X_k, V Abelian, xi unit normal to V

        Returns:
            (m+1)-dimensional LieMetricSpace with the identity metric
        """
        A = group.matrix
        terms = [
            BracketTerm(i=0, j=i + 1, k=k + 1, c=float(A[k, i]))
            for i in range(group.m)
            for k in range(group.m)
            if A[k, i] != 0.0
        ]
        return LieMetricSpace(dim=group.m + 1, structure=tuple(terms), label=group.label)

    def aa_nullity(self, group: AlmostAbelianGroup) -> NullityResult:
        """
        0-nullity ker A_sy intersected with A_sk^{-1}(ker A_sy)

        Args:
            group: Non-flat almost-Abelian group

        Returns:
            NullityResult on (xi, X_1..X_m); the basis lies in V

        Raises:
            FlatGroupError: If A_sy = 0 (the metric is flat)
        """
        S, K = group.a_sy, group.a_sk
        scale = float(np.max(np.abs(group.matrix)))
        if float(np.max(np.abs(S))) <= self.settings.symmetry_tol * max(1.0, scale):
            raise FlatGroupError("A_sy = 0: the metric is flat and every vector is in the 0-nullity")

        m = group.m
        split = kernel_basis(np.vstack([S, S @ K]), self.settings.rank_rtol)
        basis = np.vstack([np.zeros((1, split.basis.shape[1])), split.basis])

        complement = kernel_basis(basis.T, self.settings.rank_rtol).basis if basis.shape[1] else np.eye(m + 1)
        logger.info(f"Almost-Abelian 0-nullity of dimension {basis.shape[1]} (m={m})")
        return NullityResult(
            kappa=0.0,
            index=basis.shape[1],
            basis=basis,
            conullity=complement,
            residual=split.residual,
            sigma_max=split.sigma_max,
        )

    # Lattice criteria

    def charpoly(self, M: np.ndarray) -> list[float]:
        """
        Monic characteristic polynomial, highest degree first

        Integer matrices go through sympy's fraction-free Berkowitz algorithm
        and are exact; everything else uses numpy.
        """
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise InputError("charpoly needs a square matrix")
        if np.all(np.isfinite(M)) and np.array_equal(M, np.round(M)):
            exact = sympy.Matrix(M.astype(np.int64).tolist()).charpoly()
            return [float(c) for c in exact.all_coeffs()]
        return [float(c) for c in np.real_if_close(np.poly(M), tol=1000).real]

    @staticmethod
    def is_nilpotent(A: np.ndarray, tol: float) -> bool:
        """||A^m|| <= tol * ||A||^m for an m x m matrix (spectral norms)"""
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InputError("nilpotency check needs a square matrix")
        norm = float(np.linalg.norm(A, 2))
        if norm == 0.0:
            return True
        power = np.linalg.matrix_power(A / norm, A.shape[0])
        return bool(np.linalg.norm(power, 2) <= tol)

    def integrality_check(
        self,
        A: np.ndarray,
        lam: float,
        mode: str = "exponential",
        tol: Optional[float] = None,
    ) -> IntegralityResult:
        """
        Whether the characteristic polynomial of lam*A (linear) or exp(lam*A) (exponential) is integral

        Exponential mode also requires |det exp(lam*A)| = 1.

        Args:
            A: Square matrix
            lam: Nonzero scale
            mode: "linear" or "exponential"
            tol: Absolute tolerance per coefficient (defaults to settings.integrality_tol)

        Returns:
            IntegralityResult with rounded coefficients

        Raises:
            InputError: If lam = 0, mode is unknown, or linear mode gets a nilpotent or non-unimodular A
        """
        tol = self.settings.integrality_tol if tol is None else tol
        A = np.asarray(A, dtype=float)
        if lam == 0:
            raise InputError("lambda must be nonzero")
        if mode not in ("linear", "exponential"):
            raise InputError(f"Unknown integrality mode: {mode}")

        if mode == "linear":
            if self.is_nilpotent(A, tol):
                raise InputError("linear criterion needs a non-nilpotent A")
            if abs(float(np.trace(A))) > tol:
                raise InputError("linear criterion needs a unimodular A (tr A = 0)")
            target = lam * A
        else:
            target = linalg.expm(lam * A)

        raw = self.charpoly(target)
        rounded = [int(round(c)) for c in raw]
        deviation = max(abs(c - r) for c, r in zip(raw, rounded))
        determinant = float(linalg.det(target))
        passed = deviation <= tol
        if mode == "exponential":
            passed = passed and abs(abs(determinant) - 1.0) <= tol

        logger.debug(f"integrality {mode} lam={lam:.17g}: coefficients {rounded}, deviation {deviation:.3e}")
        return IntegralityResult(
            passed=bool(passed),
            mode=mode,
            lam=float(lam),
            coefficients=rounded,
            raw_coefficients=raw,
            max_deviation=float(deviation),
            determinant=determinant,
        )

    def lattice_lambda_search(
        self,
        A: np.ndarray,
        coefficient_bound: int,
        tol: Optional[float] = None,
    ) -> list[float]:
        """
        Candidate lam with tr exp(lam*A) integral, verified by the exponential criterion

        For each integer k with |k| <= bound, tr exp(lam*A) = k is solved by
        bisection on every monotone branch of the trace; lam < 0 is searched
        through -A.

        Args:
            A: Non-nilpotent trace-free matrix
            coefficient_bound: Largest |trace| tried
            tol: Integrality tolerance

        Returns:
            Sorted verified lam values (possibly empty)

        Raises:
            InputError: If A is nilpotent or has nonzero trace
        """
        tol = self.settings.integrality_tol if tol is None else tol
        A = np.asarray(A, dtype=float)
        m = A.shape[0]
        if self.is_nilpotent(A, tol):
            raise InputError("lattice search needs a non-nilpotent A")
        values = linalg.eigvals(A)
        if abs(float(np.trace(A))) > tol:
            raise InputError("lattice search needs tr A = 0")

        bound = int(coefficient_bound)
        found: list[float] = []
        for sign in (1.0, -1.0):
            eigen = sign * values

            def trace_exp(lam: float) -> float:
                return float(np.sum(np.exp(lam * eigen)).real)

            upper = 1.0
            while trace_exp(upper) <= bound + m and upper < 64.0:
                upper *= 2.0
            grid = np.linspace(0.0, upper, 2001)[1:]
            f = np.array([trace_exp(x) for x in grid])

            # Split the sampled trace into monotone runs
            slope = np.sign(np.diff(f))
            breaks = [0] + [i for i in range(1, slope.size) if slope[i] != slope[i - 1]] + [grid.size - 1]
            for start, end in zip(breaks[:-1], breaks[1:]):
                lo, hi = sorted((f[start], f[end]))
                for k in range(max(-bound, math.ceil(lo)), min(bound, math.floor(hi)) + 1):
                    if trace_exp(grid[start]) == k:
                        lam = float(grid[start])
                    elif trace_exp(grid[end]) == k:
                        lam = float(grid[end])
                    else:
                        lam = float(optimize.bisect(lambda x: trace_exp(x) - k, grid[start], grid[end], xtol=1e-15))
                    result = self.integrality_check(A, sign * lam, "exponential", tol)
                    if result.passed and not any(abs(sign * lam - x) <= 1e-9 for x in found):
                        found.append(sign * lam)

        found.sort()
        logger.info(f"Lattice search (bound {bound}) found {len(found)} candidate(s)")
        return found

    # Constructions

    def construct_example5(self) -> Example5Report:
        """
        Unimodular almost-Abelian group of 0-nullity 1 admitting a lattice

        Steps: read log-spectral data off the integer matrix C, solve the
        quartic for a > 0, assemble A(a, b, c) and verify its characteristic
        polynomial, trace, nullity and splitting tensor.

        Returns:
            Example5Report

        Raises:
            VerificationError: Naming the first stage that fails
        """
        logger.info("Step 1: Spectral data of the integer matrix C...")
        values = linalg.eigvals(EXAMPLE5_C)
        real = sorted(float(v.real) for v in values if abs(v.imag) <= 1e-8)
        complex_ = [v for v in values if v.imag > 1e-8]
        if len(real) != 2 or len(complex_) != 1 or real[0] <= 0.0:
            raise VerificationError("spectrum", f"expected two positive real eigenvalues and a complex pair, got {values}")
        z = complex_[0]
        gamma = -math.log(real[0])
        alpha = math.log(abs(z))
        beta = abs(math.atan2(z.imag, z.real))
        if abs(math.log(real[1]) - (gamma - 2.0 * alpha)) > 1e-8:
            raise VerificationError("spectrum", "log of the larger real eigenvalue differs from gamma - 2 alpha")

        logger.info("Step 2: Quartic coefficients and root...")
        sigma = -2.0 * alpha ** 2 + beta ** 2 - (alpha - gamma) ** 2
        mu = 2.0 * alpha * ((alpha - gamma) ** 2 + beta ** 2)
        nu = (alpha ** 2 + beta ** 2) * gamma * (2.0 * alpha - gamma)
        if not (mu > 0.0 and nu < 0.0):
            raise VerificationError("quartic", f"expected mu > 0 and nu < 0, got mu={mu}, nu={nu}")

        def quartic(x: float) -> float:
            return x ** 4 + sigma * x ** 2 - mu * x + nu

        a = float(optimize.bisect(quartic, 0.0, 1.0 + abs(sigma) + abs(mu) + abs(nu), xtol=1e-15, maxiter=500))
        if not a > 0.0:
            raise VerificationError("quartic", f"root a={a} is not positive")
        b = math.sqrt(-nu) / a
        c = math.sqrt(mu / a)

        logger.info("Step 3: Assembling A and comparing characteristic polynomials...")
        A = np.array(
            [
                [0.0, -b, 0.0, -c],
                [b, 0.0, 0.0, 0.0],
                [0.0, 0.0, -a, 0.0],
                [c, 0.0, 0.0, a],
            ]
        )
        charpoly_A = [float(x) for x in np.poly(A).real]
        charpoly_B = [1.0, 0.0, sigma, mu, nu]
        deviation = max(abs(x - y) for x, y in zip(charpoly_A, charpoly_B))
        if deviation > 1e-9:
            raise VerificationError("charpoly", f"p_A and p_B differ by {deviation:.3e}")
        trace_A = float(np.trace(A))
        if abs(trace_A) > 1e-12:
            raise VerificationError("trace", f"tr A = {trace_A:.3e}")

        logger.info("Step 4: Nullity and splitting tensor...")
        group = AlmostAbelianGroup(A=A, label="example5")
        nullity = self.aa_nullity(group)
        x2 = np.zeros((5, 1))
        x2[2, 0] = 1.0
        angle = max_principal_angle(nullity.basis, x2)
        if nullity.index != 1 or angle > 1e-7:
            raise VerificationError("nullity", f"expected span(X2), got index {nullity.index} at angle {angle:.3e}")

        curv = self.lie_metric.curvature(self.to_lie_metric(group))
        solved = self.nullity_solver.nullity_index(curv, 0.0)
        if solved.index != 1 or max_principal_angle(solved.basis, x2) > 1e-7:
            raise VerificationError("nullity", f"curvature-engine nullity disagrees (index {solved.index})")

        # C_{X2} xi = -(nabla_xi X2)^h, horizontal meaning orthogonal to the nullity
        derivative = self.connection(group)[0, 2]
        splitting = -(derivative - nullity.basis @ (nullity.basis.T @ derivative))
        if float(np.linalg.norm(splitting)) <= 1e-12:
            raise VerificationError("splitting", "splitting tensor vanishes on xi")

        logger.info("Step 5: Lattice criterion for exp(A)...")
        lattice = self.integrality_check(A, 1.0, "exponential")
        if not lattice.passed:
            raise VerificationError("lattice", f"exp(A) has non-integral characteristic polynomial {lattice.raw_coefficients}")

        logger.info(f"Nullity-one lattice group verified: a={a:.12g}, b={b:.12g}, c={c:.12g}")
        return Example5Report(
            alpha=alpha,
            beta=beta,
            gamma=gamma,
            sigma=sigma,
            mu=mu,
            nu=nu,
            a=a,
            b=b,
            c=c,
            A=A.tolist(),
            charpoly_A=charpoly_A,
            charpoly_B=charpoly_B,
            charpoly_deviation=deviation,
            trace_A=trace_A,
            nullity_index=nullity.index,
            nullity_basis=nullity.basis_vectors(),
            nullity_angle_to_X2=angle,
            splitting_vector=splitting.tolist(),
            C_eigenvalues=sorted((float(v.real), float(v.imag)) for v in values),
            lattice=lattice,
        )

    def nul1_group(self, m: int) -> Nul1Report:
        """
        A = diag(I_{m/2}, -I_{m/2}) with its (-1)-nullity and lattice witness

        Args:
            m: Even dimension of V, m >= 2

        Returns:
            Nul1Report

        Raises:
            InputError: If m is odd or < 2
        """
        if m < 2 or m % 2:
            raise InputError(f"nul1_group needs an even m >= 2, got {m}")
        half = m // 2
        A = np.diag([1.0] * half + [-1.0] * half)
        group = AlmostAbelianGroup(A=A, label=f"nul1-{m}")

        curv = self.aa_curvature(group)
        nullity = self.nullity_solver.nullity_index(self.lie_metric.curvature(self.to_lie_metric(group)), -1.0)
        nullity_ok = m < 4 or nullity.index == 1
        if not nullity_ok:
            logger.warning(f"expected (-1)-nullity 1 for m={m}, got {nullity.index}")

        witness = self.integrality_check(A, GOLDEN_LOG, "exponential")
        x = sympy.Symbol("x")
        expected = [int(c) for c in sympy.Poly((x ** 2 - 3 * x + 1) ** half, x).all_coeffs()]
        matches = witness.passed and witness.coefficients == expected

        logger.info(f"nul1 group m={m}: scal={curv.scal:.12g}, (-1)-nullity {nullity.index}, witness ok={matches}")
        return Nul1Report(
            m=m,
            A=A.tolist(),
            scal=curv.scal,
            nullity=nullity,
            nullity_ok=nullity_ok,
            witness=witness,
            expected_coefficients=expected,
            witness_matches=matches,
        )
