"""
Kappa-nullity solver
Kernel of the stacked operator z -> (R(e_i,e_j)z + kappa(<e_i,z>e_j - <e_j,z>e_i))_{i<j},
kappa detection by grid scan plus golden-section refinement, Radon-Hurwitz numbers
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np
from scipy import linalg, optimize
from loguru import logger

from kappanull.config import Settings
from kappanull.models import CurvatureData, KappaSample, KappaScanResult, NullityResult
from kappanull.services.errors import InputError
from kappanull.utils.linalg import kernel_basis, metric_roots


class NullitySolverService:
    """Pointwise kappa-nullity of homogeneous (left-invariant) curvature data"""

    def __init__(self, settings: Optional[Settings] = None):
        """
        Initialize nullity solver

        Args:
            settings: Toolkit settings (if None, will load from environment)
        """
        if settings is None:
            from kappanull.config import get_settings
            settings = get_settings()

        self.settings = settings

    def operator(self, curv: CurvatureData, kappa: float) -> np.ndarray:
        """
        Stacked nullity operator in metric-orthonormal coordinates

        Rows: one n-block per frame pair i < j. Columns act on y with z = g^{-1/2} y.

        Args:
            curv: Curvature data
            kappa: Curvature constant

        Returns:
            (n(n-1)/2 * n, n) matrix
        """
        n = curv.dim
        gram = curv.metric
        root, inv_root = metric_roots(gram)
        eye = np.eye(n)
        blocks = []
        for i in range(n):
            for j in range(i + 1, n):
                # block[l, k]: e_l component of the image of e_k
                block = curv.endo[i, j].T + kappa * (np.outer(eye[j], gram[i]) - np.outer(eye[i], gram[j]))
                blocks.append(root @ block @ inv_root)
        if not blocks:
            return np.zeros((0, n))
        return np.vstack(blocks)

    def pencil_norms(self, curv: CurvatureData) -> tuple[float, float]:
        """Spectral norms of L_0 and of the kappa coefficient B = L_1 - L_0"""
        base = self.operator(curv, 0.0)
        if base.size == 0:
            return 0.0, 0.0
        slope = self.operator(curv, 1.0) - base
        return float(np.linalg.norm(base, 2)), float(np.linalg.norm(slope, 2))

    def pencil_scale(self, curv: CurvatureData, kappa: float, norms: Optional[tuple[float, float]] = None) -> float:
        """
        Kernel threshold scale max(|L_0|, |kappa| |B|) of the affine pencil L_kappa = L_0 + kappa B

        On a space form of curvature c, L_kappa = (kappa - c) B, so sigma_max of
        L_kappa itself collapses near kappa = c while this scale does not.
        """
        base_norm, slope_norm = self.pencil_norms(curv) if norms is None else norms
        return max(base_norm, abs(float(kappa)) * slope_norm)

    def nullity_index(
        self,
        curv: CurvatureData,
        kappa: float,
        tol: Optional[float] = None,
    ) -> NullityResult:
        """
        Index and orthonormal basis of N_kappa

        Args:
            curv: Curvature data of a validated space
            kappa: Curvature constant
            tol: Relative singular-value threshold (defaults to settings.rank_rtol)

        Returns:
            NullityResult
        """
        rtol = self.settings.rank_rtol if tol is None else tol
        _, inv_root = metric_roots(curv.metric)
        split = kernel_basis(self.operator(curv, kappa), rtol, self.pencil_scale(curv, kappa))

        if split.sigma_max == 0.0:
            logger.warning(f"Nullity operator vanishes identically at kappa={kappa}; whole space is N_kappa")

        kernel_y = split.basis
        complement_y = kernel_basis(kernel_y.T, rtol).basis if kernel_y.shape[1] else np.eye(curv.dim)
        if kernel_y.shape[1] == curv.dim:
            complement_y = np.zeros((curv.dim, 0))

        index = kernel_y.shape[1]
        logger.debug(f"nullity_index kappa={kappa}: index={index}, residual={split.residual:.3e}")
        return NullityResult(
            kappa=float(kappa),
            index=index,
            basis=inv_root @ kernel_y,
            conullity=inv_root @ complement_y,
            residual=split.residual,
            sigma_max=split.sigma_max,
        )

    def conullity_basis(self, result: NullityResult) -> np.ndarray:
        """Metric-orthonormal basis (columns) of D = N_kappa^perp"""
        return result.conullity

    def membership_residual(self, curv: CurvatureData, kappa: float, z: Sequence[float]) -> float:
        """Max over frame pairs of |R(e_i,e_j)z + kappa(<e_i,z>e_j - <e_j,z>e_i)| (orthonormal norm)"""
        image = self.operator(curv, kappa) @ (metric_roots(curv.metric)[0] @ np.asarray(z, dtype=float))
        if image.size == 0:
            return 0.0
        return float(np.max(np.linalg.norm(image.reshape(-1, curv.dim), axis=1)))

    def _sigma_pair(self, curv: CurvatureData, kappa: float) -> tuple[float, float, np.ndarray]:
        matrix = self.operator(curv, kappa)
        n = curv.dim
        if matrix.size == 0:
            return 0.0, 0.0, np.zeros(n)
        s = linalg.svdvals(matrix)
        padded = np.zeros(n)
        padded[: min(n, s.size)] = s[:n]
        return float(padded[-1]), float(padded[0]), padded

    def _sample(self, curv: CurvatureData, kappa: float, rtol: float, scale: float) -> KappaSample:
        sigma_min, sigma_max, padded = self._sigma_pair(curv, kappa)
        if sigma_max == 0.0:
            index = curv.dim
        else:
            index = int(np.sum(padded <= rtol * max(scale, sigma_max)))
        return KappaSample(kappa=float(kappa), sigma_min=sigma_min, index=index)

    def kappa_scan(
        self,
        curv: CurvatureData,
        grid: Sequence[float],
        tol: Optional[float] = None,
    ) -> KappaScanResult:
        """
        Locate the kappa values with nonzero nullity

        sigma_min(L_kappa) is sampled on the grid; local minima with
        sigma_min <= scan_threshold * pencil_scale are refined by golden-section
        search and re-tested with nullity_index.

        Args:
            curv: Curvature data
            grid: Kappa samples (non-empty)
            tol: Relative kernel threshold

        Returns:
            KappaScanResult
        """
        grid = [float(k) for k in grid]
        if not grid:
            raise InputError("kappa grid must be non-empty")
        grid = sorted(grid)
        rtol = self.settings.rank_rtol if tol is None else tol

        logger.info(f"Scanning {len(grid)} kappa values in [{grid[0]}, {grid[-1]}]")
        norms = self.pencil_norms(curv)
        scale = np.array([self.pencil_scale(curv, k, norms) for k in grid])
        workers = max(1, self.settings.scan_workers)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="kappanull-scan") as executor:
                samples = list(executor.map(lambda k, s: self._sample(curv, k, rtol, s), grid, scale))
        else:
            samples = [self._sample(curv, k, rtol, s) for k, s in zip(grid, scale)]

        sigma = np.array([sample.sigma_min for sample in samples])

        candidates: list[tuple[float, float]] = []
        detected: list[float] = []
        detected_index: list[int] = []

        for i, sample in enumerate(samples):
            left = sigma[i - 1] if i > 0 else np.inf
            right = sigma[i + 1] if i + 1 < len(samples) else np.inf
            if not (sigma[i] <= left and sigma[i] <= right):
                continue
            if i > 0 and sigma[i] == left:
                continue
            if scale[i] > 0.0 and sigma[i] > self.settings.scan_threshold * scale[i]:
                continue

            kappa_star = self._refine(curv, grid, i)
            candidates.append((kappa_star, self._sigma_pair(curv, kappa_star)[0]))
            result = self.nullity_index(curv, kappa_star, rtol)
            if result.index > 0 and not any(abs(kappa_star - k) <= 1e-8 for k in detected):
                detected.append(kappa_star)
                detected_index.append(result.index)

        if len(detected) > 1:
            logger.warning(f"More than one kappa with nonzero nullity detected: {detected}")
        logger.info(f"kappa scan detected {detected} with indices {detected_index}")
        return KappaScanResult(samples=samples, detected=detected, detected_index=detected_index, candidates=candidates)

    def _refine(self, curv: CurvatureData, grid: list[float], i: int) -> float:
        """Golden-section refinement of a grid minimum to width settings.golden_width"""
        if i == 0 or i == len(grid) - 1:
            return grid[i]
        center = grid[i]

        # Shift so the bracket sits near 1; golden's stopping rule is relative to |x|
        def objective(x: float) -> float:
            return self._sigma_pair(curv, center + (x - 1.0))[0]

        bracket = (1.0 + grid[i - 1] - center, 1.0, 1.0 + grid[i + 1] - center)
        f_left, f_center, f_right = (objective(x) for x in bracket)
        if not (f_center < f_left and f_center < f_right):
            return center

        x_star = optimize.golden(objective, brack=bracket, tol=self.settings.golden_width / 2.0)
        refined = float(center + (x_star - 1.0))
        # Exact zeros on the grid (flat directions) beat the refined point
        if f_center <= objective(x_star):
            return center
        return refined

    def radon_hurwitz(self, m: int) -> int:
        """
        Radon-Hurwitz number rho(m) = 2^c + 8d for m = odd * 2^(c + 4d), 0 <= c <= 3

        Raises:
            InputError: If m < 1
        """
        m = int(m)
        if m < 1:
            raise InputError(f"Radon-Hurwitz number needs m >= 1, got {m}")
        valuation = 0
        while m % 2 == 0:
            m //= 2
            valuation += 1
        c, d = valuation % 4, valuation // 4
        return 2 ** c + 8 * d

    def rh_obstruction_check(self, n: int, d: int) -> bool:
        """
        True iff rho(n - d) >= d + 1, i.e. positive-kappa nullity of conullity d is not obstructed

        Raises:
            InputError: Unless 1 <= d < n
        """
        if not 1 <= d < n:
            raise InputError(f"need 1 <= d < n, got n={n}, d={d}")
        return self.radon_hurwitz(n - d) >= d + 1

    def splitting_tensor(
        self,
        curv: CurvatureData,
        nullity: NullityResult,
        direction: Optional[Sequence[float]] = None,
    ) -> np.ndarray:
        """
        Splitting tensor C_T X = -(nabla_X T)^h on the conullity

        Args:
            curv: Curvature data (its connection coefficients are used)
            nullity: Nullity result with index >= 1 and a nonzero conullity
            direction: Vector inside N_kappa (defaults to the first basis vector)

        Returns:
            (k, k) matrix in the orthonormal conullity basis of `nullity`

        Raises:
            InputError: If there is no nullity, no conullity, or the direction leaves N_kappa
        """
        if nullity.index == 0:
            raise InputError("splitting tensor needs a nonzero nullity")
        if nullity.conullity.shape[1] == 0:
            raise InputError("splitting tensor needs a nonzero conullity")

        gram = curv.metric
        basis = nullity.basis
        if direction is None:
            T = basis[:, 0]
        else:
            T = np.asarray(direction, dtype=float)
            projected = basis @ (basis.T @ gram @ T)
            if np.linalg.norm(T - projected) > 1e-8 * max(1.0, float(np.linalg.norm(T))):
                raise InputError("direction is not tangent to the nullity distribution")
            T = projected / np.sqrt(projected @ gram @ projected)

        D = nullity.conullity
        # nabla_{X_a} T for each conullity basis vector X_a
        derivatives = np.einsum("ia,j,ijk->ka", D, T, curv.gamma)
        return -(D.T @ gram @ derivatives)
