"""
Curvature engine for left-invariant metrics
Koszul connection, Riemann/Ricci/scalar curvature and bracket filtrations from structure constants
"""
from typing import Optional, Sequence

import numpy as np
from scipy import linalg
from loguru import logger

from kappanull.config import Settings
from kappanull.models import CurvatureData, GrowthVector, LieMetricSpace, MilnorTriple, ValidationReport
from kappanull.services.errors import InputError, NumericalError
from kappanull.utils.linalg import column_span, metric_roots


class LieMetricService:
    """Curvature of left-invariant metrics given in an arbitrary (not necessarily orthonormal) frame"""

    def __init__(self, settings: Optional[Settings] = None):
        """
        Initialize curvature engine

        Args:
            settings: Toolkit settings (if None, will load from environment)
        """
        if settings is None:
            from kappanull.config import get_settings
            settings = get_settings()

        self.settings = settings

    def validate_algebra(self, space: LieMetricSpace) -> ValidationReport:
        """
        Check antisymmetry/consistency of the bracket data, Jacobi identity and the metric

        Args:
            space: Metric Lie algebra

        Returns:
            ValidationReport (failures are reported, not raised)
        """
        issues: list[str] = []

        antisymmetry = 0.0
        seen: dict[tuple[int, int, int], float] = {}
        for term in space.structure:
            if term.i == term.j:
                if term.c != 0.0:
                    antisymmetry = max(antisymmetry, abs(term.c))
                    issues.append(f"[e_{term.i}, e_{term.i}] has nonzero component {term.c} on e_{term.k}")
                continue
            key = (min(term.i, term.j), max(term.i, term.j), term.k)
            value = term.c if term.i < term.j else -term.c
            if key in seen:
                conflict = abs(seen[key] - value)
                if conflict > self.settings.symmetry_tol:
                    issues.append(
                        f"inconsistent duplicate for [e_{key[0]}, e_{key[1]}] on e_{key[2]}: {seen[key]} vs {value}"
                    )
                antisymmetry = max(antisymmetry, conflict)
            else:
                seen[key] = value

        jacobi = self.jacobi_residual(space)
        if jacobi > self.settings.jacobi_tol:
            issues.append(f"Jacobi identity residual {jacobi:.3e} exceeds {self.settings.jacobi_tol:.1e}")

        gram = space.gram
        asymmetry = float(np.max(np.abs(gram - gram.T)))
        if asymmetry > self.settings.symmetry_tol:
            issues.append(f"metric is not symmetric (max deviation {asymmetry:.3e})")
        min_eig = float(np.min(linalg.eigvalsh(0.5 * (gram + gram.T))))
        if min_eig <= self.settings.metric_eig_tol:
            issues.append(f"metric is not positive definite (min eigenvalue {min_eig:.3e})")

        passed = not issues
        if passed:
            logger.debug(f"Algebra {space.label or '<unnamed>'} (dim {space.dim}) passed validation")
        else:
            logger.warning(f"Algebra {space.label or '<unnamed>'} failed validation: {'; '.join(issues)}")

        return ValidationReport(
            passed=passed,
            antisymmetry_violation=antisymmetry,
            jacobi_residual=jacobi,
            metric_min_eigenvalue=min_eig,
            metric_asymmetry=asymmetry,
            issues=issues,
        )

    def jacobi_residual(self, space: LieMetricSpace) -> float:
        """Max over triples of |[e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]|"""
        c = space.structure_tensor
        if space.dim < 3:
            return 0.0
        cyclic = (
            np.einsum("jkm,imp->ijkp", c, c)
            + np.einsum("kim,jmp->ijkp", c, c)
            + np.einsum("ijm,kmp->ijkp", c, c)
        )
        return float(np.max(np.abs(cyclic)))

    def _require_valid(self, space: LieMetricSpace) -> None:
        report = self.validate_algebra(space)
        if not report.passed:
            raise InputError(f"Algebra failed validation: {'; '.join(report.issues)}")

    def koszul_connection(self, space: LieMetricSpace) -> np.ndarray:
        """
        Levi-Civita connection coefficients of the left-invariant metric

        <nabla_X Y, Z> = 1/2 (<[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y>) for left-invariant fields.

        Args:
            space: Validated metric Lie algebra

        Returns:
            gamma[i, j, k] with nabla_{e_i} e_j = sum_k gamma[i, j, k] e_k

        Raises:
            InputError: If the algebra fails validation
            NumericalError: If the metric cannot be inverted
        """
        self._require_valid(space)
        c = space.structure_tensor
        gram = space.gram

        flat = np.einsum("abl,lc->abc", c, gram)
        lowered = 0.5 * (flat - np.einsum("jki->ijk", flat) + np.einsum("kij->ijk", flat))
        try:
            inverse = linalg.inv(gram)
        except linalg.LinAlgError as e:
            logger.exception(f"Metric inversion failed: {e}")
            raise NumericalError(f"Singular metric: {e}")
        return np.einsum("ijk,kl->ijl", lowered, inverse)

    def curvature(self, space: LieMetricSpace) -> CurvatureData:
        """
        Riemann, Ricci and scalar curvature

        R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z; the
        connection coefficients are constant on left-invariant fields.

        Args:
            space: Validated metric Lie algebra

        Returns:
            CurvatureData
        """
        gamma = self.koszul_connection(space)
        c = space.structure_tensor
        gram = space.gram

        endo = (
            np.einsum("jkm,iml->ijkl", gamma, gamma)
            - np.einsum("ikm,jml->ijkl", gamma, gamma)
            - np.einsum("ijm,mkl->ijkl", c, gamma)
        )
        riem = np.einsum("ijkm,ml->ijkl", endo, gram)
        ricci = np.einsum("ijki->jk", endo)
        scal = float(np.einsum("jk,jk->", linalg.inv(gram), ricci))

        logger.debug(f"Curvature of {space.label or '<unnamed>'}: scal={scal:.12g}")
        return CurvatureData(gamma=gamma, endo=endo, riem=riem, ricci=ricci, scal=scal, metric=gram)

    def curvature_operator_residuals(self, curv: CurvatureData) -> dict[str, float]:
        """
        Violations of the algebraic curvature identities

        Returns:
            Max absolute violations keyed by identity name
        """
        riem = curv.riem
        inverse = linalg.inv(curv.metric)
        double_trace = float(np.einsum("il,jk,ijkl->", inverse, inverse, riem))
        return {
            "antisymmetry_first_pair": float(np.max(np.abs(riem + riem.transpose(1, 0, 2, 3)))),
            "antisymmetry_last_pair": float(np.max(np.abs(riem + riem.transpose(0, 1, 3, 2)))),
            "pair_symmetry": float(np.max(np.abs(riem - riem.transpose(2, 3, 0, 1)))),
            "first_bianchi": float(np.max(np.abs(riem + riem.transpose(1, 2, 0, 3) + riem.transpose(2, 0, 1, 3)))),
            "double_trace": abs(double_trace - curv.scal),
        }

    def sectional_curvature(
        self,
        curv: CurvatureData,
        u: Sequence[float],
        v: Sequence[float],
        metric: Optional[np.ndarray] = None,
    ) -> float:
        """
        Sectional curvature K = <R(u,v)v,u> / (|u|^2 |v|^2 - <u,v>^2)

        Args:
            curv: Curvature data
            u: First vector (frame coefficients)
            v: Second vector (frame coefficients)
            metric: Gram matrix (defaults to the one stored in curv)

        Returns:
            Sectional curvature of span(u, v)

        Raises:
            InputError: If u, v span a degenerate plane
        """
        gram = curv.metric if metric is None else np.asarray(metric, dtype=float)
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        uu, vv, uv = u @ gram @ u, v @ gram @ v, u @ gram @ v
        denominator = uu * vv - uv * uv
        if denominator <= self.settings.rank_rtol * max(uu * vv, np.finfo(float).tiny):
            raise InputError("Degenerate plane: vectors are linearly dependent")
        numerator = np.einsum("ijkl,i,j,k,l->", curv.riem, u, v, v, u)
        return float(numerator / denominator)

    def growth_vector(self, space: LieMetricSpace, distribution: np.ndarray) -> GrowthVector:
        """
        Dimensions of D^1 = D, D^{r+1} = D^r + [D, D^r] until stabilisation

        Args:
            space: Metric Lie algebra
            distribution: (n, k) matrix whose columns span D (or a list of k vectors)

        Returns:
            GrowthVector

        Raises:
            InputError: If the given vectors are linearly dependent
        """
        vectors = np.asarray(distribution, dtype=float)
        if vectors.ndim == 1:
            vectors = vectors[:, None]
        if vectors.shape[0] != space.dim and vectors.shape[1] == space.dim:
            vectors = vectors.T
        if vectors.shape[0] != space.dim:
            raise InputError(f"distribution vectors must have length {space.dim}")

        rtol = self.settings.rank_rtol
        base = column_span(vectors, rtol)
        if base.shape[1] != vectors.shape[1]:
            raise InputError("distribution vectors are linearly dependent")

        current = base
        dims = [current.shape[1]]
        for _ in range(space.dim):
            brackets = [space.bracket(d, w) for d in base.T for w in current.T]
            stacked = np.column_stack([current] + brackets) if brackets else current
            grown = column_span(stacked, rtol)
            if grown.shape[1] == current.shape[1]:
                break
            current = grown
            dims.append(current.shape[1])

        generating = dims[-1] == space.dim
        logger.debug(f"Growth vector {dims} (bracket-generating: {generating})")
        return GrowthVector(vector=dims, bracket_generating=generating, step=len(dims) if generating else None)

    def change_frame(self, space: LieMetricSpace, frame: np.ndarray) -> LieMetricSpace:
        """
        Re-express the algebra in the basis f_a = sum_i P[i, a] e_i

        Args:
            space: Metric Lie algebra
            frame: Invertible matrix P

        Returns:
            Same metric Lie algebra in the new frame
        """
        P = np.asarray(frame, dtype=float)
        try:
            P_inv = linalg.inv(P)
        except linalg.LinAlgError as e:
            raise InputError(f"Frame change matrix is singular: {e}")
        c = np.einsum("ia,jb,ijk,ck->abc", P, P, space.structure_tensor, P_inv)
        gram = P.T @ space.gram @ P
        return LieMetricSpace.from_arrays(c, 0.5 * (gram + gram.T), label=space.label, atol=1e-15)

    def orthonormalize(self, space: LieMetricSpace) -> LieMetricSpace:
        """Change to the metric-orthonormal frame g^{-1/2}"""
        _, inv_root = metric_roots(space.gram)
        return self.change_frame(space, inv_root)

    def is_unimodular(self, space: LieMetricSpace) -> bool:
        """tr ad_X = 0 for every basis vector"""
        traces = np.einsum("ikk->i", space.structure_tensor)
        scale = max(1.0, float(np.max(np.abs(space.structure_tensor))))
        return bool(np.max(np.abs(traces)) <= self.settings.symmetry_tol * scale)

    def milnor_triple_of(self, space: LieMetricSpace) -> MilnorTriple:
        """
        Milnor frame coefficients of a 3-dimensional unimodular metric algebra

        In an oriented orthonormal frame the bracket is [u, v] = L(u x v) with L
        self-adjoint; its eigenvalues are the Milnor triple.

        Args:
            space: 3-dimensional metric Lie algebra

        Returns:
            MilnorTriple, sorted decreasingly

        Raises:
            InputError: If the algebra is not 3-dimensional or not unimodular
        """
        if space.dim != 3:
            raise InputError(f"Milnor frames need a 3-dimensional algebra, got dim {space.dim}")
        if not self.is_unimodular(space):
            raise InputError("Milnor frames exist only for unimodular algebras")

        ortho = self.orthonormalize(space)
        c = ortho.structure_tensor
        L = np.column_stack([c[1, 2], c[2, 0], c[0, 1]])
        asymmetry = float(np.max(np.abs(L - L.T)))
        if asymmetry > 1e-8 * max(1.0, float(np.max(np.abs(L)))):
            logger.warning(f"Milnor map not self-adjoint (deviation {asymmetry:.3e})")
        values = np.sort(linalg.eigvalsh(0.5 * (L + L.T)))[::-1]
        return MilnorTriple(lambda1=float(values[0]), lambda2=float(values[1]), lambda3=float(values[2]))
