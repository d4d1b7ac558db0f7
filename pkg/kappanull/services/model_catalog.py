"""
Catalogue of named metric Lie algebras
Milnor frames and their classification, the table families, the conullity-2
frame family and the non-unimodular Sasakian algebra
"""
from typing import Optional

import numpy as np
from loguru import logger

from kappanull.config import Settings
from kappanull.models import (
    AlmostAbelianGroup,
    BracketTerm,
    CurvatureData,
    LieMetricSpace,
    MilnorTriple,
    NullityResult,
    TableRowExpectation,
    TableRowReport,
)
from kappanull.services.almost_abelian import AlmostAbelianService
from kappanull.services.errors import InputError
from kappanull.services.lie_metric import LieMetricService
from kappanull.services.nullity_solver import NullitySolverService
from kappanull.utils.linalg import max_principal_angle

SU2 = "SU(2)"
SL2 = "SL(2,R)~"
E11 = "E(1,1)"
E2 = "E(2)~"
NIL3 = "Nil3"
ABELIAN = "Abelian"
NON_UNIMODULAR = "non-unimodular"

FAMILIES = ("T1F1", "T1F2", "T2")

# Named entries built from Milnor triples
MILNOR_CATALOG = {
    "abelian3": (0.0, 0.0, 0.0),
    "su2": (2.0, 2.0, 2.0),
    "berger": (2.5, 2.0, 0.5),
    "heisenberg": (1.0, 0.0, 0.0),
    "e11": (0.0, -1.0, 1.0),
    "sl2-sasakian": (2.0, -1.0, -1.0),
    "nil-sasakian": (2.0, 0.0, 0.0),
}


class ModelCatalogService:
    """Builds named algebras and checks them against tabulated geometry"""

    def __init__(
        self,
        lie_metric: Optional[LieMetricService] = None,
        nullity_solver: Optional[NullitySolverService] = None,
        almost_abelian: Optional[AlmostAbelianService] = None,
        settings: Optional[Settings] = None,
    ):
        """
        Initialize model catalogue

        Args:
            lie_metric: Curvature engine (if None, will create new)
            nullity_solver: Nullity solver (if None, will create new)
            almost_abelian: Almost-Abelian service (if None, will create new)
            settings: Toolkit settings (if None, will load from environment)
        """
        if settings is None:
            from kappanull.config import get_settings
            settings = get_settings()

        self.settings = settings
        self.lie_metric = lie_metric or LieMetricService(settings)
        self.nullity_solver = nullity_solver or NullitySolverService(settings)
        self.almost_abelian = almost_abelian or AlmostAbelianService(self.lie_metric, self.nullity_solver, settings)

    def milnor_algebra(self, triple: MilnorTriple, label: str = "") -> LieMetricSpace:
        """[e1,e2] = l3 e3, [e2,e3] = l1 e1, [e3,e1] = l2 e2 on an orthonormal frame"""
        l1, l2, l3 = triple.as_tuple()
        terms = [
            BracketTerm(i=0, j=1, k=2, c=l3),
            BracketTerm(i=1, j=2, k=0, c=l1),
            BracketTerm(i=0, j=2, k=1, c=-l2),
        ]
        return LieMetricSpace(
            dim=3,
            structure=tuple(term for term in terms if term.c != 0.0),
            label=label or f"milnor({l1:g},{l2:g},{l3:g})",
        )

    def classify_unimodular(self, triple: MilnorTriple) -> str:
        """
        Group of a Milnor triple from its sign pattern

        Reversing the orientation of the frame flips all three signs at once,
        so the label depends only on the pattern up to permutation and a global flip.
        """
        values = triple.as_tuple()
        scale = max(1.0, max(abs(v) for v in values))
        signs = [0 if abs(v) <= 1e-9 * scale else (1 if v > 0 else -1) for v in values]
        nonzero = [s for s in signs if s != 0]

        if not nonzero:
            return ABELIAN
        if len(nonzero) == 1:
            return NIL3
        if len(nonzero) == 2:
            return E2 if nonzero[0] == nonzero[1] else E11
        return SU2 if len(set(nonzero)) == 1 else SL2

    def classify(self, space: LieMetricSpace) -> str:
        """
        Group label of a 3-dimensional metric Lie algebra

        Raises:
            InputError: If the algebra is not 3-dimensional
        """
        if space.dim != 3:
            raise InputError(f"classification is for 3-dimensional algebras, got dim {space.dim}")
        if not self.lie_metric.is_unimodular(space):
            return NON_UNIMODULAR
        return self.classify_unimodular(self.lie_metric.milnor_triple_of(space))

    def conullity2_frame(self, F: float) -> LieMetricSpace:
        """
        Frame (T, X, Y) with [X,Y] = 2F T, [T,X] = -X + 2F Y, [T,Y] = Y

        T spans the (-1)-nullity; F = 0 is E(1,1), F != 0 is SL(2,R)~.
        """
        terms = [
            BracketTerm(i=1, j=2, k=0, c=2.0 * F),
            BracketTerm(i=0, j=1, k=1, c=-1.0),
            BracketTerm(i=0, j=1, k=2, c=2.0 * F),
            BracketTerm(i=0, j=2, k=2, c=1.0),
        ]
        return LieMetricSpace(
            dim=3,
            structure=tuple(term for term in terms if term.c != 0.0),
            label=f"conullity2(F={F:g})",
        )

    def perrone_algebra(self, alpha: float) -> LieMetricSpace:
        """
        [e1,e2] = alpha e2 + 2 xi, xi central, on the orthonormal frame (e1, e2, xi)

        Isometric to the Milnor metric (2, -alpha^2/2, -alpha^2/2) without being isomorphic to it.

        Raises:
            InputError: If alpha = 0
        """
        if alpha == 0:
            raise InputError("alpha must be nonzero")
        terms = (
            BracketTerm(i=0, j=1, k=1, c=float(alpha)),
            BracketTerm(i=0, j=1, k=2, c=2.0),
        )
        return LieMetricSpace(dim=3, structure=terms, label=f"perrone(alpha={alpha:g})")

    def catalog(self, name: str) -> LieMetricSpace:
        """
        Named entry: abelian3, su2, berger, heisenberg, e11, sl2-sasakian,
        nil-sasakian, perrone, conullity2, example5, nul1-<m>

        Raises:
            InputError: If the name is unknown
        """
        key = name.strip().lower()
        if key in MILNOR_CATALOG:
            l1, l2, l3 = MILNOR_CATALOG[key]
            return self.milnor_algebra(MilnorTriple(lambda1=l1, lambda2=l2, lambda3=l3), label=key)
        if key == "perrone":
            return self.perrone_algebra(1.0)
        if key == "conullity2":
            return self.conullity2_frame(0.0)
        if key == "example5":
            report = self.almost_abelian.construct_example5()
            return self.almost_abelian.to_lie_metric(AlmostAbelianGroup(A=report.A, label="example5"))
        if key.startswith("nul1-"):
            try:
                m = int(key.split("-", 1)[1])
            except ValueError:
                raise InputError(f"Unknown catalog entry: {name}")
            report = self.almost_abelian.nul1_group(m)
            return self.almost_abelian.to_lie_metric(AlmostAbelianGroup(A=report.A, label=key))
        raise InputError(f"Unknown catalog entry: {name}")

    def plane_curvature(self, curv: CurvatureData, nullity: NullityResult) -> float:
        """
        Sectional curvature K_D of a 2-dimensional conullity

        Raises:
            InputError: If the conullity is not 2-dimensional
        """
        D = nullity.conullity
        if D.shape[1] != 2:
            raise InputError(f"K_D needs a 2-dimensional conullity, got {D.shape[1]}")
        return self.lie_metric.sectional_curvature(curv, D[:, 0], D[:, 1])

    @staticmethod
    def table_expectation(family: str, theta: float) -> tuple[MilnorTriple, TableRowExpectation]:
        """
        Triple and tabulated values for one row

        Raises:
            InputError: If the family is unknown or theta violates its range
        """
        if family == "T1F1":
            if not theta > 0:
                raise InputError(f"T1F1 needs theta > 0, got {theta}")
            triple = (theta + 1.0 / theta, theta, 1.0 / theta)
            expectation = TableRowExpectation(
                family=family, theta=theta, group=SU2, scal=2.0, plane_curvature=-1.0,
                nullity_kappa=1.0, nullity_index=1, nullity_direction=[1.0, 0.0, 0.0],
            )
        elif family == "T1F2":
            triple = (2.0, theta, theta)
            group = SU2 if theta > 0 else (NIL3 if theta == 0 else SL2)
            expectation = TableRowExpectation(
                family=family, theta=theta, group=group, scal=-2.0 + 4.0 * theta,
                plane_curvature=-3.0 + 2.0 * theta, nullity_kappa=1.0, nullity_index=1,
                nullity_direction=[1.0, 0.0, 0.0],
            )
        elif family == "T2":
            if not 0 < theta <= 1:
                raise InputError(f"T2 needs 0 < theta <= 1, got {theta}")
            triple = (theta - 1.0 / theta, -1.0 / theta, theta)
            expectation = TableRowExpectation(
                family=family, theta=theta, group=E11 if theta == 1 else SL2, scal=-2.0,
                plane_curvature=1.0, nullity_kappa=-1.0, nullity_index=1,
                nullity_direction=[1.0, 0.0, 0.0] if theta == 1 else None,
            )
        else:
            raise InputError(f"Unknown table family {family!r}; expected one of {', '.join(FAMILIES)}")
        l1, l2, l3 = triple
        return MilnorTriple(lambda1=l1, lambda2=l2, lambda3=l3), expectation

    def table_row_check(self, family: str, theta: float, tol: float = 1e-9) -> TableRowReport:
        """
        Compare curvature, nullity and classification against a table row

        Mismatches are recorded in `checks`/`flags`, not raised.

        Args:
            family: T1F1, T1F2 or T2
            theta: Row parameter
            tol: Absolute tolerance of the numeric comparisons

        Returns:
            TableRowReport
        """
        triple, expected = self.table_expectation(family, float(theta))
        space = self.milnor_algebra(triple, label=f"{family}(theta={theta:g})")
        logger.info(f"Checking {family} at theta={theta}: triple {triple.as_tuple()}")

        curv = self.lie_metric.curvature(space)
        nullity = self.nullity_solver.nullity_index(curv, expected.nullity_kappa)
        group = self.classify(space)

        if family == "T2":
            plane = self.plane_curvature(curv, nullity) if nullity.index == 1 else float("nan")
        else:
            plane = self.lie_metric.sectional_curvature(curv, [0.0, 1.0, 0.0], [0.0, 0.0, 1.0])

        grid = np.linspace(-2.0, 2.0, 81)
        scan = self.nullity_solver.kappa_scan(curv, grid)

        checks: dict[str, bool] = {
            "scal": abs(curv.scal - expected.scal) <= tol,
            "plane_curvature": abs(plane - expected.plane_curvature) <= tol,
            "nullity_index": nullity.index == expected.nullity_index,
            "group": group == expected.group,
            "kappa_detected": any(abs(k - expected.nullity_kappa) <= 1e-6 for k in scan.detected),
        }
        if expected.nullity_direction is not None and nullity.index == 1:
            direction = np.asarray(expected.nullity_direction)[:, None]
            checks["nullity_direction"] = max_principal_angle(nullity.basis, direction, curv.metric) <= 1e-7

        splitting_trace = splitting_det = None
        if nullity.index == 1:
            # Homogeneity keeps K_D constant, so tr C = 0 and det C = kappa unless K_D = kappa
            C = self.nullity_solver.splitting_tensor(curv, nullity)
            splitting_trace, splitting_det = float(np.trace(C)), float(np.linalg.det(C))
            kd = self.plane_curvature(curv, nullity)
            checks["scal_identity"] = abs(0.5 * curv.scal - (kd + 2.0 * expected.nullity_kappa)) <= tol
            if abs(kd - expected.nullity_kappa) > tol:
                checks["splitting_trace"] = abs(splitting_trace) <= 1e-8
                checks["splitting_det"] = abs(splitting_det - expected.nullity_kappa) <= 1e-8

        flags = [f"{name} check failed" for name, ok in checks.items() if not ok]
        if not checks["plane_curvature"]:
            flags.append(f"computed plane curvature {plane:.17g} differs from tabulated {expected.plane_curvature:g}")
        passed = not flags
        if passed:
            logger.info(f"{family} theta={theta} matches the table")
        else:
            logger.warning(f"{family} theta={theta}: {'; '.join(flags)}")

        return TableRowReport(
            expectation=expected,
            triple=triple,
            group=group,
            scal=curv.scal,
            plane_curvature=plane,
            nullity_index=nullity.index,
            nullity_basis=nullity.basis_vectors(),
            detected_kappas=scan.detected,
            splitting_trace=splitting_trace,
            splitting_det=splitting_det,
            checks=checks,
            flags=flags,
            passed=passed,
        )

    def milnor_report(self, triple: MilnorTriple) -> dict:
        """Curvature summary of a Milnor triple (used by the CLI)"""
        space = self.milnor_algebra(triple)
        curv = self.lie_metric.curvature(space)
        frame = np.eye(3)
        return {
            "triple": triple,
            "group": self.classify_unimodular(triple),
            "scal": curv.scal,
            "ricci": curv.ricci,
            "sectional": {
                "K12": self.lie_metric.sectional_curvature(curv, frame[0], frame[1]),
                "K13": self.lie_metric.sectional_curvature(curv, frame[0], frame[2]),
                "K23": self.lie_metric.sectional_curvature(curv, frame[1], frame[2]),
            },
        }


def perrone_theta(alpha: float) -> float:
    """Milnor parameter of the unimodular group isometric to the Perrone algebra"""
    return -alpha * alpha / 2.0
