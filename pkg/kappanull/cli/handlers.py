"""
Command handlers
Each handler turns parsed arguments into a report and an exit code
"""
import argparse
import json
from pathlib import Path
from typing import Any, Callable, Tuple

import numpy as np
from loguru import logger

from kappanull.cli.parser import EXIT_OK, EXIT_VALIDATION
from kappanull.models import LieMetricSpace, MilnorTriple, SplittingState
from kappanull.services import (
    AlmostAbelianService,
    InputError,
    LieMetricService,
    ModelCatalogService,
    NullitySolverService,
    SplittingFlowService,
)
from kappanull.utils import write_csv
from kappanull.utils.linalg import max_principal_angle


class CommandHandler:
    """Dispatches subcommands to the services"""

    def __init__(
        self,
        lie_metric: LieMetricService,
        nullity_solver: NullitySolverService,
        splitting_flow: SplittingFlowService,
        almost_abelian: AlmostAbelianService,
        catalog: ModelCatalogService,
    ):
        """
        Initialize command handler

        Args:
            lie_metric: Curvature engine
            nullity_solver: Nullity solver
            splitting_flow: Splitting flow service
            almost_abelian: Almost-Abelian service
            catalog: Model catalogue
        """
        self.lie_metric = lie_metric
        self.nullity_solver = nullity_solver
        self.splitting_flow = splitting_flow
        self.almost_abelian = almost_abelian
        self.catalog = catalog

        self._handlers: dict[str, Callable[[argparse.Namespace], Tuple[Any, int]]] = {
            "validate": self.handle_validate,
            "curvature": self.handle_curvature,
            "nullity": self.handle_nullity,
            "nullity-scan": self.handle_nullity_scan,
            "growth": self.handle_growth,
            "milnor": self.handle_milnor,
            "table-check": self.handle_table_check,
            "splitting": self.handle_splitting,
            "aa": self.handle_aa,
            "aa-nullity": self.handle_aa_nullity,
            "lattice": self.handle_lattice,
            "example5": self.handle_example5,
            "nul1-group": self.handle_nul1_group,
            "radon-hurwitz": self.handle_radon_hurwitz,
            "blowup": self.handle_blowup,
        }

    def handle(self, args: argparse.Namespace) -> Tuple[Any, int]:
        """
        Run one subcommand

        Returns:
            Tuple of (report, exit_code)
        """
        logger.info(f"Running {args.command}")
        return self._handlers[args.command](args)

    # Input loading

    @staticmethod
    def _read_json(path: str) -> dict:
        try:
            return json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise InputError(f"Input file not found: {path}")
        except json.JSONDecodeError as e:
            raise InputError(f"Invalid JSON in {path}: {e}")

    def _load_space(self, args: argparse.Namespace) -> LieMetricSpace:
        if getattr(args, "catalog", None):
            return self.catalog.catalog(args.catalog)
        data = self._read_json(args.input)
        try:
            return LieMetricSpace.from_json_dict(data)
        except KeyError as e:
            raise InputError(f"Missing field in algebra JSON: {e}")

    def _load_group(self, args: argparse.Namespace):
        return self.almost_abelian.from_matrix_json(self._read_json(args.input))

    def _curvature(self, args: argparse.Namespace):
        space = self._load_space(args)
        return space, self.lie_metric.curvature(space)

    # Handlers

    def handle_validate(self, args: argparse.Namespace) -> Tuple[Any, int]:
        report = self.lie_metric.validate_algebra(self._load_space(args))
        return report, EXIT_OK if report.passed else EXIT_VALIDATION

    def handle_curvature(self, args: argparse.Namespace) -> Tuple[Any, int]:
        space, curv = self._curvature(args)
        n = space.dim
        frame = np.eye(n)
        sectional = {
            f"K{i}{j}": self.lie_metric.sectional_curvature(curv, frame[i], frame[j])
            for i in range(n)
            for j in range(i + 1, n)
        } if np.allclose(space.gram, np.eye(n)) else {}
        return {
            "label": space.label,
            "dim": n,
            "scal": curv.scal,
            "ricci": curv.ricci,
            "sectional": sectional,
            "riemann": curv.riem.reshape(n * n, n * n),
            "residuals": self.lie_metric.curvature_operator_residuals(curv),
        }, EXIT_OK

    def handle_nullity(self, args: argparse.Namespace) -> Tuple[Any, int]:
        _, curv = self._curvature(args)
        result = self.nullity_solver.nullity_index(curv, args.kappa, args.tol)
        return result.to_report(), EXIT_OK

    def handle_nullity_scan(self, args: argparse.Namespace) -> Tuple[Any, int]:
        _, curv = self._curvature(args)
        return self.nullity_solver.kappa_scan(curv, args.range, args.tol), EXIT_OK

    def handle_growth(self, args: argparse.Namespace) -> Tuple[Any, int]:
        space = self._load_space(args)
        if args.span is not None:
            if any(not 0 <= i < space.dim for i in args.span):
                raise InputError(f"span indices must lie in 0..{space.dim - 1}")
            vectors = np.eye(space.dim)[:, args.span]
        else:
            curv = self.lie_metric.curvature(space)
            vectors = self.nullity_solver.conullity_basis(self.nullity_solver.nullity_index(curv, args.kappa, args.tol))
            if vectors.shape[1] == 0:
                raise InputError(f"conullity of N_{args.kappa:g} is zero")
        return self.lie_metric.growth_vector(space, vectors), EXIT_OK

    def handle_milnor(self, args: argparse.Namespace) -> Tuple[Any, int]:
        if len(args.lam) != 3:
            raise InputError("--lambda needs three comma-separated values")
        l1, l2, l3 = args.lam
        report = self.catalog.milnor_report(MilnorTriple(lambda1=l1, lambda2=l2, lambda3=l3))
        if args.table_check is None:
            return report, EXIT_OK
        family, theta = args.table_check
        row = self.catalog.table_row_check(family, theta)
        triple = row.triple.as_tuple()
        matches = bool(np.allclose(sorted(triple), sorted(args.lam), atol=1e-12))
        if not matches:
            row.flags.append(f"--lambda {args.lam} is not the row triple {list(triple)}")
        report["table_check"] = row
        return report, EXIT_OK if row.passed and matches else EXIT_VALIDATION

    def handle_table_check(self, args: argparse.Namespace) -> Tuple[Any, int]:
        family, theta = args.row
        row = self.catalog.table_row_check(family, theta)
        return row, EXIT_OK if row.passed else EXIT_VALIDATION

    def _splitting_state(self, args: argparse.Namespace) -> SplittingState:
        data = None if args.catalog else self._read_json(args.input)
        if data is not None and "C0" in data:
            kappa = data.get("kappa", args.kappa)
            if kappa is None:
                raise InputError("state JSON needs a kappa (or pass --kappa)")
            return SplittingState(kappa=float(kappa), C0=data["C0"])

        if args.kappa is None:
            raise InputError("--kappa is required to derive C0 from an algebra")
        space = self.catalog.catalog(args.catalog) if args.catalog else LieMetricSpace.from_json_dict(data)
        curv = self.lie_metric.curvature(space)
        nullity = self.nullity_solver.nullity_index(curv, args.kappa, args.tol)
        C0 = self.nullity_solver.splitting_tensor(curv, nullity)
        return SplittingState(kappa=args.kappa, C0=C0)

    def handle_splitting(self, args: argparse.Namespace) -> Tuple[Any, int]:
        state = self._splitting_state(args)
        trace = self.splitting_flow.trace(state, args.range, args.kd0)
        report: dict[str, Any] = {
            "kappa": state.kappa,
            "C0": state.matrix,
            "first_singularity": self.splitting_flow.first_singularity(state),
        }
        if state.kappa == -1.0:
            report["trace_limits"] = self.splitting_flow.trace_limits(state.matrix)
        if args.csv:
            path = write_csv(args.csv, trace.header, trace.rows)
            logger.info(f"Trace written to {path}")
            report["csv"] = str(path)
        else:
            report["header"] = trace.header
            report["rows"] = trace.rows
        return report, EXIT_OK

    def handle_aa(self, args: argparse.Namespace) -> Tuple[Any, int]:
        group = self._load_group(args)
        closed = self.almost_abelian.aa_curvature(group)
        generic = self.lie_metric.curvature(self.almost_abelian.to_lie_metric(group))
        return {
            "m": group.m,
            "scal": closed.scal,
            "ricci": closed.ricci,
            "ricci_xi_xi": float(closed.ricci[0, 0]),
            "oracle_max_difference": float(np.max(np.abs(closed.riem - generic.riem))),
        }, EXIT_OK

    def handle_aa_nullity(self, args: argparse.Namespace) -> Tuple[Any, int]:
        group = self._load_group(args)
        closed = self.almost_abelian.aa_nullity(group)
        curv = self.lie_metric.curvature(self.almost_abelian.to_lie_metric(group))
        generic = self.nullity_solver.nullity_index(curv, 0.0, args.tol)
        report = closed.to_report()
        report["solver_index"] = generic.index
        report["solver_angle"] = max_principal_angle(closed.basis, generic.basis)
        return report, EXIT_OK

    def handle_lattice(self, args: argparse.Namespace) -> Tuple[Any, int]:
        group = self._load_group(args)
        if args.lam is not None:
            result = self.almost_abelian.integrality_check(group.matrix, args.lam, args.mode)
            return result, EXIT_OK if result.passed else EXIT_VALIDATION
        if args.mode != "exponential":
            raise InputError("the lambda search runs in exponential mode")
        found = self.almost_abelian.lattice_lambda_search(group.matrix, args.bound)
        return {"bound": args.bound, "candidates": found}, EXIT_OK

    def handle_example5(self, args: argparse.Namespace) -> Tuple[Any, int]:
        return self.almost_abelian.construct_example5(), EXIT_OK

    def handle_nul1_group(self, args: argparse.Namespace) -> Tuple[Any, int]:
        report = self.almost_abelian.nul1_group(args.m)
        return report, EXIT_OK if report.witness_matches and report.nullity_ok else EXIT_VALIDATION

    def handle_radon_hurwitz(self, args: argparse.Namespace) -> Tuple[Any, int]:
        report: dict[str, Any] = {"m": args.m, "rho": self.nullity_solver.radon_hurwitz(args.m)}
        if args.n is not None or args.d is not None:
            if args.n is None or args.d is None:
                raise InputError("--n and --d go together")
            report["obstruction"] = {
                "n": args.n,
                "d": args.d,
                "allowed": self.nullity_solver.rh_obstruction_check(args.n, args.d),
            }
        return report, EXIT_OK

    def handle_blowup(self, args: argparse.Namespace) -> Tuple[Any, int]:
        return self.splitting_flow.scalar_riccati_blowup(args.beta0, args.delta), EXIT_OK
