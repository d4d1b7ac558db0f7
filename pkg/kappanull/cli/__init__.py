"""
Command-line module - argparse front door over the services
"""
import sys
from typing import Optional, Sequence

from loguru import logger
from numpy.linalg import LinAlgError
from pydantic import ValidationError

from kappanull.cli.handlers import CommandHandler
from kappanull.cli.parser import EXIT_NUMERICAL, EXIT_VALIDATION, UsageError, build_parser
from kappanull.config import Settings, get_settings
from kappanull.services import (
    AlmostAbelianService,
    InputError,
    LieMetricService,
    ModelCatalogService,
    NullitySolverService,
    NumericalError,
    SplittingFlowService,
)
from kappanull.utils import dumps_report, setup_logger


def build_handler(settings: Settings) -> CommandHandler:
    """Wire the services into a command handler"""
    lie_metric = LieMetricService(settings)
    nullity_solver = NullitySolverService(settings)
    almost_abelian = AlmostAbelianService(lie_metric, nullity_solver, settings)
    return CommandHandler(
        lie_metric=lie_metric,
        nullity_solver=nullity_solver,
        splitting_flow=SplittingFlowService(settings),
        almost_abelian=almost_abelian,
        catalog=ModelCatalogService(lie_metric, nullity_solver, almost_abelian, settings),
    )


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, run one subcommand and print its JSON report

    Returns:
        Exit code: 0 ok, 1 validation failure, 2 numerical failure, 64 usage
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(sys.argv[1:] if argv is None else argv))
    except UsageError as e:
        return e.code

    try:
        settings = get_settings()
        if args.tol is not None:
            settings = settings.with_overrides(rank_rtol=args.tol)
    except ValueError as e:
        setup_logger()
        logger.error(f"Configuration error: {e}")
        return EXIT_VALIDATION

    setup_logger(args.log_level or settings.log_level)

    try:
        report, code = build_handler(settings).handle(args)
    except (InputError, ValidationError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_VALIDATION
    except (NumericalError, LinAlgError) as e:
        logger.error(f"{args.command}: numerical failure: {e}")
        return EXIT_NUMERICAL

    sys.stdout.write(dumps_report(report) + "\n")
    return code


def main() -> None:
    """Console script entry point"""
    sys.exit(run())


__all__ = ["run", "main", "build_handler", "CommandHandler"]
