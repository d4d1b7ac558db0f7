"""
Argument parser for the kappanull command line
"""
import argparse
import sys
from typing import NoReturn

import numpy as np

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_USAGE = 64


class UsageError(Exception):
    """Raised instead of exiting when arguments are malformed"""

    def __init__(self, message: str, code: int = EXIT_USAGE):
        self.code = code
        super().__init__(message)


class KappaArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 64"""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)

    def exit(self, status: int = 0, message: str | None = None) -> NoReturn:
        if message:
            sys.stderr.write(message)
        raise UsageError(message or "", code=status)


def parse_range(text: str) -> np.ndarray:
    """'a:b:n' -> n samples from a to b inclusive"""
    try:
        a, b, n = text.split(":")
        count = int(n)
        start, stop = float(a), float(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b:n, got {text!r}")
    if count < 1:
        raise argparse.ArgumentTypeError("range needs at least one sample")
    return np.linspace(start, stop, count)


def parse_floats(text: str) -> list[float]:
    """Comma-separated floats"""
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def parse_indices(text: str) -> list[int]:
    """Comma-separated basis indices"""
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def parse_row(text: str) -> tuple[str, float]:
    """'FAMILY:theta' for table rows"""
    family, sep, theta = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected FAMILY:theta, got {text!r}")
    try:
        return family.strip().upper(), float(theta)
    except ValueError:
        raise argparse.ArgumentTypeError(f"theta must be a number, got {theta!r}")


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="relative kernel threshold (default from settings)")
    common.add_argument("--log-level", default=None, help="loguru level for stderr logging")
    return common


def _source(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--input", help="algebra JSON {dim, brackets, metric}")
    group.add_argument("--catalog", help="named catalogue entry (e.g. su2, berger, e11, perrone)")


def build_parser() -> KappaArgumentParser:
    """
    Build the kappanull parser with one subparser per command

    Returns:
        Configured parser
    """
    common = _common()
    parser = KappaArgumentParser(
        prog="kappanull",
        description="Curvature, kappa-nullity and splitting-tensor computations for left-invariant metrics",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=KappaArgumentParser)

    p = sub.add_parser("validate", parents=[common], help="check brackets, Jacobi identity and metric")
    _source(p)

    p = sub.add_parser("curvature", parents=[common], help="Riemann, Ricci, scalar and sectional curvature")
    _source(p)

    p = sub.add_parser("nullity", parents=[common], help="index and basis of N_kappa")
    _source(p)
    p.add_argument("--kappa", type=float, required=True)

    p = sub.add_parser("nullity-scan", parents=[common], help="detect kappa values with nonzero nullity")
    _source(p)
    p.add_argument("--range", type=parse_range, default=parse_range("-2:2:81"), help="kappa grid a:b:n")

    p = sub.add_parser("growth", parents=[common], help="growth vector of a distribution")
    _source(p)
    spanned = p.add_mutually_exclusive_group(required=True)
    spanned.add_argument("--span", type=parse_indices, help="basis indices spanning the distribution")
    spanned.add_argument("--kappa", type=float, help="use the conullity of N_kappa")

    p = sub.add_parser("milnor", parents=[common], help="Milnor triple geometry and classification")
    p.add_argument("--lambda", dest="lam", type=parse_floats, required=True, help="triple l1,l2,l3")
    p.add_argument("--table-check", type=parse_row, default=None, help="also check a table row FAMILY:theta")

    p = sub.add_parser("table-check", parents=[common], help="check a table row")
    p.add_argument("--row", type=parse_row, required=True, help="FAMILY:theta with FAMILY in T1F1, T1F2, T2")

    p = sub.add_parser("splitting", parents=[common], help="splitting tensor flow C(t)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--input", help='state JSON {"kappa", "C0"} or algebra JSON')
    group.add_argument("--catalog", help="named algebra; C0 is its splitting tensor at --kappa")
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--range", type=parse_range, default=parse_range("0:1:11"), help="time grid a:b:n")
    p.add_argument("--kd0", type=float, default=None, help="initial K_D for the conullity-2 evolution")
    p.add_argument("--csv", default=None, help="write the trace as CSV instead of embedding rows")

    p = sub.add_parser("aa", parents=[common], help="closed-form curvature of an almost-Abelian group")
    p.add_argument("--input", required=True, help='matrix JSON {"m", "A"}')

    p = sub.add_parser("aa-nullity", parents=[common], help="0-nullity of an almost-Abelian group")
    p.add_argument("--input", required=True, help='matrix JSON {"m", "A"}')

    p = sub.add_parser("lattice", parents=[common], help="characteristic-polynomial lattice criterion")
    p.add_argument("--input", required=True, help='matrix JSON {"m", "A"}')
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="check this scale; search when omitted")
    p.add_argument("--mode", choices=["linear", "exponential"], default="exponential")
    p.add_argument("--bound", type=int, default=10, help="largest |trace| tried by the search")

    sub.add_parser("example5", parents=[common], help="construct the unimodular group of 0-nullity 1")

    p = sub.add_parser("nul1-group", parents=[common], help="diag(I, -I) group with its lattice witness")
    p.add_argument("--m", type=int, required=True)

    p = sub.add_parser("radon-hurwitz", parents=[common], help="Radon-Hurwitz number and conullity obstruction")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, default=None, help="dimension for the obstruction check")
    p.add_argument("--d", type=int, default=None, help="conullity for the obstruction check")

    p = sub.add_parser("blowup", parents=[common], help="scalar Riccati blow-up bound")
    p.add_argument("--beta0", type=float, default=0.0)
    p.add_argument("--delta", type=float, default=1.0)

    return parser
