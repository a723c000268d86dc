# -*- coding: utf-8 -*-
"""
Command line interface

Reports go to stdout, log messages and errors to stderr. The exit status is 0 on
success, 1 when the mathematics fails (an axiom violation, a counterexample, a
missing augmentation) and 2 on bad input.
"""
from __future__ import annotations

# system imports
import argparse
import logging
import sys
from fractions import Fraction
from typing import Callable, Sequence

# local imports
from . import __version__
from .base import (
    AugmentationError,
    BLInftyError,
    BoundaryNotNilpotentError,
    MaurerCartanResidualError,
)
from .dsl import ModelParseError, format_model
from .main import Workbench
from .orbits import Certificate, is_trivial_cylinder
from .reports import (
    render_certificate,
    render_homology,
    render_linearized,
    render_reports,
    render_spectrum,
    render_torsion,
    render_vdim,
    render_weighted,
)

__all__ = ["main", "build_parser"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

Outcome = tuple[str, int]


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("model", help="model file, or the name of a shipped model")
    common.add_argument(
        "--trunc-letters", type=int, metavar="N", help="maximal letters per sentence"
    )
    common.add_argument(
        "--trunc-sentences",
        type=_positive_int,
        metavar="K",
        help="maximal words per sentence",
    )
    common.add_argument(
        "--action", type=Fraction, metavar="A", help="action window of sentences"
    )
    common.add_argument(
        "--novikov-order",
        type=Fraction,
        metavar="R",
        help="truncation order of Novikov and Maurer-Cartan series",
    )
    common.add_argument(
        "--threads", type=_positive_int, default=1, help="number of worker threads"
    )
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log progress to stderr, repeat for debug output",
    )

    parser = argparse.ArgumentParser(
        prog="blinfty",
        description="BL_∞ algebras of finite models and Reeb orbit spectra.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser(
        "check", parents=[common], help="verify the BL_∞ axiom and declared structures"
    )

    homology = commands.add_parser(
        "homology", parents=[common], help="homology of the filtration level k"
    )
    homology.add_argument("--level", type=_positive_int, default=1, metavar="k")

    torsion = commands.add_parser("torsion", parents=[common], help="torsion T(V)")
    torsion.add_argument("--kmax", type=_positive_int, metavar="K")

    deform = commands.add_parser(
        "deform", parents=[common], help="deform by the Maurer-Cartan element"
    )
    deform.add_argument(
        "--weights",
        type=_positive_int,
        metavar="k",
        help="report the weighted witness of order k instead",
    )

    commands.add_parser(
        "linearize", parents=[common], help="linearize at an augmentation"
    )

    spectrum = commands.add_parser(
        "spectrum", parents=[common], help="orbit spectrum of the model geometry"
    )
    spectrum.add_argument("--period", type=Fraction, metavar="D")

    vdim = commands.add_parser(
        "vdim", parents=[common], help="virtual dimension of a curve configuration"
    )
    vdim.add_argument("--positive", nargs="+", required=True, metavar="ORBIT")
    vdim.add_argument("--negative", nargs="*", default=[], metavar="ORBIT")
    vdim.add_argument("--genus", type=int, default=0)
    vdim.add_argument("--point-constraint", action="store_true")
    vdim.add_argument("--period", type=Fraction, metavar="D")

    certify = commands.add_parser(
        "certify", parents=[common], help="certify a torsion lower bound"
    )
    certify.add_argument("--m", type=int, default=1, metavar="m")
    certify.add_argument("--period", type=Fraction, metavar="D")

    return parser


def _check(bench: Workbench, args: argparse.Namespace) -> Outcome:
    reports = bench.check()
    status = EXIT_OK if all(reports) else EXIT_FAILED
    return render_reports(reports), status


def _homology(bench: Workbench, args: argparse.Namespace) -> Outcome:
    try:
        return render_homology(bench.homology(args.level)), EXIT_OK
    except BoundaryNotNilpotentError as exc:
        return f"BL_∞ axiom fails: {exc}", EXIT_FAILED


def _torsion(bench: Workbench, args: argparse.Namespace) -> Outcome:
    return render_torsion(bench.torsion(args.kmax)), EXIT_OK


def _deform(bench: Workbench, args: argparse.Namespace) -> Outcome:
    if args.weights is not None:
        return render_weighted(bench.weighted_witness(args.weights)), EXIT_OK
    try:
        deformed = bench.deform()
    except MaurerCartanResidualError as exc:
        return f"Maurer-Cartan equation fails: {exc}", EXIT_FAILED
    return format_model(bench.deformed_model(deformed)).rstrip("\n"), EXIT_OK


def _linearize(bench: Workbench, args: argparse.Namespace) -> Outcome:
    try:
        result = bench.linearize()
    except AugmentationError as exc:
        return f"no augmentation: {exc}", EXIT_FAILED
    status = EXIT_OK if result.report else EXIT_FAILED
    return render_linearized(result), status


def _spectrum(bench: Workbench, args: argparse.Namespace) -> Outcome:
    return render_spectrum(bench.spectrum(args.period)), EXIT_OK


def _vdim(bench: Workbench, args: argparse.Namespace) -> Outcome:
    query = bench.query(
        args.positive, args.negative, args.genus, args.point_constraint, args.period
    )
    return render_vdim(query, bench.vdim(query), is_trivial_cylinder(query)), EXIT_OK


def _certify(bench: Workbench, args: argparse.Namespace) -> Outcome:
    result = bench.certify(args.m, args.period)
    status = EXIT_OK if isinstance(result, Certificate) else EXIT_FAILED
    return render_certificate(result), status


COMMANDS: dict[str, Callable[[Workbench, argparse.Namespace], Outcome]] = {
    "check": _check,
    "homology": _homology,
    "torsion": _torsion,
    "deform": _deform,
    "linearize": _linearize,
    "spectrum": _spectrum,
    "vdim": _vdim,
    "certify": _certify,
}


def _configure_logging(verbosity: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )


def main(argv: Sequence[str] | None = None) -> int:
    """
    Runs one command.

    :param argv: Arguments without the program name, defaults to ``sys.argv[1:]``.
    :returns: The exit status.
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)

    overrides = {
        "max_letters": args.trunc_letters,
        "max_sentences": args.trunc_sentences,
        "action_bound": args.action,
        "order": args.novikov_order,
    }
    try:
        with Workbench(
            args.model,
            truncation=overrides,
            kmax=getattr(args, "kmax", None),
            threads=args.threads,
        ) as bench:
            text, status = COMMANDS[args.command](bench, args)
    except ModelParseError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except (BLInftyError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    print(text)
    return status
