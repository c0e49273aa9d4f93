"""
Command-line entry point.

    kzassoc compute --N 4 --degree 5 --out build/
    kzassoc verify --N 2
    kzassoc verify-all --out report.json
    kzassoc dims --degree 4
    kzassoc oracle --N 2 --degree 1
    kzassoc report report.json

Reports and series documents go to STDOUT (or ``--out``); JSON log records go to
STDERR.  Exit status: 0 pass, 1 fail, 2 usage/format error, 3 resource guard.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .config import (
    DEFAULT_PRECISION_BITS,
    DEFAULT_TERMS,
    ORACLE_DEGREE,
    ORACLE_EPSILON,
    ORACLE_TOLERANCE,
    T4_DEGREE,
    ConfigError,
    RunConfig,
)
from .errors import KzAssocError, ResourceGuardError
from .filters import RunContextFilter
from .ncseries import serialize
from .relations import AssociatorStore, VerificationReport, oracle_comparison, verify_all
from .setup import setup_logging
from .t4algebra import hilbert_dimensions

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

COMMANDS = ("compute", "verify", "verify-all", "dims", "oracle", "report")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kzassoc",
        description="Compute KZ and cyclotomic associators and verify their relations.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_numeric(sub):
        sub.add_argument("--N", type=int, default=4, help="level of the roots of unity")
        sub.add_argument("--degree", type=int, default=None, help="truncation degree")
        sub.add_argument("--prec-bits", type=int, default=DEFAULT_PRECISION_BITS)
        sub.add_argument("--terms", type=int, default=DEFAULT_TERMS, help="Taylor terms M")
        sub.add_argument("--point", type=Fraction, default=Fraction(1, 2),
                         help="interior evaluation point, e.g. 1/2")
        sub.add_argument("--cache", type=Path, default=None,
                         help="cache directory (default: $KZASSOC_CACHE_DIR or ~/.cache/kzassoc)")

    compute = subparsers.add_parser("compute", help="write associator series documents")
    add_numeric(compute)
    compute.add_argument("--out", type=Path, default=None, help="output directory")

    for name in ("verify", "verify-all"):
        sub = subparsers.add_parser(name, help="check the relation catalogue")
        add_numeric(sub)
        sub.add_argument("--tol", type=float, default=None, help="override every tolerance")
        sub.add_argument("--catalogue", type=Path, default=None, help="relation file")
        sub.add_argument("--relation", action="append", default=[],
                         help="run only this relation or group (repeatable)")
        sub.add_argument("--out", type=Path, default=None, help="write the JSON report here")

    dims = subparsers.add_parser("dims", help="dimensions of the truncated U(t4)")
    dims.add_argument("--degree", type=int, default=T4_DEGREE)
    dims.add_argument("--cache", type=Path, default=None)

    oracle = subparsers.add_parser("oracle", help="compare with the ODE propagator")
    add_numeric(oracle)
    oracle.add_argument("--tol", type=float, default=ORACLE_TOLERANCE)
    oracle.add_argument("--epsilon", type=float, default=ORACLE_EPSILON)

    report = subparsers.add_parser("report", help="re-render a saved JSON report")
    report.add_argument("path", type=Path)
    return parser


def config_from_args(args):
    return RunConfig(
        command=args.command,
        N=getattr(args, "N", 4),
        degree=getattr(args, "degree", None),
        precision_bits=getattr(args, "prec_bits", DEFAULT_PRECISION_BITS),
        terms=getattr(args, "terms", DEFAULT_TERMS),
        tolerance=getattr(args, "tol", None),
        point=getattr(args, "point", Fraction(1, 2)),
        catalogue=getattr(args, "catalogue", None),
        out=getattr(args, "out", None),
        cache=getattr(args, "cache", None),
        relations=tuple(getattr(args, "relation", ())),
    ).validate()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_compute(config):
    store = AssociatorStore.from_config(config)
    degree = config.compute_degree
    names = ["Phi", "PhiHalf"] if config.N == 1 else [f"Psi{config.N}"]
    documents = {}
    for name in names:
        held = store.holonomy(name, degree)
        documents[name] = serialize(held.series, held.metadata)
    if config.out is None:
        sys.stdout.write(documents[names[0]])
        return EXIT_PASS
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in documents.items():
        path = out / f"{name.lower()}.json"
        path.write_text(text, encoding="utf-8")
        logger.info("series written", extra={"data": {"series": name, "path": str(path)}})
    return EXIT_PASS


def _emit_report(report, config):
    sys.stdout.write(report.render_text())
    if config.out is not None:
        Path(config.out).write_text(report.serialize(), encoding="utf-8")
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_verify(config):
    return _emit_report(verify_all(config, level=config.N), config)


def cmd_verify_all(config):
    return _emit_report(verify_all(config), config)


def cmd_dims(config):
    store = AssociatorStore.from_config(config)
    degree = T4_DEGREE if config.degree is None else config.degree
    table = store.table(degree)
    expected = hilbert_dimensions(degree)
    sys.stdout.write(f"{'degree':>6} {'dimension':>10} {'hilbert':>10}\n")
    for k, (dimension, hilbert) in enumerate(zip(table.dimensions(), expected)):
        sys.stdout.write(f"{k:>6} {dimension:>10} {hilbert:>10}\n")
    defect = table.central_defect()
    sys.stdout.write(f"Z central: {'yes' if defect == 0 else f'no ({defect} basis words)'}\n")
    return EXIT_PASS if table.dimensions() == expected and defect == 0 else EXIT_FAIL


def cmd_oracle(config, epsilon=ORACLE_EPSILON):
    store = AssociatorStore.from_config(config)
    degree = ORACLE_DEGREE if config.degree is None else config.degree
    tolerance = ORACLE_TOLERANCE if config.tolerance is None else config.tolerance
    rows = oracle_comparison(config.N, degree, store, epsilon=epsilon)
    sys.stdout.write(f"{'word':<16} {'taylor':>34} {'oracle':>34} {'|diff|':>10}\n")
    for word, taylor, oracle, difference in rows:
        sys.stdout.write(f"{word:<16} {taylor:>34.15g} {oracle:>34.15g} {difference:>10.2e}\n")
    worst = max(difference for *_, difference in rows)
    sys.stdout.write(f"max |diff| = {worst:.3e} (tolerance {tolerance:.1e})\n")
    return EXIT_PASS if worst <= tolerance else EXIT_FAIL


def cmd_report(path):
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read report {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not JSON: {exc}") from exc
    report = VerificationReport.from_document(document)
    sys.stdout.write(report.render_text())
    return EXIT_PASS if report.passed else EXIT_FAIL


def run(args):
    if args.command == "report":
        return cmd_report(args.path)
    config = config_from_args(args)
    if args.command == "compute":
        return cmd_compute(config)
    if args.command == "verify":
        return cmd_verify(config)
    if args.command == "verify-all":
        return cmd_verify_all(config)
    if args.command == "dims":
        return cmd_dims(config)
    return cmd_oracle(config, args.epsilon)


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(
        context_filter=RunContextFilter(
            additional_context={
                "command": args.command,
                "precision_bits": getattr(args, "prec_bits", DEFAULT_PRECISION_BITS),
            }
        )
    )
    try:
        return run(args)
    except ResourceGuardError as exc:
        logger.error("resource guard refused the run", extra={"data": {"error": str(exc)}})
        sys.stderr.write(f"kzassoc: {exc}\n")
        return EXIT_RESOURCE
    except (KzAssocError, ConfigError) as exc:
        logger.error("run rejected", extra={"data": {"error": str(exc)}})
        sys.stderr.write(f"kzassoc: {exc}\n")
        return EXIT_USAGE


__all__ = [
    "COMMANDS",
    "EXIT_FAIL",
    "EXIT_PASS",
    "EXIT_RESOURCE",
    "EXIT_USAGE",
    "build_parser",
    "cmd_compute",
    "cmd_dims",
    "cmd_oracle",
    "cmd_report",
    "cmd_verify",
    "cmd_verify_all",
    "config_from_args",
    "main",
]
