"""Command-line entry point: ``spinorbit {fig,design,check,sweep}``.

Exit codes: 0 success, 1 usage or invalid parameters, 2 non-convergence or a
failed acceptance criterion, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from pydantic import ValidationError

from .checks import CHECKS, run_checks
from .config import RunConfig, load_run_config
from .elements.quadrupole import NDFEB_SURFACE_FIELD, DESIGN_RATIO
from .errors import ConvergenceError, ParameterError, SpinOrbitError
from .pipeline import (
    DEFAULT_GRIDS,
    FIGURES,
    SWEEP_GRIDS,
    SWEEP_PARAMETERS,
    Grid,
    build_figure,
    design_report,
    parameter_sweep,
)
from .report.exporters import FORMATS, export_table
from .report.table import SweepTable

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

CONFIG_OVERRIDES = (
    "sigma_perp",
    "quadrature_order",
    "n_max_spp",
    "n_max_quad",
    "ell_window",
    "min_captured_probability",
    "gamma_n",
    "mass_n",
    "hbar",
)


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_options() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value run configuration file")
    common.add_argument("--out", type=Path, help="output file (stdout when omitted)")
    common.add_argument("--format", choices=FORMATS, help="table format")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    group = common.add_argument_group("run configuration overrides")
    group.add_argument("--sigma-perp", type=float, help="transverse coherence length, m")
    group.add_argument("--quadrature-order", type=int)
    group.add_argument("--n-max-spp", type=int)
    group.add_argument("--n-max-quad", type=int)
    group.add_argument("--ell-window", type=int)
    group.add_argument("--min-captured-probability", type=float)
    group.add_argument("--gamma-n", type=float)
    group.add_argument("--mass-n", type=float)
    group.add_argument("--hbar", type=float)
    return common


def _grid_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--from", dest="grid_from", type=float, help="grid start")
    parser.add_argument("--to", dest="grid_to", type=float, help="grid stop (inclusive)")
    parser.add_argument("--step", dest="grid_step", type=float, help="grid step")


def _angle_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ratio", type=float, default=DESIGN_RATIO, help="r_c / sigma_perp")
    parser.add_argument("--beta", type=float, default=math.pi, help="solenoid phase, rad")
    parser.add_argument("--theta", type=float, default=math.pi, help="second quadrupole rotation, rad")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _ArgumentParser(prog="spinorbit", description="Neutron spin-orbit simulations.")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    fig = commands.add_parser("fig", parents=[common], help="reproduce a figure table")
    fig.add_argument("number", type=int, choices=FIGURES)
    _grid_options(fig)
    _angle_options(fig)
    fig.add_argument("--sweep", choices=("beta", "theta"), default="beta", help="swept angle for fig 5")

    design = commands.add_parser("design", parents=[common], help="quadrupole design calculator")
    design.add_argument("--gradient", type=float, default=13.8, help="T/cm")
    design.add_argument("--length", type=float, default=10.0, help="cm")
    design.add_argument("--wavelength", type=float, default=0.271, help="nm")
    design.add_argument("--sigma", type=float, help="nm (defaults to the configured sigma_perp)")
    design.add_argument("--surface-field", type=float, default=NDFEB_SURFACE_FIELD, help="T")

    check = commands.add_parser("check", parents=[common], help="run the acceptance suite")
    check.add_argument(
        "--only",
        type=int,
        nargs="+",
        choices=range(1, len(CHECKS) + 1),
        metavar="N",
        help="criterion numbers to run",
    )

    sweep = commands.add_parser("sweep", parents=[common], help="generic parameter sweep")
    sweep.add_argument("--param", choices=SWEEP_PARAMETERS, required=True)
    _grid_options(sweep)
    _angle_options(sweep)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    overrides: Dict[str, Any] = {key: getattr(args, key, None) for key in CONFIG_OVERRIDES}
    overrides["output_path"] = args.out
    overrides["format"] = args.format
    return load_run_config(args.config, overrides)


def _grid(args: argparse.Namespace, default: Grid) -> Grid:
    return default.with_overrides(args.grid_from, args.grid_to, args.grid_step)


def _emit_table(table: SweepTable, config: RunConfig) -> None:
    text = export_table(table, config.output_path, config.format)
    if config.output_path is None:
        sys.stdout.write(text)


def _cmd_fig(args: argparse.Namespace, config: RunConfig) -> int:
    table = build_figure(
        args.number,
        config,
        _grid(args, DEFAULT_GRIDS[args.number]),
        ratio=args.ratio,
        beta=args.beta,
        theta=args.theta,
        sweep=args.sweep,
    )
    _emit_table(table, config)
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace, config: RunConfig) -> int:
    table = parameter_sweep(
        args.param,
        _grid(args, SWEEP_GRIDS[args.param]),
        config,
        ratio=args.ratio,
        beta=args.beta,
        theta=args.theta,
    )
    _emit_table(table, config)
    return EXIT_OK


def _cmd_design(args: argparse.Namespace, config: RunConfig) -> int:
    sigma_nm = args.sigma if args.sigma is not None else config.sigma_perp * 1e9
    report = design_report(
        args.gradient, args.length, args.wavelength, sigma_nm, config, surface_field=args.surface_field
    )
    if config.format == "jsonl":
        payload = {line.split(":", 1)[0]: line.split(":", 1)[1].strip() for line in report.lines()}
        text = json.dumps(payload) + "\n"
    else:
        text = "\n".join(report.lines()) + "\n"
    if config.output_path is not None:
        config.output_path.parent.mkdir(parents=True, exist_ok=True)
        config.output_path.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_check(args: argparse.Namespace, config: RunConfig) -> int:
    results = run_checks(config, args.only)
    text = "\n".join(result.line() for result in results) + "\n"
    if config.output_path is not None:
        config.output_path.parent.mkdir(parents=True, exist_ok=True)
        config.output_path.write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK if all(result.passed for result in results) else EXIT_NUMERICAL


COMMANDS = {
    "fig": _cmd_fig,
    "design": _cmd_design,
    "check": _cmd_check,
    "sweep": _cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    try:
        config = _resolve_config(args)
        return COMMANDS[args.command](args, config)
    except ConvergenceError as exc:
        print(f"spinorbit: {exc}", file=sys.stderr)
        print(exc.tail_report(), file=sys.stderr)
        return EXIT_NUMERICAL
    except (ParameterError, ValidationError) as exc:
        print(f"spinorbit: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpinOrbitError as exc:
        print(f"spinorbit: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"spinorbit: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


__all__ = ["EXIT_IO", "EXIT_NUMERICAL", "EXIT_OK", "EXIT_USAGE", "build_parser", "main"]
