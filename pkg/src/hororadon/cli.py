"""Command line front end.

    hororadon transform --f ds:2 --grid 16x41
    hororadon spectrum --f bump:0,1,0,1 --lambda 2,0.8j
    hororadon verify kernel --seed 0 --out kernel.txt

Data goes to ``--out`` or stdout, diagnostics to stderr. Exit codes: 0 ok,
1 verification failed, 2 usage or invalid input, 3 quadrature failure.
"""
import argparse
import csv
import logging
import sys
from contextlib import contextmanager
from logging import getLogger
from math import pi
from pathlib import Path
from typing import Annotated, Any, Callable, Iterator, Sequence, TextIO

import numpy as np

from .config import settings, Check, at_least, positive, parse_flat, merged
from .errors import DomainError, HoroRadonError
from .families import is_group_family, load_family
from .funcspace import FunctionOnY, l1_norm
from .groupcase import GroupFunction, GroupPointPair, group_radon, slice_mass
from .radon import TransformGrid, dual_radon, inversion_multiplier_probe, radon_grid
from .sl2core import IDENTITY
from .specs import GridSpec, QuadratureSpec
from .spectral import ETA_E, ETA_W, identity_battery, write_identity_csv
from .variety import HoroPoint, PointY, section
from .verify import SUITES, run_suite


logger = getLogger(__name__)


EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_ACCURACY = 3

MULTIPLIER_CSV_HEADER = ("mode", "nu", "re", "im")


@settings
class RunConfig:
    command: str = "transform"
    # ``kind:arguments``, see hororadon.families
    family: str = ""
    suite: str = ""
    grid: Annotated[tuple[int, int], Check(at_least(2), "at least two points per axis")] = (16, 41)
    # Ξ grids span s ∈ [-height, height]
    height: Annotated[float, Check(positive, "height must be positive")] = 4.0
    lambdas: tuple[complex, ...] = (2.0,)
    window: Annotated[float, Check(positive, "window must be positive")] = 6.0
    seed: Annotated[int, Check(at_least(0), "seeds are non-negative")] = 0
    out: Path | None = None
    quadrature: QuadratureSpec

    def __check__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"RunConfig.command={self.command!r}: unknown command")

    def xi_grid(self) -> GridSpec:
        return GridSpec.horospheres(self.grid[0], self.grid[1], self.height)

    def y_grid(self) -> GridSpec:
        return GridSpec(lower=(0.0, -self.height), upper=(2 * pi, self.height),
                        points=self.grid, periodic=(True, False))


# *** argument parsing ********************************************************

def grid_shape(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    try:
        shape = tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected AxB, got {text!r}") from None
    if len(shape) != 2 or min(shape) < 2:
        raise argparse.ArgumentTypeError(f"expected AxB with A, B >= 2, got {text!r}")
    return shape


def lambda_list(text: str) -> tuple[complex, ...]:
    try:
        return tuple(complex(p.strip().replace(" ", "")) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of numbers, "
                                         f"got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--f", dest="family", help="function family id, e.g. ds:2 or bump:0,1,0,1")
    common.add_argument("--grid", type=grid_shape, help="grid shape AxB (angle x height)")
    common.add_argument("--height", type=float, help="Ξ grids span s in [-height, height]")
    common.add_argument("--lambda", dest="lambdas", type=lambda_list,
                        help="comma separated spectral parameters, e.g. 2,0.8j")
    common.add_argument("--tol", type=float, help="relative quadrature tolerance")
    common.add_argument("--window", type=float, help="A-integration window")
    common.add_argument("--seed", type=int, help="seed of random batteries")
    common.add_argument("--out", type=Path, help="output file (default: stdout)")
    common.add_argument("--config", type=Path, help="flat key = value config file")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(
        prog="hororadon",
        description="horospherical Radon transform on SL(2,R)/SO(1,1)")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("transform", parents=[common], help="ℛf on an (angle, s) grid")
    commands.add_parser("spectrum", parents=[common], help="Fourier-Radon identity sweep over λ")
    verify = commands.add_parser("verify", parents=[common], help="run a verification suite")
    verify.add_argument("suite", help=f"one of {', '.join(SUITES)}")
    commands.add_parser("dual", parents=[common], help="ℛ^∨ℛf on a grid over Y")
    commands.add_parser("multiplier", parents=[common], help="empirical multiplier of ℛ^∨ℛ")
    commands.add_parser("group-radon", parents=[common], help="transform of a function on G")
    return parser


def load_config(args: argparse.Namespace) -> tuple[RunConfig, dict[str, Any] | None]:
    """RunConfig from the config file, overridden by flags

    a ``family`` spelled out field by field in the file is returned
    separately, it loads through :func:`hororadon.families.load_family`.
    """
    data: dict[str, Any] = {}
    if args.config is not None:
        data = parse_flat(args.config.read_text())
    family_fields = data.pop("family") if isinstance(data.get("family"), dict) else None

    flags = {name: getattr(args, name, None)
             for name in ("family", "suite", "grid", "height", "lambdas", "window", "seed", "out")}
    flags = {name: value for name, value in flags.items() if value is not None}
    if flags.get("family"):
        family_fields = None
    flags["command"] = args.command
    if args.tol is not None:
        flags["quadrature"] = {"rel_tol": args.tol}
    return RunConfig(**merged(data, flags)), family_fields


def _configure_logging(verbosity: int):
    level = logging.WARNING - 10 * min(verbosity, 2)
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")


# *** commands ****************************************************************

@contextmanager
def _output(config: RunConfig, stdout: TextIO) -> Iterator[TextIO]:
    if config.out is None:
        yield stdout
        return
    with config.out.open("w", newline="") as stream:
        yield stream


def _family(config: RunConfig, fields: dict[str, Any] | None):
    if fields is None and not config.family:
        raise DomainError(f"{config.command} needs a function family (--f)")
    return load_family(fields if fields is not None else config.family)


def _function_on_y(config: RunConfig, fields: dict[str, Any] | None) -> FunctionOnY:
    family = _family(config, fields)
    if is_group_family(family):
        raise DomainError(f"{config.command} works on Y; {config.family!r} lives on G")
    return family.build()


def _function_on_g(config: RunConfig, fields: dict[str, Any] | None) -> GroupFunction:
    family = _family(config, fields)
    if not is_group_family(family):
        raise DomainError(f"group-radon works on G; {config.family!r} lives on Y")
    return family.build()


def cmd_transform(config: RunConfig, fields: dict[str, Any] | None, stdout: TextIO) -> int:
    f = _function_on_y(config, fields)
    transform = radon_grid(f, config.xi_grid(), config.quadrature)
    with _output(config, stdout) as stream:
        transform.to_csv(stream)
    if transform.flagged.any():
        # the partial grid is written, flagged rows carry err=inf
        logger.error(f"transform: {int(transform.flagged.sum())} grid points did not settle")
        return EXIT_ACCURACY
    return EXIT_OK


def cmd_spectrum(config: RunConfig, fields: dict[str, Any] | None, stdout: TextIO) -> int:
    if not config.lambdas:
        raise DomainError("spectrum needs at least one λ")
    f = _function_on_y(config, fields)
    reference = abs(l1_norm(f, config.quadrature).value)
    checks = identity_battery(f, config.lambdas, {"e": IDENTITY}, (ETA_E, ETA_W),
                              config.quadrature, window=config.window, reference=reference)
    with _output(config, stdout) as stream:
        write_identity_csv(checks, stream)
    return EXIT_OK


def cmd_verify(config: RunConfig, fields: dict[str, Any] | None, stdout: TextIO) -> int:
    if config.suite not in SUITES:
        raise DomainError(f"unknown suite {config.suite!r}; expected one of {', '.join(SUITES)}")
    report = run_suite(config.suite, config.quadrature, config.seed)
    with _output(config, stdout) as stream:
        report.write(stream)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_dual(config: RunConfig, fields: dict[str, Any] | None, stdout: TextIO) -> int:
    f = _function_on_y(config, fields)
    transform = radon_grid(f, config.xi_grid(), config.quadrature, with_mass=False)
    F = transform.interpolator()
    out = TransformGrid.empty(config.y_grid(), source=f.label, transform="R∨R")
    for i, phi in enumerate(out.angles):
        for j, s in enumerate(out.heights):
            g = section(PointY.from_chart(phi, s))
            estimate = dual_radon(F, g, config.quadrature, breakpoints=transform.kinks_along_h(g))
            out.values[i, j] = estimate.value
            out.errors[i, j] = estimate.error + estimate.tail_bound
    with _output(config, stdout) as stream:
        out.to_csv(stream)
    return EXIT_OK


def cmd_multiplier(config: RunConfig, fields: dict[str, Any] | None, stdout: TextIO) -> int:
    f = _function_on_y(config, fields)
    table = inversion_multiplier_probe(f, config.xi_grid(), config.y_grid(), config.quadrature,
                                       modes=(0, 1, 2), frequencies=np.linspace(0.0, 2.0, 9))
    with _output(config, stdout) as stream:
        writer = csv.writer(stream)
        writer.writerow(MULTIPLIER_CSV_HEADER)
        for mode, nu, ratio in table.as_rows():
            writer.writerow([mode, f"{nu:.16e}", f"{ratio.real:.16e}", f"{ratio.imag:.16e}"])
    return EXIT_OK


def cmd_group_radon(config: RunConfig, fields: dict[str, Any] | None, stdout: TextIO) -> int:
    """∫∫ f(g n n̄) over the (angle, s) grid of g = r_{φ/2}·a_s"""
    f = _function_on_g(config, fields)
    out = TransformGrid.empty(config.xi_grid(), source=f.label, transform="R_G")
    for i, angle in enumerate(out.angles):
        for j, s in enumerate(out.heights):
            pair = GroupPointPair(HoroPoint(angle, s).representative(), IDENTITY)
            mass = slice_mass(f, pair, config.quadrature)
            estimate = group_radon(f, pair, config.quadrature, scale=mass)
            out.values[i, j] = estimate.value
            out.errors[i, j] = estimate.error
    with _output(config, stdout) as stream:
        out.to_csv(stream)
    return EXIT_OK


type Command = Callable[[RunConfig, dict[str, Any] | None, TextIO], int]

COMMANDS: dict[str, Command] = {
    "transform": cmd_transform,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "dual": cmd_dual,
    "multiplier": cmd_multiplier,
    "group-radon": cmd_group_radon,
}


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    _configure_logging(args.verbose)
    stdout = stdout or sys.stdout
    try:
        config, family_fields = load_config(args)
        return COMMANDS[config.command](config, family_fields, stdout)
    except ArithmeticError as e:
        # AccuracyError and undecidable decompositions
        logger.error(f"{args.command}: {e}")
        return EXIT_ACCURACY
    except (ValueError, TypeError, AttributeError, OSError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE
    except HoroRadonError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_ACCURACY


def run():
    sys.exit(main())
