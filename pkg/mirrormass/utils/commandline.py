"""
Utility functions for the mirrormass command-line tool.

The argument parser is assembled from :class:`CmdOption` records so that
every subcommand shares the same handful of output, model and tracking
options. All option defaults are ``None``: a flag that was not given never
overrides a value from a configuration file.
"""

import argparse
import math
import re
from collections import namedtuple
from typing import Any, Dict, List, Tuple

import numpy as np

from mirrormass import VERSION_STRING

from .constants import OUTPUT_FORMATS, VERIFY_SUITES

# flags whose values are ranges that may start with a minus sign
RANGE_FLAGS = ("--grid", "--band")
NEGATIVE_RANGE = re.compile(r"^-[0-9.]")

# a named tuple describing one option of a subcommand parser; the attributes
# are named for the arguments of ``ArgumentParser.add_argument()`` and only
# ``dest`` and ``help`` are required
CmdOption = namedtuple(
    "CmdOption",
    ["dest", "help", "longname", "shortname", "action", "type", "choices", "metavar"],
    defaults=(None, None, None, None, None, None),
)


def parse_grid(spec: str) -> np.ndarray:
    """
    Parse a frequency grid specification.

    The specification is ``min:max:points[:log|lin]`` with logarithmic
    spacing by default. A single point is allowed for any spacing as long
    as ``min == max``; logarithmic grids with more than one point need a
    strictly positive ``min``.

    Parameters
    ----------
    spec : str
        The grid specification, e.g. ``"1e-3:1e3:400:log"``.

    Returns
    -------
    frequencies : numpy.ndarray
        The strictly increasing grid.

    Raises
    ------
    ValueError
        If the specification is malformed or inconsistent.
    """
    parts = str(spec).strip().split(":")
    if len(parts) not in (3, 4):
        raise ValueError(f"Invalid grid {spec!r}: expected min:max:points[:log|lin].")

    spacing = parts[3].strip().lower() if len(parts) == 4 else "log"
    if spacing not in ("log", "lin"):
        raise ValueError(f"Invalid grid spacing {spacing!r}: expected 'log' or 'lin'.")

    try:
        low, high = float(parts[0]), float(parts[1])
        points = int(parts[2])
    except ValueError:
        raise ValueError(f"Invalid grid {spec!r}: min and max must be numbers, points an integer.")

    if not (math.isfinite(low) and math.isfinite(high)):
        raise ValueError(f"Invalid grid {spec!r}: the limits must be finite.")
    if points < 1:
        raise ValueError(f"Invalid grid {spec!r}: at least one point is needed.")
    if points == 1:
        if low != high:
            raise ValueError(f"Invalid grid {spec!r}: a single point needs min == max.")
        return np.array([low])
    if not low < high:
        raise ValueError(f"Invalid grid {spec!r}: min must be smaller than max.")
    if spacing == "log":
        if low <= 0:
            raise ValueError(f"Invalid grid {spec!r}: logarithmic grids need min > 0.")
        return np.geomspace(low, high, points)
    return np.linspace(low, high, points)


def parse_band(spec: Any) -> Tuple[float, float]:
    """
    Parse a frequency band given as ``"min:max"`` or as a pair of numbers.

    Raises
    ------
    ValueError
        If the band is malformed, negative or reversed.
    """
    parts = spec.split(":") if isinstance(spec, str) else list(spec)
    if len(parts) != 2:
        raise ValueError(f"Invalid band {spec!r}: expected min:max.")
    try:
        low, high = float(parts[0]), float(parts[1])
    except (TypeError, ValueError):
        raise ValueError(f"Invalid band {spec!r}: the edges must be numbers.")
    if not (0 <= low <= high and math.isfinite(high)):
        raise ValueError(f"Invalid band {spec!r}: need 0 <= min <= max < inf.")
    return low, high


def parse_tolerance_overrides(specs: List[str]) -> Dict[str, float]:
    """
    Parse ``NAME=VALUE`` threshold overrides.

    Parameters
    ----------
    specs : List[str]
        The overrides, e.g. ``["noise_fidelity=0.1"]``.

    Returns
    -------
    overrides : Dict[str, float]
        Threshold by check name; later entries win.

    Raises
    ------
    ValueError
        If an entry is not of the form ``NAME=VALUE`` with a numeric value.
    """
    overrides = {}
    for spec in specs:
        name, sep, value = str(spec).partition("=")
        if not sep or not name.strip():
            raise ValueError(f"Invalid tolerance override {spec!r}: expected NAME=VALUE.")
        try:
            overrides[name.strip()] = float(value)
        except ValueError:
            raise ValueError(f"Invalid tolerance override {spec!r}: {value!r} is not a number.")
    return overrides


def join_range_values(argv: List[str]) -> List[str]:
    """
    Attach range values that start with a minus sign to their flag.

    ``argparse`` takes ``-1:-1:1`` for an option rather than the value of
    ``--grid``, so ``["--grid", "-1:-1:1"]`` is rewritten as
    ``["--grid=-1:-1:1"]``. The same holds for ``--band``.

    Parameters
    ----------
    argv : List[str]
        The command-line arguments.

    Returns
    -------
    argv : List[str]
        The arguments with such values joined to their flag.
    """
    joined = []
    tokens = iter(argv)
    for token in tokens:
        if token in RANGE_FLAGS:
            value = next(tokens, None)
            if value is not None and NEGATIVE_RANGE.match(value):
                joined.append(f"{token}={value}")
                continue
            joined.append(token)
            if value is not None:
                joined.append(value)
            continue
        joined.append(token)
    return joined


COMMON_OPTIONS: List[CmdOption] = [
    CmdOption(
        dest="config",
        longname="config",
        metavar="FILE",
        help="flat key/value (or JSON) file with settings; explicit flags take precedence",
    ),
    CmdOption(
        dest="omega_c",
        longname="omega-c",
        type=float,
        help="reflection cut-off frequency of the mirror (default: 1)",
    ),
    CmdOption(dest="hbar", longname="hbar", type=float, help="action scale (default: 1)"),
    CmdOption(
        dest="format",
        longname="format",
        choices=OUTPUT_FORMATS,
        help="output format (default: csv)",
    ),
    CmdOption(
        dest="out",
        shortname="o",
        longname="out",
        metavar="FILE",
        help="write the output to this file instead of standard output",
    ),
    CmdOption(
        dest="n_jobs",
        longname="n-jobs",
        type=int,
        help="number of parallel workers (default: 1)",
    ),
    CmdOption(
        dest="use_wandb",
        longname="use-wandb",
        action="store_true",
        help="log the configuration and the output tables to Weights & Biases",
    ),
    CmdOption(dest="wandb_project", longname="wandb-project", help="Weights & Biases project"),
    CmdOption(dest="wandb_entity", longname="wandb-entity", help="Weights & Biases entity"),
]

_GRID = CmdOption(
    dest="grid",
    longname="grid",
    metavar="MIN:MAX:POINTS[:log|lin]",
    help="frequency grid (default: 400 log points over [1e-3, 1e3] omega_c)",
)
_DIMENSIONLESS = CmdOption(
    dest="dimensionless",
    longname="dimensionless",
    action="store_true",
    help="report frequencies in units of omega_c and values in their natural units",
)
_QUADRATURE = [
    CmdOption(dest="tol", longname="tol", type=float, help="relative tolerance (default: 1e-10)"),
    CmdOption(
        dest="abs_tol", longname="abs-tol", type=float, help="absolute tolerance (default: 1e-14)"
    ),
    CmdOption(
        dest="max_depth",
        longname="max-depth",
        type=int,
        help="maximum number of panel bisections (default: 50)",
    ),
]

SUBCOMMAND_OPTIONS: Dict[str, Tuple[str, List[CmdOption]]] = {
    "delay": ("tabulate the reflection delay and the phase shift", [_GRID, _DIMENSIONLESS]),
    "spectrum": (
        "tabulate a vacuum correlation spectrum",
        [
            CmdOption(
                dest="component",
                longname="component",
                choices=["f0f0", "f1f1", "f0f1", "mass", "field", "p1p1"],
                help="the spectrum to compute",
            ),
            CmdOption(
                dest="method",
                longname="method",
                choices=["quad", "closed", "conv", "asym"],
                help="evaluation method (default: closed for field, quad otherwise)",
            ),
            _GRID,
            *_QUADRATURE,
            _DIMENSIONLESS,
        ],
    ),
    "mean-mass": (
        "compute the mean induced mass up to a cut-off",
        [
            CmdOption(
                dest="cutoff",
                longname="cutoff",
                type=float,
                help="ultraviolet cut-off frequency (required)",
            ),
            *_QUADRATURE,
            _DIMENSIONLESS,
        ],
    ),
    "simulate": (
        "simulate the motion of the mirror in vacuum",
        [
            CmdOption(dest="mass_bare", longname="mass-bare", type=float, help="bare mass"),
            CmdOption(dest="dt", longname="dt", type=float, help="time step"),
            CmdOption(dest="steps", longname="steps", type=int, help="number of steps"),
            CmdOption(dest="seed", longname="seed", type=int, help="random seed"),
            CmdOption(
                dest="mass_channel",
                longname="mass-channel",
                action="store_true",
                help="let the mass fluctuate with the field on the mirror",
            ),
            CmdOption(
                dest="band",
                longname="band",
                metavar="WMIN:WMAX",
                help="frequency band of the noise (default: 0:0.1/dt)",
            ),
            CmdOption(dest="q0", longname="q0", type=float, help="initial position"),
            CmdOption(dest="p0", longname="p0", type=float, help="initial momentum"),
            CmdOption(
                dest="noise_scale",
                longname="noise-scale",
                type=float,
                help="factor applied to the noise (0 gives free motion)",
            ),
            CmdOption(
                dest="record_every",
                longname="record-every",
                type=int,
                help="record every n-th state",
            ),
            CmdOption(
                dest="force_component",
                longname="force-component",
                choices=["f0f0", "f1f1", "f0f1"],
                help="force spectrum driving the mirror (default: f1f1)",
            ),
        ],
    ),
    "verify": (
        "run the property suites",
        [
            CmdOption(dest="suite", longname="suite", choices=VERIFY_SUITES, help="suite to run"),
            CmdOption(
                dest="tolerances",
                longname="tol",
                action="append",
                metavar="NAME=VALUE",
                help="override the threshold of a check; may be repeated",
            ),
            CmdOption(
                dest="steps",
                longname="steps",
                type=int,
                help="steps of the long simulator run (default: 1000000)",
            ),
        ],
    ),
}


def _add_option(parser: argparse.ArgumentParser, option: CmdOption) -> None:
    """Add one ``CmdOption`` to ``parser``, leaving its default at ``None``."""
    option_args = []
    if option.shortname is not None:
        option_args.append(f"-{option.shortname}")
    option_args.append(f"--{option.longname or option.dest}")

    option_kwargs: Dict[str, Any] = {"dest": option.dest, "help": option.help, "default": None}
    for attribute in ("action", "type", "choices", "metavar"):
        value = getattr(option, attribute)
        if value is not None:
            option_kwargs[attribute] = value
    parser.add_argument(*option_args, **option_kwargs)


def setup_mirrormass_parser(name: str = "mirrormass") -> argparse.ArgumentParser:
    """
    Create the argument parser of the command-line tool.

    Parameters
    ----------
    name : str
        The program name shown in usage messages.
        Defaults to ``"mirrormass"``.

    Returns
    -------
    parser : argparse.ArgumentParser
        A parser with one subcommand per entry of ``SUBCOMMAND_OPTIONS``.
    """
    parser = argparse.ArgumentParser(prog=name)
    parser.add_argument(
        "-V",
        "--version",
        action="version",
        version=VERSION_STRING,
        help=f"show the {name} version number and exit",
    )

    subparsers = parser.add_subparsers(dest="subcommand", title="subcommands")
    for subcommand, (description, options) in SUBCOMMAND_OPTIONS.items():
        subparser = subparsers.add_parser(subcommand, help=description, description=description)
        for option in options + COMMON_OPTIONS:
            _add_option(subparser, option)
    return parser
