"""CLI for verifying annihilators of neat elements."""

import argparse
import json
import logging
import os
import sys
from argparse import Namespace
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import (
    TYPE_CHECKING,
    Any,
    Dict,
    List,
    Optional,
    Sequence,
    Tuple,
    cast,
)

import fsspec

from .annihilator_engine import (
    DEFAULT_MAX_AMBIENT_DIM,
    DEFAULT_PAIRING_TRIPLES,
    AmbientSpace,
    verify_frobenius,
    verify_lemma2,
    verify_main,
    verify_minimal,
    verify_theorem6,
)
from .exterior_algebra import DEFAULT_MAX_N, BlockShape
from .func_utils import timed, wrap_fn
from .report import (
    FORMATS,
    VerificationReport,
    serialize_report,
    serialize_reports,
    summary_row,
)
from .scalars import AlgebraError, field_make

if TYPE_CHECKING:
    from argparse import ArgumentParser

logger = logging.getLogger(__name__)

# engine modules log below the package logger
package_logger = logging.getLogger(__package__)
package_logger.setLevel(logging.INFO)
package_logger.addHandler(logging.StreamHandler())

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FAILED = 3

THREADS_ENV = "NEAT_ANN_THREADS"

MODE_CHECKS = {
    "ring": ("frobenius", "theorem6", "minimal", "lemma2"),
    "exterior": ("main", "minimal"),
}
DEFAULT_CHECKS = {"ring": ["theorem6"], "exterior": ["main"]}

# applied after the config file, so explicit flags win over it
DEFAULTS: Dict[str, Any] = {
    "mode": "ring",
    "s": [],
    "blocks": [],
    "char": ["0"],
    "check": [],
    "out": None,
    "format": "json",
    "max_ambient_dim": None,
    "stack_convention": "231",
    "seed": 0,
    "triples": DEFAULT_PAIRING_TRIPLES,
    "timings": False,
}
LIST_OPTIONS = ("s", "blocks", "char", "check")


class UsageError(AlgebraError, ValueError):  # noqa: N818
    """Raised for invalid flags, config files or environment."""


def _should_color() -> bool:
    """See if we should print in colors or not.

    This honors FORCE_COLOR and NO_COLOR envvars as well. :).
    """
    force_color = os.getenv("FORCE_COLOR")
    if force_color and force_color in ("0", "false"):
        return False
    if force_color:
        return True
    if not sys.stdout.isatty() or os.getenv("TERM") == "dumb":
        return False
    return "NO_COLOR" not in os.environ


def colored(name: str, color: str = "", style: str = "") -> str:
    """Colors a string with given color name."""
    try:
        import colorama

        colors = {
            "green": colorama.Fore.GREEN,
            "red": colorama.Fore.RED,
            "yellow": colorama.Fore.YELLOW,
            "gray": colorama.Fore.LIGHTWHITE_EX,
        }
        styles = {"bright": colorama.Style.BRIGHT, "dim": colorama.Style.DIM}
        reset = colorama.Style.RESET_ALL
    except ModuleNotFoundError:  # pragma: no cover
        colors = {}
        reset = ""
        styles = {}

    _color = colors.get(color, "")
    _style = styles.get(style, "")
    return f"{_style}{_color}{name}{reset}"


STATUS_COLORS = {"pass": "green", "fail": "red", "error": "yellow"}


def style_status(status: str, colored_output: Optional[bool] = None) -> str:
    """PASS/FAIL/ERROR, coloured when the terminal allows it."""
    text = status.upper()
    use_color = _should_color() if colored_output is None else colored_output
    if not use_color:
        return text
    return colored(text, STATUS_COLORS.get(status, ""), style="bright")


def parse_int_list(values: Sequence[str]) -> List[int]:
    """Parse `2-6`, `2,3,5` and repeated values into a list of ints."""
    out: List[int] = []
    for value in values:
        for part in str(value).split(","):
            part = part.strip()
            if not part:
                continue
            try:
                if "-" in part.lstrip("-"):
                    start, end = part.split("-", 1)
                    out.extend(range(int(start), int(end) + 1))
                else:
                    out.append(int(part))
            except ValueError:
                raise UsageError(f"cannot parse integer list {value!r}") from None
    return out


def thread_count() -> Optional[int]:
    """Worker pool size from NEAT_ANN_THREADS (None means the CPU count)."""
    value = os.getenv(THREADS_ENV)
    if value is None or value == "":
        return None
    try:
        threads = int(value)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {value!r}") from None
    if threads < 1:
        raise UsageError(f"{THREADS_ENV} must be at least 1, got {threads}")
    return threads


def load_config(path: str) -> Dict[str, Any]:
    """Read a JSON config file whose keys mirror the flag names."""
    with fsspec.open(path, "rb") as fobj:
        raw = fobj.read()
    try:
        data = json.loads(raw)
    except ValueError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must hold a JSON object")

    config = {}
    for key, value in data.items():
        name = key.replace("-", "_")
        if name not in DEFAULTS:
            raise UsageError(f"unknown option {key!r} in config file {path}")
        if name == "blocks" and isinstance(value, list) and all(
            isinstance(v, int) for v in value
        ):
            # a flat list of sizes is a single shape
            value = [",".join(map(str, value))]
        if name in LIST_OPTIONS and not isinstance(value, list):
            value = [value]
        if name in LIST_OPTIONS:
            value = [str(v) if not isinstance(v, list) else ",".join(map(str, v)) for v in value]
        config[name] = value
    return config


def apply_config(args: Namespace) -> Namespace:
    """Fill unset flags from the config file, then from DEFAULTS."""
    config = load_config(args.config) if args.config else {}
    for name, default in DEFAULTS.items():
        if getattr(args, name, None) is None:
            setattr(args, name, config.get(name, default))
    return args


@dataclass(frozen=True)
class Cell:
    """One configuration: an algebra, a characteristic and the checks to run."""

    mode: str
    characteristic: int
    checks: Tuple[str, ...]
    s: Optional[int] = None
    shape: Optional[BlockShape] = None
    convention: str = "231"
    triples: int = DEFAULT_PAIRING_TRIPLES
    seed: int = 0
    max_ambient_dim: int = DEFAULT_MAX_AMBIENT_DIM
    timings: bool = False


@dataclass(frozen=True)
class SweepGrid:
    """s values (ring) or shapes (exterior) times characteristics."""

    mode: str
    s_values: Tuple[int, ...]
    shapes: Tuple[BlockShape, ...]
    characteristics: Tuple[int, ...]
    checks: Tuple[str, ...]
    template: Cell

    def cells(self) -> List[Cell]:
        """Cells in grid order: algebra first, then characteristic."""
        if self.mode == "ring":
            return [
                replace(self.template, s=s, characteristic=char)
                for s in self.s_values
                for char in self.characteristics
            ]
        return [
            replace(self.template, shape=shape, s=shape.s, characteristic=char)
            for shape in self.shapes
            for char in self.characteristics
        ]


def build_grid(args: Namespace) -> SweepGrid:
    """Validate parsed arguments into a sweep grid."""
    mode = args.mode
    if mode not in MODE_CHECKS:
        raise UsageError(f"unknown mode {mode!r}, expected ring or exterior")
    if args.format not in FORMATS:
        raise UsageError(f"unknown format {args.format!r}")
    if args.stack_convention not in ("231", "312"):
        raise UsageError(f"unknown stack convention {args.stack_convention!r}")

    checks = [c.strip() for value in args.check for c in str(value).split(",") if c.strip()]
    checks = checks or DEFAULT_CHECKS[mode]
    for check in checks:
        if check not in MODE_CHECKS[mode]:
            raise UsageError(
                f"check {check!r} is not available in {mode} mode, "
                f"expected one of {', '.join(MODE_CHECKS[mode])}"
            )

    max_dim = int(args.max_ambient_dim or DEFAULT_MAX_AMBIENT_DIM)
    max_n = max(DEFAULT_MAX_N, max_dim.bit_length() - 1)
    characteristics = parse_int_list(args.char)
    for char in characteristics:
        field_make(char)

    s_values: List[int] = []
    shapes: List[BlockShape] = []
    if mode == "ring":
        s_values = parse_int_list(args.s)
        if any(s < 1 for s in s_values):
            raise UsageError("s must be at least 1")
    else:
        shapes = [BlockShape.parse(str(b), max_n=max_n) for b in args.blocks]

    template = Cell(
        mode=mode,
        characteristic=0,
        checks=tuple(dict.fromkeys(checks)),
        convention=args.stack_convention,
        triples=int(args.triples),
        seed=int(args.seed),
        max_ambient_dim=max_dim,
        timings=bool(args.timings),
    )
    grid = SweepGrid(
        mode, tuple(s_values), tuple(shapes), tuple(characteristics), template.checks, template
    )
    for cell in grid.cells():
        _ambient(cell)
    return grid


def _ambient(cell: Cell) -> AmbientSpace:
    field = field_make(cell.characteristic)
    if cell.mode == "ring":
        assert cell.s is not None
        ambient = AmbientSpace.ring(field, cell.s)
    else:
        assert cell.shape is not None
        ambient = AmbientSpace.exterior(field, cell.shape)
    return ambient.check_size(cell.max_ambient_dim)


def _run_checks(cell: Cell) -> VerificationReport:
    ambient = _ambient(cell)
    field, s = ambient.field, ambient.s
    report: Optional[VerificationReport] = None
    for check in cell.checks:
        logger.debug("running %s for %s", check, cell)
        if check == "frobenius":
            part = verify_frobenius(
                s, field, cell.triples, cell.seed, max_s=s, max_ambient_dim=cell.max_ambient_dim
            )
        elif check == "theorem6":
            part = verify_theorem6(
                s, field, cell.convention, max_s=s, max_ambient_dim=cell.max_ambient_dim
            )
        elif check == "lemma2":
            part = verify_lemma2(s, field, max_s=s, max_ambient_dim=cell.max_ambient_dim)
        elif check == "minimal":
            part = verify_minimal(ambient, cell.convention, cell.max_ambient_dim)
        else:
            assert cell.shape is not None
            part = verify_main(cell.shape, field, cell.max_ambient_dim, cell.convention)
        report = part if report is None else report.merge(part)
    assert report is not None
    report.config["checks"] = list(cell.checks)
    return report


def run_verify(cell: Cell) -> VerificationReport:
    """Run every requested check for one configuration."""
    report, elapsed = timed(wrap_fn(_run_checks, cell))
    if cell.timings:
        report.runtime_ms = elapsed
    logger.debug("%s finished in %d ms", cell, elapsed)
    return report


def _error_report(cell: Cell, exc: Exception) -> VerificationReport:
    return VerificationReport(
        config={
            "mode": cell.mode,
            "s": cell.s,
            "blocks": list(cell.shape.block_sizes) if cell.shape else None,
            "characteristic": cell.characteristic,
            "checks": list(cell.checks),
        },
        error={"type": type(exc).__name__, "message": str(exc)},
    )


def run_cell(cell: Cell) -> VerificationReport:
    """run_verify, recording errors in the report instead of raising."""
    try:
        return run_verify(cell)
    except (AlgebraError, ValueError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return _error_report(cell, exc)


def run_sweep(grid: SweepGrid, threads: Optional[int] = None) -> List[VerificationReport]:
    """One report per cell, in grid order whatever the completion order."""
    cells = grid.cells()
    if not cells:
        return []
    with ThreadPoolExecutor(max_workers=threads or os.cpu_count()) as executor:
        futures = [executor.submit(run_cell, cell) for cell in cells]
        return [future.result() for future in futures]


def exit_code(reports: Sequence[VerificationReport]) -> int:
    """2 if any cell errored, 3 if any equality failed, else 0."""
    if any(r.error is not None for r in reports):
        return EXIT_USAGE
    if any(not r.passed for r in reports):
        return EXIT_FAILED
    return EXIT_OK


def render_summary(reports: Sequence[VerificationReport]) -> None:
    """Print one aligned line per configuration."""
    if not reports:
        return

    rows = [summary_row(r) for r in reports]
    labels = []
    for row in rows:
        algebra = f"s={row['s']}" if row["mode"] == "ring" else f"blocks={row['blocks']}"
        labels.append(f"{algebra} char={row['characteristic']}")
    width = max(map(len, labels))

    for label, row in zip(labels, rows):
        status = style_status(row["status"])
        dims = (
            f"ambient={row['ambient']} mu_ideal={row['mu_ideal']} "
            f"annihilator={row['annihilator']} generated={row['generated_ideal']}"
        )
        extra = row["failed"] or row["error"]
        print(label.ljust(width), status, dims, extra)


def emit(data: bytes, out: Optional[str], reports: Sequence[VerificationReport]) -> None:
    """Write the document to `out` (any fsspec URL) or to stdout."""
    if not out:
        sys.stdout.write(data.decode())
        return
    with fsspec.open(out, "wb") as fobj:
        fobj.write(data)
    logger.debug("report written to %s", out)
    render_summary(reports)


def print_error(exc: Exception) -> int:
    """Machine-readable error object on stdout, log line on stderr."""
    error = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    print(json.dumps(error, sort_keys=True))
    logger.error("%s: %s", type(exc).__name__, exc)
    return EXIT_USAGE


class Command:
    """Base class for all commands."""

    def __init__(self, args: Namespace) -> None:
        """Pass the arguments."""
        self.args = args

    def run(self) -> int:
        """Override this function to do some operations."""
        raise NotImplementedError


class CommandVerify(Command):
    """Command for verify."""

    def run(self) -> int:
        """Verify one configuration and write its report."""
        try:
            grid = build_grid(self.args)
            cells = grid.cells()
            if len(cells) != 1:
                raise UsageError(
                    f"verify needs exactly one configuration, got {len(cells)}; "
                    "use sweep for grids"
                )
            report = run_verify(cells[0])
        except (AlgebraError, ValueError) as exc:
            return print_error(exc)

        emit(serialize_report(report, self.args.format), self.args.out, [report])
        return exit_code([report])


class CommandSweep(Command):
    """Command for sweep."""

    def run(self) -> int:
        """Verify every cell of the grid, in parallel."""
        try:
            grid = build_grid(self.args)
            threads = thread_count()
        except (AlgebraError, ValueError) as exc:
            return print_error(exc)

        reports = run_sweep(grid, threads)
        emit(serialize_reports(reports, self.args.format), self.args.out, reports)
        return exit_code(reports)


def add_grid_arguments(parser: "ArgumentParser") -> None:
    """Flags shared by verify and sweep; unset flags stay None."""
    parser.add_argument("--mode", choices=sorted(MODE_CHECKS), help="Algebra to work in")
    parser.add_argument(
        "--s",
        action="append",
        metavar="INT",
        help="Number of variables (sweeps accept ranges such as 2-6 or lists)",
    )
    parser.add_argument(
        "--blocks",
        action="append",
        metavar="N1,N2,...",
        help="Even block sizes of the exterior algebra (repeatable for sweeps)",
    )
    parser.add_argument(
        "--char",
        action="append",
        metavar="INT",
        help="Characteristic, 0 or a prime (repeatable or comma separated)",
    )
    parser.add_argument(
        "--check",
        action="append",
        metavar="LIST",
        help="Checks to run: frobenius, theorem6, minimal, lemma2 (ring) "
        "or main, minimal (exterior)",
    )
    parser.add_argument("--out", metavar="PATH", help="Write the report here")
    parser.add_argument("--format", choices=FORMATS, help="Report format")
    parser.add_argument(
        "--max-ambient-dim",
        type=int,
        metavar="INT",
        help=f"Refuse ambient spaces larger than this (default {DEFAULT_MAX_AMBIENT_DIM})",
    )
    parser.add_argument(
        "--stack-convention",
        choices=("231", "312"),
        help="Pattern avoided by stack-sortable permutations",
    )
    parser.add_argument("--seed", type=int, help="Seed for the random pairing triples")
    parser.add_argument("--triples", type=int, help="Number of random pairing triples")
    parser.add_argument(
        "--timings",
        action="store_true",
        default=None,
        help="Record runtime_ms (reports are then no longer reproducible)",
    )


def get_parser() -> Tuple["ArgumentParser", Dict[str, "ArgumentParser"]]:
    """Returns the parser and dict of subparsers."""
    parser = argparse.ArgumentParser(prog="neat-ann")
    parser.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Show more information",
        default=False,
    )
    parser.add_argument(
        "--config",
        metavar="PATH",
        help="JSON file mirroring the flag names; explicit flags win",
        default=None,
    )

    subparsers = parser.add_subparsers(title="actions", help="Available subcommands")
    subparsers.required = True
    subparsers.dest = "command"

    verify_parser = subparsers.add_parser("verify", help="Verify one configuration")
    add_grid_arguments(verify_parser)
    verify_parser.set_defaults(func=CommandVerify)

    sweep_parser = subparsers.add_parser(
        "sweep", help="Verify a grid of configurations in parallel"
    )
    add_grid_arguments(sweep_parser)
    sweep_parser.set_defaults(func=CommandSweep)

    return parser, {"verify": verify_parser, "sweep": sweep_parser}


def run_cmd(args: Namespace) -> int:
    """Run cmd from given args."""
    try:
        apply_config(args)
    except (OSError, AlgebraError, ValueError) as exc:
        return print_error(exc)
    cmd = cast(Command, args.func(args))
    return cmd.run()


def main(argv: Optional[List[str]] = None) -> int:
    """Command line entrypoint."""
    parser, subparsers = get_parser()
    args = parser.parse_args(argv)
    args.subparsers = subparsers

    package_logger.setLevel(logging.DEBUG if args.verbose else logging.INFO)

    try:
        return run_cmd(args)
    except Exception as exc:  # noqa: BLE001
        logger.error("%s: %s", type(exc).__name__, exc, exc_info=args.verbose)
        return 1
