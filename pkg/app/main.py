import argparse
import json
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from app.config import get_settings
from app.lib.errors import CtflowError
from app.ops.commands import detect, spectrum, surface, sweep, validate
from app.ops.schemas import RunConfig

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2

COMMANDS: dict[str, Callable[..., int]] = {
    "surface": surface.run,
    "spectrum": spectrum.run,
    "detect": detect.run,
    "sweep": sweep.run,
    "validate": validate.run,
}


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from None


def _range(text: str) -> tuple[float, float]:
    try:
        a, b = text.split(":")
        return float(a), float(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a range 'a:b', got '{text}'") from None


def _grid(text: str) -> tuple[int, int]:
    try:
        n, m = text.lower().split("x")
        return int(n), int(m)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a grid shape 'NxM', got '{text}'") from None


def _matrix(text: str) -> list[list[float]]:
    return [_floats(row) for row in text.split(";")]


def _cutoff(text: str) -> float | str:
    return text if text == "auto" else float(text)


def _auto_or_bool(text: str) -> bool | str:
    choices = {"auto": "auto", "true": True, "false": False}
    if text.lower() not in choices:
        raise argparse.ArgumentTypeError(f"expected true, false or auto, got '{text}'")
    return choices[text.lower()]


def _add_global_flags(parser: argparse.ArgumentParser, default: Any) -> None:
    parser.add_argument(
        "--config", type=Path, default=default, help="JSON run configuration; explicit flags take precedence"
    )
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], default=default)
    parser.add_argument("--threads", type=int, default=default, help="Worker threads (overrides CTFLOW_THREADS)")


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before and after the command; the per-command copies
    # leave unset values alone so they do not erase a value given before the command
    common = argparse.ArgumentParser(add_help=False)
    _add_global_flags(common, argparse.SUPPRESS)
    common.add_argument("--out", help="Output file (standard output when omitted)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--rtol", type=float)
    common.add_argument("--atol", type=float)

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", choices=["linear", "davis-skodje", "michaelis-menten"])
    model.add_argument("--gamma", type=float)
    model.add_argument("--fast-sign", choices=["critical_manifold_consistent", "positive_z2"])
    # a value starting with '-' reads as an option unless attached with '='
    model.add_argument("--matrix", type=_matrix, help="Matrix rows separated by ';', e.g. --matrix='-1,0;0,-2'")
    model.add_argument("--eigenvalues", type=_floats, help="Diagonal linear model, e.g. --eigenvalues=-1,-2")
    model.add_argument("--z0", type=_floats, help="Initial point, e.g. 1,0.5")

    spectral = argparse.ArgumentParser(add_help=False)
    spectral.add_argument("--span", type=float, help="Imaginary-time span T")
    spectral.add_argument("--samples", type=int, help="Number of samples (a power of two)")
    spectral.add_argument("--window", choices=["auto", "rectangular", "hann"])
    spectral.add_argument("--detrend", choices=["none", "mean", "fixed_point"])
    spectral.add_argument(
        "--centered", type=_auto_or_bool, help="Sample [−T/2, T/2) instead of [0, T): true, false or auto"
    )

    detection = argparse.ArgumentParser(add_help=False)
    detection.add_argument("--cutoff", type=_cutoff, help="High-band cutoff ξ_cut or 'auto'")
    detection.add_argument("--threshold", type=float, help="High/low energy ratio above which a point is off-SIM")
    detection.add_argument("--tail", type=float, help="Tail energy fraction for the support estimate")

    parser = argparse.ArgumentParser(
        prog="ctflow",
        description="Complex-time flows, imaginary-time spectra and slow-invariant-manifold detection.",
    )
    _add_global_flags(parser, None)
    subparsers = parser.add_subparsers(dest="command")

    p = subparsers.add_parser("surface", parents=[common, model], help="Sample a Riemann surface on a rectangle")
    p.add_argument("--re", type=_range, help="Real-time range a:b")
    p.add_argument("--im", type=_range, help="Imaginary-time range c:d")
    p.add_argument("--grid", type=_grid, help="Grid shape NxM")

    p = subparsers.add_parser("spectrum", parents=[common, model, spectral], help="Imaginary-time spectrum")
    p.add_argument("--component", type=int, help="1-based state component")

    subparsers.add_parser("detect", parents=[common, model, spectral, detection], help="Classify an initial point")

    p = subparsers.add_parser("sweep", parents=[common, model, spectral, detection], help="Classify offsets × gammas")
    p.add_argument("--offsets", type=_floats, help="Offsets of the fast coordinate from the SIM")
    p.add_argument("--gammas", type=_floats)
    p.add_argument("--z1", type=float, help="Slow coordinate of the SIM base point")
    p.add_argument("--sim-order", type=int)

    p = subparsers.add_parser("validate", parents=[common], help="Run the acceptance suites")
    p.add_argument("--suite", action="append", dest="suites", help="Suite to run (repeatable)")

    return parser


def _prune(value: Any) -> Any:
    if isinstance(value, dict):
        pruned = {k: _prune(v) for k, v in value.items()}
        return {k: v for k, v in pruned.items() if v is not None and v != {}}
    return value


def _merge(base: dict, top: dict) -> dict:
    merged = dict(base)
    for key, value in top.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def flags_to_config(args: argparse.Namespace) -> dict:
    """The explicitly given flags as a (sparse) RunConfig dictionary."""

    def arg(name: str) -> Any:
        return getattr(args, name, None)

    spectral = {
        "span": arg("span"),
        "samples": arg("samples"),
        "window": arg("window"),
        "detrend": arg("detrend"),
        "centered": arg("centered"),
    }
    flags = {
        "command": args.command,
        "model": {
            "id": arg("model"),
            "gamma": arg("gamma"),
            "fast_sign": arg("fast_sign"),
            "matrix": arg("matrix"),
            "eigenvalues": arg("eigenvalues"),
        },
        "z0": arg("z0"),
        "tolerance": {"rtol": arg("rtol"), "atol": arg("atol")},
        "surface": {"re": arg("re"), "im": arg("im"), "grid": arg("grid")},
        "spectrum": {**spectral, "component": arg("component")} if args.command == "spectrum" else None,
        "detection": (
            {**spectral, "cutoff": arg("cutoff"), "threshold": arg("threshold"), "tail": arg("tail")}
            if args.command in ("detect", "sweep")
            else None
        ),
        "sweep": {"offsets": arg("offsets"), "gammas": arg("gammas"), "z1": arg("z1"), "sim_order": arg("sim_order")},
        "validate": {"suites": arg("suites")},
        "out": arg("out"),
        "format": arg("format"),
    }
    return _prune(flags)


def load_config(args: argparse.Namespace) -> RunConfig:
    base: dict = {}
    if args.config is not None:
        base = json.loads(args.config.read_text())
        if not isinstance(base, dict):
            raise ValueError(f"{args.config} does not hold a JSON object")
    return RunConfig.model_validate(_merge(base, flags_to_config(args)))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG

    settings = get_settings()
    level = args.log_level or ("DEBUG" if settings.debug else settings.log_level.upper())
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    try:
        config = load_config(args)
    except (OSError, ValueError) as e:
        # pydantic's ValidationError is a ValueError
        detail = str(e) if not isinstance(e, ValidationError) else e.errors(include_url=False)
        logger.error(f"Invalid configuration: {detail}")
        return EXIT_CONFIG

    logger.debug(f"Running {config.command} with {config.echo()}")
    try:
        return COMMANDS[config.command](config, threads=args.threads or settings.threads)
    except CtflowError as e:
        logger.error(f"{type(e).__name__}: {e}", exc_info=settings.debug)
        return e.exit_code
    except OSError as e:
        logger.error(f"Cannot write output: {e}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
