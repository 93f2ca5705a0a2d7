#!/usr/bin/env python3
"""
Coherent-feedback squeezing simulator

Evaluates open- and closed-loop OPO squeezing spectra, sweeps, searches and
figure presets, and writes the results as CSV or JSON.

Usage:
    cfsq spectrum   --config run.cfg --f 1e6
    cfsq sweep-t2   --config run.cfg --f 1e6 --grid 101 --out t2.csv
    cfsq sweep-freq --config run.cfg --fmin 1e5 --fmax 8e6 --n 400
    cfsq sweep-pump --config run.cfg --f 1e6 --T2 0.8 --grid 50
    cfsq optimize   --config run.cfg --f 1e6 --baseline same-loss
    cfsq threshold  --config run.cfg
    cfsq reproduce  --preset fig4 --out results/ --format json

Exit codes: 0 success, 1 validation or parse error, 2 operating point at or
above an oscillation threshold, 3 output error.
"""
import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from loguru import logger

from analysis.search import optimal_transmissivity
from analysis.sweeps import pump_grid, spectrum_at, sweep_frequency, sweep_pump, sweep_transmissivity, transmissivity_grid
from cli.config_file import load_config
from cli.emitter import render_report, render_series, write_text
from cli.presets import PRESETS, run_preset
from physics.coherent_feedback import oscillation_threshold
from shared.config import Settings, get_settings
from shared.errors import ConfigParseError, SqueezingError
from shared.models import (
    Baseline,
    Command,
    OutputFormat,
    RunConfig,
    SpectrumSeries,
    Spacing,
    ThresholdReport,
    parameter_snapshot,
)

LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan> | <level>{message}</level>"
)


def setup_logging(settings: Settings) -> None:
    logger.remove()
    logger.add(sys.stderr, format=LOG_FORMAT, level=settings.log_level.upper())
    log_dir = settings.ensure_log_dir()
    if log_dir is not None:
        logger.add(
            log_dir / "cfsq_{time}.log",
            rotation="1 day",
            retention="30 days",
            level="DEBUG"
        )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Run configuration file (key = value per line)")
    common.add_argument("--out", help="Output file (directory for reproduce); stdout if omitted")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], help="Output format")

    parser = argparse.ArgumentParser(prog="cfsq", description="Coherent-feedback OPO squeezing simulator")
    commands = parser.add_subparsers(dest="command", required=True)

    spectrum = commands.add_parser(Command.SPECTRUM.value, parents=[common], help="S+/- at one frequency")
    spectrum.add_argument("--f", type=float, help="Sideband frequency in Hz")

    sweep_t2 = commands.add_parser(Command.SWEEP_T2.value, parents=[common], help="S+/- versus CBS transmissivity")
    sweep_t2.add_argument("--f", type=float, help="Sideband frequency in Hz")
    sweep_t2.add_argument("--grid", type=int, help="Number of T2 grid points on (0, 1]")

    sweep_freq = commands.add_parser(Command.SWEEP_FREQ.value, parents=[common], help="S+/- versus frequency")
    sweep_freq.add_argument("--fmin", type=float, help="Lowest frequency in Hz")
    sweep_freq.add_argument("--fmax", type=float, help="Highest frequency in Hz")
    sweep_freq.add_argument("--n", type=int, help="Number of frequencies")
    sweep_freq.add_argument("--spacing", choices=[s.value for s in Spacing], help="Grid spacing")

    sweep_x = commands.add_parser(Command.SWEEP_PUMP.value, parents=[common], help="S+/- versus pump strength")
    sweep_x.add_argument("--f", type=float, help="Sideband frequency in Hz")
    sweep_x.add_argument("--T2", type=float, help="CBS transmissivity")
    sweep_x.add_argument("--grid", type=int, help="Number of pump strengths on [0, 1)")

    optimize = commands.add_parser(Command.OPTIMIZE.value, parents=[common], help="Best CBS transmissivity")
    optimize.add_argument("--f", type=float, help="Sideband frequency in Hz")
    optimize.add_argument("--baseline", choices=[b.value for b in Baseline], help="Reference for the improvement")

    commands.add_parser(Command.THRESHOLD.value, parents=[common], help="Closed-loop oscillation threshold")

    reproduce = commands.add_parser(Command.REPRODUCE.value, parents=[common], help="Regenerate a figure preset")
    reproduce.add_argument("--preset", required=True, help="Preset name: " + ", ".join(PRESETS))
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """Map command-line options onto configuration keys."""
    return {
        'command': args.command,
        'frequency_hz': getattr(args, 'f', None),
        'grid_points': getattr(args, 'grid', None),
        'f_min_hz': getattr(args, 'fmin', None),
        'f_max_hz': getattr(args, 'fmax', None),
        'n_points': getattr(args, 'n', None),
        'spacing': getattr(args, 'spacing', None),
        'baseline': getattr(args, 'baseline', None),
        'T2': getattr(args, 'T2', None),
        'output_path': args.out,
        'output_format': args.format,
    }


def _deliver(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    target = write_text(text, path)
    logger.info(f"Wrote {target}")


def run_command(run: RunConfig) -> None:
    """Evaluate one configured command and deliver its output."""
    op, fb, det = run.opo, run.feedback, run.detection
    args = run.command_args
    fmt = run.output.format
    header = run.snapshot()

    if run.command is Command.THRESHOLD:
        x_threshold = oscillation_threshold(op, fb)
        logger.info(f"Closed-loop threshold x* = {x_threshold:.9f}")
        report = ThresholdReport(x_threshold=x_threshold, params_snapshot=parameter_snapshot(op, fb))
        _deliver(render_report(report, fmt, header), run.output.path)
        return

    if run.command is Command.OPTIMIZE:
        report = optimal_transmissivity(op, fb, args.frequency_hz, baseline=args.baseline)
        _deliver(render_report(report, fmt, header), run.output.path)
        return

    if run.command is Command.SPECTRUM:
        series = spectrum_at(op, fb, args.frequency_hz, det)
    elif run.command is Command.SWEEP_T2:
        grid = transmissivity_grid(args.grid_points)
        series = sweep_transmissivity(op, fb, args.frequency_hz, grid, det)
    elif run.command is Command.SWEEP_FREQ:
        series = sweep_frequency(op, fb, args.f_min_hz, args.f_max_hz, args.n_points, det, args.spacing)
    elif run.command is Command.SWEEP_PUMP:
        series = sweep_pump(op, fb, args.frequency_hz, pump_grid(args.grid_points), det)
    else:
        raise ConfigParseError(f"command {run.command.value} cannot be run from a configuration")
    _deliver(render_series(series, fmt, header), run.output.path)


def reproduce(preset: str, out: Optional[str], fmt: OutputFormat) -> List[Path]:
    """Run a preset and write one file per series or report into the out directory."""
    out_dir = Path(out or ".")
    written = []
    for name, result in run_preset(preset).items():
        header = {'command': Command.REPRODUCE.value, 'command_args.preset': preset, 'output.format': fmt.value}
        if isinstance(result, SpectrumSeries):
            text = render_series(result, fmt, header)
        else:
            text = render_report(result, fmt, header)
        written.append(write_text(text, out_dir / f"{name}.{fmt.value}"))
    logger.info(f"Preset {preset}: wrote {len(written)} files to {out_dir}")
    return written


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors are validation errors, not physics errors
        return 0 if exc.code == 0 else 1
    settings = get_settings()
    setup_logging(settings)

    try:
        if args.command == Command.REPRODUCE.value:
            if args.config:
                logger.warning("--config is ignored by reproduce; presets embed their parameters")
            reproduce(args.preset, args.out, OutputFormat(args.format or settings.default_format))
            return 0

        if not args.config:
            raise ConfigParseError(f"--config is required for command {args.command}")
        run = load_config(args.config, overrides_from_args(args))
        logger.debug(f"Run configuration: {run.snapshot()}")
        run_command(run)
        return 0

    except SqueezingError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return exc.exit_code
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return 130


if __name__ == "__main__":
    sys.exit(main())
