"""Flat ``key = value`` run configuration documents.

Syntax follows dotenv rules (``#`` comments, blank lines, optional quotes)
and is parsed with python-dotenv's stream parser so every binding keeps its
line number for error messages. Keys map onto the run records as follows::

    T1 L1 l x pump_sign                     -> OpoParams
    T2 L2 la lb                             -> FeedbackParams
    xi rho                                  -> DetectionParams (both or neither)
    command                                 -> Command
    frequency_hz grid_points f_min_hz ...   -> CommandArgs
    output_path output_format               -> OutputSpec
"""
import io
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from dotenv.parser import parse_stream

from shared.config import get_settings
from shared.errors import ConfigParseError, ConfigValidationError
from shared.models import (
    Command,
    CommandArgs,
    DetectionParams,
    FeedbackParams,
    OpoParams,
    OutputSpec,
    RunConfig,
    build_model,
)

OPO_KEYS = ('T1', 'L1', 'l', 'x', 'pump_sign')
FEEDBACK_KEYS = ('T2', 'L2', 'la', 'lb')
DETECTION_KEYS = ('xi', 'rho')
ARG_KEYS = tuple(CommandArgs.model_fields)
OUTPUT_KEYS = {'output_path': 'path', 'output_format': 'format'}

REQUIRED_KEYS = ('T1', 'L1', 'l', 'L2', 'la', 'lb')
# threshold is the one command that needs no further arguments
DEFAULTS = {'x': '0', 'pump_sign': '1', 'T2': '1', 'command': Command.THRESHOLD.value}

KNOWN_KEYS = frozenset(OPO_KEYS + FEEDBACK_KEYS + DETECTION_KEYS + ARG_KEYS + ('command',) + tuple(OUTPUT_KEYS))

# Commands that evaluate at a single sideband frequency
NEEDS_FREQUENCY = (Command.SPECTRUM, Command.SWEEP_T2, Command.SWEEP_PUMP, Command.OPTIMIZE)


def read_bindings(text: str) -> Dict[str, str]:
    """Parse a document into an ordered key -> raw value mapping."""
    values: Dict[str, str] = {}
    for binding in parse_stream(io.StringIO(text)):
        line = binding.original.line
        if binding.error:
            raise ConfigParseError(f"cannot parse {binding.original.string.strip()!r}", line=line)
        if binding.key is None:
            continue
        if binding.key not in KNOWN_KEYS:
            raise ConfigParseError(f"unknown key {binding.key!r}", line=line)
        if binding.value is None:
            raise ConfigParseError(f"key {binding.key!r} has no value", line=line)
        if binding.key in values:
            raise ConfigParseError(f"duplicate key {binding.key!r}", line=line)
        values[binding.key] = binding.value.strip()
    return values


def _pick(values: Mapping[str, Any], keys) -> Dict[str, Any]:
    return {key: values[key] for key in keys if key in values and values[key] not in (None, '')}


def _coerce_sign(values: Dict[str, Any]) -> None:
    raw = values.get('pump_sign')
    if isinstance(raw, str):
        try:
            values['pump_sign'] = int(raw)
        except ValueError:
            pass


def _fill_command_defaults(command: Command, args: Dict[str, Any]) -> None:
    settings = get_settings()
    if command in NEEDS_FREQUENCY and 'frequency_hz' not in args:
        raise ConfigValidationError(f"frequency_hz is required for command {command.value}", field='frequency_hz')
    if command is Command.SWEEP_FREQ:
        for key in ('f_min_hz', 'f_max_hz'):
            if key not in args:
                raise ConfigValidationError(f"{key} is required for command {command.value}", field=key)
        args.setdefault('n_points', settings.frequency_points)
    if command in (Command.SWEEP_T2, Command.SWEEP_PUMP):
        args.setdefault('grid_points', settings.t2_grid_points)
    if command is Command.REPRODUCE and 'preset' not in args:
        raise ConfigValidationError("preset is required for command reproduce", field='preset')


def build_run_config(values: Mapping[str, Any]) -> RunConfig:
    """Validate a flat key -> value mapping into a RunConfig, recording every default."""
    merged: Dict[str, Any] = dict(DEFAULTS)
    merged.update({k: v for k, v in values.items() if v is not None})

    missing = [key for key in REQUIRED_KEYS if key not in merged]
    if missing:
        raise ConfigValidationError(f"missing required keys: {', '.join(missing)}", field=missing[0])

    opo_values = _pick(merged, OPO_KEYS)
    _coerce_sign(opo_values)
    opo = build_model(OpoParams, opo_values, ConfigValidationError)
    feedback = build_model(FeedbackParams, _pick(merged, FEEDBACK_KEYS), ConfigValidationError)

    detection_values = _pick(merged, DETECTION_KEYS)
    detection = None
    if detection_values:
        absent = [key for key in DETECTION_KEYS if key not in detection_values]
        if absent:
            raise ConfigValidationError(f"xi and rho must be given together (missing {absent[0]})", field=absent[0])
        detection = build_model(DetectionParams, detection_values, ConfigValidationError)

    try:
        command = Command(merged['command'])
    except ValueError:
        choices = ', '.join(c.value for c in Command)
        raise ConfigValidationError(f"command = {merged['command']} is not one of {choices}", field='command')

    arg_values = _pick(merged, ARG_KEYS)
    command_args = build_model(CommandArgs, arg_values, ConfigValidationError)
    filled = command_args.model_dump(exclude_none=True, exclude_defaults=True)
    _fill_command_defaults(command, filled)
    command_args = build_model(CommandArgs, filled, ConfigValidationError)
    if command is Command.SWEEP_FREQ and command_args.f_min_hz >= command_args.f_max_hz:
        raise ConfigValidationError(
            f"f_min_hz = {command_args.f_min_hz:g} must be below f_max_hz = {command_args.f_max_hz:g}",
            field='f_min_hz',
        )

    output_values = {OUTPUT_KEYS[k]: v for k, v in _pick(merged, OUTPUT_KEYS).items()}
    output_values.setdefault('format', get_settings().default_format)
    output = build_model(OutputSpec, output_values, ConfigValidationError)

    return RunConfig(
        opo=opo,
        feedback=feedback,
        detection=detection,
        command=command,
        command_args=command_args,
        output=output,
    )


def parse_config(text: str, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """Parse and validate a run configuration document.

    ``overrides`` (typically command-line options) replace document values
    before validation; None values are ignored.
    """
    values: Dict[str, Any] = dict(read_bindings(text))
    if overrides:
        unknown = sorted(set(overrides) - KNOWN_KEYS)
        if unknown:
            raise ConfigParseError(f"unknown override key {unknown[0]!r}")
        values.update({k: v for k, v in overrides.items() if v is not None})
    return build_run_config(values)


def load_config(path: Union[str, Path], overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """Read a configuration file from disk and parse it."""
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigParseError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text, overrides)
