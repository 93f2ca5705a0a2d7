"""CSV and JSON emission of series and reports.

Powers are the stored values; dB columns are derived from the unrounded
powers. Every float is written with ``Settings.significant_digits``
significant digits and nothing time-dependent is written, so identical runs
produce byte-identical files.
"""
import io
import json
import math
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import pandas as pd
from loguru import logger

from shared.config import get_settings
from shared.errors import OutputError
from shared.models import (
    EnhancementReport,
    OutputFormat,
    SpectrumPoint,
    SpectrumSeries,
    ThresholdReport,
)

Report = Union[EnhancementReport, ThresholdReport]

SERIES_COLUMNS = ['axis_value', 's_plus', 's_minus', 's_plus_db', 's_minus_db', 'status']


def _digits() -> int:
    return get_settings().significant_digits


def format_number(value: float, digits: Optional[int] = None) -> str:
    return f"{value:.{digits or _digits()}g}"


def round_significant(value: Any, digits: Optional[int] = None) -> Any:
    """Round floats to the output precision; other values pass through."""
    if isinstance(value, float) and math.isfinite(value):
        return float(format_number(value, digits))
    if isinstance(value, dict):
        return {k: round_significant(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_significant(v, digits) for v in value]
    return value


def _header_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format_number(value)
    return str(getattr(value, 'value', value))


def merged_header(snapshot: Mapping[str, Any], run_header: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
    """Run-level fields first, then the generating snapshot; each key once."""
    header: Dict[str, Any] = dict(run_header or {})
    header.update(snapshot)
    return header


def _header_block(header: Mapping[str, Any]) -> str:
    return "".join(f"# {key} = {_header_value(value)}\n" for key, value in header.items())


def _point_row(point: SpectrumPoint) -> Dict[str, Any]:
    return {
        'axis_value': point.axis_value,
        's_plus': point.s_plus,
        's_minus': point.s_minus,
        's_plus_db': point.s_plus_db,
        's_minus_db': point.s_minus_db,
        'status': point.status.value,
    }


def render_series(series: SpectrumSeries, fmt: OutputFormat, run_header: Optional[Mapping[str, Any]] = None) -> str:
    """Serialize a series to CSV (with a '#' header block) or JSON text."""
    header = merged_header(series.params_snapshot, run_header)
    rows = [_point_row(p) for p in series.points]

    if fmt is OutputFormat.JSON:
        document = {
            'stage': series.stage.value,
            'axis': series.axis.value,
            'params_snapshot': round_significant(header),
            'points': round_significant(rows),
        }
        return json.dumps(document, indent=2) + "\n"

    frame = pd.DataFrame(rows, columns=SERIES_COLUMNS)
    buffer = io.StringIO()
    buffer.write(f"# stage = {series.stage.value}\n# axis = {series.axis.value}\n")
    buffer.write(_header_block(header))
    frame.to_csv(buffer, index=False, float_format=f"%.{_digits()}g", lineterminator="\n")
    return buffer.getvalue()


def render_report(report: Report, fmt: OutputFormat, run_header: Optional[Mapping[str, Any]] = None) -> str:
    """Serialize an optimizer or threshold report as JSON or a key,value CSV table."""
    values = report.model_dump(mode='json', exclude={'params_snapshot'})
    header = merged_header(report.params_snapshot, run_header)

    if fmt is OutputFormat.JSON:
        document = {
            'report': type(report).__name__,
            **round_significant(values),
            'params_snapshot': round_significant(header),
        }
        return json.dumps(document, indent=2) + "\n"

    frame = pd.DataFrame({'key': list(values), 'value': [_header_value(v) for v in values.values()]})
    buffer = io.StringIO()
    buffer.write(f"# report = {type(report).__name__}\n")
    buffer.write(_header_block(header))
    frame.to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def write_text(text: str, path: Union[str, Path]) -> Path:
    """Write output text, resolving relative paths against OUTPUT_DIR."""
    target = get_settings().get_output_path(str(path))
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {target}: {exc}") from exc
    logger.debug(f"Wrote {target}")
    return target


def emit_series(
    series: SpectrumSeries,
    fmt: OutputFormat,
    path: Union[str, Path],
    run_header: Optional[Mapping[str, Any]] = None,
) -> Path:
    return write_text(render_series(series, fmt, run_header), path)


def emit_report(
    report: Report,
    fmt: OutputFormat,
    path: Union[str, Path],
    run_header: Optional[Mapping[str, Any]] = None,
) -> Path:
    return write_text(render_report(report, fmt, run_header), path)


def load_series_json(text: str) -> SpectrumSeries:
    """Rebuild a series from emitted JSON (derived dB columns are dropped)."""
    document = json.loads(text)
    points = [
        SpectrumPoint(
            axis_value=p['axis_value'],
            s_plus=p['s_plus'],
            s_minus=p['s_minus'],
            status=p['status'],
        )
        for p in document['points']
    ]
    return SpectrumSeries(
        stage=document['stage'],
        axis=document['axis'],
        points=points,
        params_snapshot=document['params_snapshot'],
    )
