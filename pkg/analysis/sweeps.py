"""Sweeps of the closed-loop spectra over T2, frequency and pump strength.

Every point is evaluated by the same single-point calls a library user would
make (``closed_loop_spectrum`` at ``angular_frequency(f)``), so any series
point can be reproduced exactly from its snapshot. Points at or above the
closed-loop threshold stay in the series with status ``above_threshold``.
"""
from typing import Callable, Optional, Sequence

import numpy as np
from loguru import logger

from physics.coherent_feedback import closed_loop_spectrum, detected_spectrum
from physics.opo_model import ArrayLike, angular_frequency, open_loop_spectrum, uncertainty_product
from shared.config import get_settings
from shared.errors import DomainError, InvalidParameterError, ThresholdError
from shared.models import (
    DetectionParams,
    FeedbackParams,
    OpoParams,
    PointStatus,
    QuadratureSign,
    Spacing,
    SpectrumPoint,
    SpectrumSeries,
    SpectrumStage,
    SweepAxis,
    parameter_snapshot,
)


def to_db(s: ArrayLike) -> ArrayLike:
    """Power relative to the QNL in dB: 10 log10(S)."""
    values = np.asarray(s, dtype=float)
    if np.any(values <= 0) or np.any(np.isnan(values)):
        raise DomainError("dB conversion needs strictly positive powers")
    levels = 10.0 * np.log10(values)
    return levels.item() if levels.ndim == 0 else levels


def transmissivity_grid(n: int) -> np.ndarray:
    """n evenly spaced T2 values on (0, 1], ending at 1."""
    if n < 1:
        raise InvalidParameterError(f"grid needs at least one point, got {n}", field="grid")
    return np.linspace(0.0, 1.0, n + 1)[1:]


def frequency_grid(f_min: float, f_max: float, n: int, spacing: Spacing = Spacing.LINEAR) -> np.ndarray:
    """n frequencies from f_min to f_max (Hz), linear or logarithmic."""
    if not 0 < f_min < f_max:
        raise InvalidParameterError(f"need 0 < f_min < f_max, got f_min={f_min:g}, f_max={f_max:g}", field="fmin")
    if n < 2:
        raise InvalidParameterError(f"need at least 2 frequencies, got {n}", field="n")
    if spacing is Spacing.LOG:
        return np.geomspace(f_min, f_max, n)
    return np.linspace(f_min, f_max, n)


def _check_increasing(grid: Sequence[float], name: str) -> None:
    values = list(grid)
    if not values:
        raise InvalidParameterError(f"{name} grid is empty", field=name)
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InvalidParameterError(f"{name} grid must be strictly increasing", field=name)


def _stage(det: Optional[DetectionParams]) -> SpectrumStage:
    return SpectrumStage.CLOSED_LOOP if det is None else SpectrumStage.DETECTED


def evaluate_point(
    axis_value: float,
    spectrum: Callable[[QuadratureSign], float],
    det: Optional[DetectionParams] = None,
) -> SpectrumPoint:
    """Evaluate both quadratures, flagging the point instead of raising above threshold."""
    try:
        s_plus = spectrum(QuadratureSign.PLUS)
        s_minus = spectrum(QuadratureSign.MINUS)
    except ThresholdError as exc:
        logger.debug(f"Point {axis_value:g} above threshold: {exc}")
        return SpectrumPoint(axis_value=axis_value, status=PointStatus.ABOVE_THRESHOLD)
    if det is not None:
        s_plus = detected_spectrum(s_plus, det)
        s_minus = detected_spectrum(s_minus, det)
    return SpectrumPoint(axis_value=axis_value, s_plus=s_plus, s_minus=s_minus)


def _finish(series: SpectrumSeries) -> SpectrumSeries:
    flagged = len(series.flagged)
    if flagged:
        logger.warning(
            f"{flagged} of {len(series.points)} {series.axis.value} points are above the oscillation threshold"
        )
    return series


def sweep_transmissivity(
    op: OpoParams,
    fb_template: FeedbackParams,
    frequency_hz: float,
    grid: Sequence[float],
    det: Optional[DetectionParams] = None,
) -> SpectrumSeries:
    """S+/- versus CBS transmissivity T2 at a fixed sideband frequency."""
    _check_increasing(grid, "T2")
    if grid[0] <= 0.0 or grid[-1] > 1.0:
        raise InvalidParameterError("T2 grid values must lie in (0, 1]", field="T2")

    omega = angular_frequency(frequency_hz)
    points = []
    for t2 in grid:
        fb = fb_template.model_copy(update={'T2': float(t2)})
        points.append(evaluate_point(
            float(t2),
            lambda q, fb=fb: closed_loop_spectrum(op, fb, omega, q),
            det,
        ))

    snapshot = parameter_snapshot(op, fb_template, det)
    snapshot['feedback.T2'] = 'swept'
    snapshot['frequency_hz'] = frequency_hz
    logger.debug(f"T2 sweep: {len(points)} points at {frequency_hz:g} Hz, x={op.x:g}")
    return _finish(SpectrumSeries(
        stage=_stage(det),
        axis=SweepAxis.TRANSMISSIVITY_T2,
        points=points,
        params_snapshot=snapshot,
    ))


def sweep_frequency(
    op: OpoParams,
    fb: FeedbackParams,
    f_min: float,
    f_max: float,
    n: Optional[int] = None,
    det: Optional[DetectionParams] = None,
    spacing: Spacing = Spacing.LINEAR,
) -> SpectrumSeries:
    """S+/- versus sideband frequency (Hz) at fixed feedback parameters."""
    if n is None:
        n = get_settings().frequency_points
    grid = frequency_grid(f_min, f_max, n, spacing)

    points = []
    for f in grid:
        f = float(f)
        omega = angular_frequency(f)
        points.append(evaluate_point(
            f,
            lambda q, omega=omega: closed_loop_spectrum(op, fb, omega, q),
            det,
        ))

    snapshot = parameter_snapshot(op, fb, det)
    snapshot['spacing'] = spacing.value
    logger.debug(f"Frequency sweep: {n} points {f_min:g}-{f_max:g} Hz, T2={fb.T2:g}")
    return _finish(SpectrumSeries(
        stage=_stage(det),
        axis=SweepAxis.FREQUENCY_HZ,
        points=points,
        params_snapshot=snapshot,
    ))


def sweep_pump(
    op_template: OpoParams,
    fb: FeedbackParams,
    frequency_hz: float,
    grid: Sequence[float],
    det: Optional[DetectionParams] = None,
) -> SpectrumSeries:
    """S+/- versus normalized pump strength x at fixed frequency and T2."""
    _check_increasing(grid, "x")
    if grid[0] < 0.0:
        raise InvalidParameterError("pump strengths must be non-negative", field="x")

    omega = angular_frequency(frequency_hz)
    points = []
    for x in grid:
        op = op_template.model_copy(update={'x': float(x)})
        points.append(evaluate_point(
            float(x),
            lambda q, op=op: closed_loop_spectrum(op, fb, omega, q),
            det,
        ))

    snapshot = parameter_snapshot(op_template, fb, det)
    snapshot['opo.x'] = 'swept'
    snapshot['frequency_hz'] = frequency_hz
    return _finish(SpectrumSeries(
        stage=_stage(det),
        axis=SweepAxis.PUMP_STRENGTH_X,
        points=points,
        params_snapshot=snapshot,
    ))


def pump_grid(n: int, x_max: float = 1.0) -> np.ndarray:
    """n evenly spaced pump strengths on [0, x_max)."""
    if n < 1:
        raise InvalidParameterError(f"grid needs at least one point, got {n}", field="grid")
    return np.linspace(0.0, x_max, n, endpoint=False)


def baseline_series(op: OpoParams, frequency_hz: float, det: Optional[DetectionParams] = None) -> SpectrumSeries:
    """Uncontrolled OPO (T2 = 1, L2 = 0) at one frequency, as a single T2 = 1 point."""
    omega = angular_frequency(frequency_hz)
    point = evaluate_point(1.0, lambda q: open_loop_spectrum(op, omega, q), det)
    snapshot = parameter_snapshot(op, None, det)
    snapshot['feedback.T2'] = 1.0
    snapshot['feedback.L2'] = 0.0
    snapshot['frequency_hz'] = frequency_hz
    return SpectrumSeries(
        stage=SpectrumStage.OPEN_LOOP if det is None else SpectrumStage.DETECTED,
        axis=SweepAxis.TRANSMISSIVITY_T2,
        points=[point],
        params_snapshot=snapshot,
    )


def spectrum_at(
    op: OpoParams,
    fb: FeedbackParams,
    frequency_hz: float,
    det: Optional[DetectionParams] = None,
) -> SpectrumSeries:
    """Both quadratures at one frequency as a one-point series.

    Unlike the sweeps this raises ThresholdError when the operating point is
    at or above the closed-loop threshold.
    """
    omega = angular_frequency(frequency_hz)
    s_plus = closed_loop_spectrum(op, fb, omega, QuadratureSign.PLUS)
    s_minus = closed_loop_spectrum(op, fb, omega, QuadratureSign.MINUS)
    if det is not None:
        s_plus = detected_spectrum(s_plus, det)
        s_minus = detected_spectrum(s_minus, det)
    snapshot = parameter_snapshot(op, fb, det)
    snapshot['uncertainty_product'] = uncertainty_product(s_plus, s_minus)
    return SpectrumSeries(
        stage=_stage(det),
        axis=SweepAxis.FREQUENCY_HZ,
        points=[SpectrumPoint(axis_value=frequency_hz, s_plus=s_plus, s_minus=s_minus)],
        params_snapshot=snapshot,
    )
