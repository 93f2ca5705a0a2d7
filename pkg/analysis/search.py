"""Searches over the loop parameters: best CBS transmissivity and enhancement bandwidth."""
import math
from typing import Optional

import numpy as np
from loguru import logger
from scipy.optimize import bisect, minimize_scalar

from analysis.sweeps import transmissivity_grid
from physics.coherent_feedback import closed_loop_spectrum
from physics.opo_model import angular_frequency, open_loop_spectrum
from shared.config import get_settings
from shared.errors import DomainError, InvalidParameterError, ThresholdError
from shared.models import (
    Baseline,
    EnhancementReport,
    FeedbackParams,
    OpoParams,
    parameter_snapshot,
)


def baseline_squeezing(op: OpoParams, fb: FeedbackParams, omega: float, baseline: Baseline) -> float:
    """Squeezed-quadrature level of the reference the CF loop is judged against."""
    q = op.squeezed_quadrature
    if baseline is Baseline.UNCONTROLLED:
        return open_loop_spectrum(op, omega, q)
    return closed_loop_spectrum(op, fb.model_copy(update={'T2': 1.0}), omega, q)


def optimal_transmissivity(
    op: OpoParams,
    fb_template: FeedbackParams,
    frequency_hz: float,
    baseline: Baseline = Baseline.UNCONTROLLED,
    grid_points: Optional[int] = None,
    xtol: Optional[float] = None,
) -> EnhancementReport:
    """Find the T2 minimizing the squeezed quadrature at one frequency and compare it with the baseline.

    A coarse grid over (0, 1] locates the best cell; golden-section search
    refines inside the neighbouring cells. Grid points above the closed-loop
    threshold are skipped. The refined value is only kept when it beats the
    grid minimum.
    """
    settings = get_settings()
    grid_points = grid_points or settings.optimizer_grid_points
    xtol = xtol or settings.optimizer_xtol

    omega = angular_frequency(frequency_hz)
    reference = baseline_squeezing(op, fb_template, omega, baseline)

    q = op.squeezed_quadrature

    def squeezed_level(t2: float) -> float:
        if not 0.0 < t2 <= 1.0:
            return math.inf
        fb = fb_template.model_copy(update={'T2': float(t2)})
        try:
            return closed_loop_spectrum(op, fb, omega, q)
        except ThresholdError:
            return math.inf

    grid = transmissivity_grid(grid_points)
    values = np.array([squeezed_level(float(t2)) for t2 in grid])
    if not np.isfinite(values).any():
        raise ThresholdError(f"every T2 grid point is above the closed-loop threshold for x = {op.x:g}", x=op.x)

    k = int(np.argmin(values))
    t2_star, s_star = float(grid[k]), float(values[k])

    if 0 < k < len(grid) - 1 and values[k] < values[k - 1] and values[k] < values[k + 1]:
        bracket = (float(grid[k - 1]), t2_star, float(grid[k + 1]))
        result = minimize_scalar(squeezed_level, bracket=bracket, method='golden', tol=xtol)
        logger.debug(f"Golden refinement in {bracket[0]:.6f}..{bracket[2]:.6f}: T2={result.x:.9f}, S-={result.fun:.12g}")
        if result.fun < s_star:
            t2_star, s_star = float(result.x), float(result.fun)

    improved = s_star < reference
    improvement_db = 10.0 * math.log10(reference / s_star) if improved else 0.0

    snapshot = parameter_snapshot(op, fb_template)
    snapshot['feedback.T2'] = 'optimized'
    snapshot['squeezed_quadrature'] = q.value
    snapshot['frequency_hz'] = frequency_hz
    if improved:
        logger.info(f"T2* = {t2_star:.6f}: the {q.value} quadrature improves by {improvement_db:.4f} dB over the {baseline.value} baseline")
    else:
        logger.info(f"No T2 < 1 improves on the {baseline.value} baseline at x = {op.x:g}")
    return EnhancementReport(
        t2_star=t2_star,
        s_minus_at_star=s_star,
        baseline_s_minus=reference,
        improvement_db=improvement_db,
        improved=improved,
        baseline=baseline,
        params_snapshot=snapshot,
    )


def enhancement_bandwidth(
    op: OpoParams,
    fb: FeedbackParams,
    f_max: float,
    steps: Optional[int] = None,
    xtol_hz: Optional[float] = None,
) -> float:
    """Crossover frequency (Hz) below which the CF loop beats T2 = 1 at the same L2.

    Returns 0 when the loop does not enhance squeezing at the lowest scanned
    frequency, and f_max when it still does at f_max.
    """
    settings = get_settings()
    steps = steps or settings.bandwidth_steps
    xtol_hz = xtol_hz or settings.bandwidth_xtol_hz
    if f_max <= 0:
        raise InvalidParameterError(f"f_max must be positive, got {f_max:g}", field="f_max")
    if fb.T2 == 1.0:
        return 0.0

    reference = fb.model_copy(update={'T2': 1.0})
    q = op.squeezed_quadrature

    def gap(f: np.ndarray):
        omega = angular_frequency(f)
        return (closed_loop_spectrum(op, fb, omega, q)
                - closed_loop_spectrum(op, reference, omega, q))

    freqs = np.arange(1, steps + 1) * (f_max / steps)
    gaps = gap(freqs)
    if np.isnan(gaps).any():
        raise DomainError("spectrum evaluation produced NaN during the bandwidth scan")
    crossed = np.flatnonzero(gaps >= 0.0)
    if crossed.size == 0:
        logger.debug(f"No crossover below {f_max:g} Hz for T2={fb.T2:g}")
        return float(f_max)
    k = int(crossed[0])
    if k == 0:
        return 0.0

    f_band = bisect(lambda f: float(gap(f)), float(freqs[k - 1]), float(freqs[k]), xtol=xtol_hz)
    logger.debug(f"Enhancement bandwidth for T2={fb.T2:g}: {f_band:.1f} Hz")
    return float(f_band)
