"""Closed-loop coherent feedback around the OPO through a control beam splitter (CBS).

The loop is operated on resonance: the carrier phase accumulated over the
full round trip is fixed to -1 and applied to the loop gain alpha. The
carrier part of the loss-path phase is set to +1; only |beta|^2 enters the
spectrum, so that split is unobservable.
"""
from typing import Optional

import numpy as np
from loguru import logger
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.optimize import bisect

from physics.opo_model import ArrayLike, collapse, abs2, transfer_functions
from shared.config import get_settings
from shared.errors import InvalidParameterError, ThresholdError
from shared.models import DetectionParams, FeedbackParams, OpoParams, QuadratureSign, TransferQuad


def loop_delays(fb: FeedbackParams):
    """Return (tau_a, tau_b) in seconds."""
    return fb.la / SPEED_OF_LIGHT, fb.lb / SPEED_OF_LIGHT


def loop_reflection(fb: FeedbackParams) -> float:
    """sqrt((1 - T2)(1 - L2)): amplitude fed back into the loop per round trip."""
    return float(np.sqrt((1.0 - fb.T2) * (1.0 - fb.L2)))


def _alpha(tq: TransferQuad, fb: FeedbackParams, q: QuadratureSign):
    direct, _ = tq.quadrature(q)
    tau_a, tau_b = loop_delays(fb)
    return fb.carrier_phase * direct * np.exp(1j * tq.omega * (tau_a + tau_b))


def _beta(tq: TransferQuad, fb: FeedbackParams, q: QuadratureSign, carrier_phase_b: complex = 1.0):
    _, loss = tq.quadrature(q)
    _, tau_b = loop_delays(fb)
    return carrier_phase_b * loss * np.exp(1j * tq.omega * tau_b)


def loop_gain_alpha(op: OpoParams, fb: FeedbackParams, omega: ArrayLike, q: QuadratureSign):
    """alpha+/-(omega) = -(G +/- g) exp(i omega (tau_a + tau_b))."""
    return collapse(_alpha(transfer_functions(op, omega), fb, q))


def loss_path_beta(
    op: OpoParams,
    fb: FeedbackParams,
    omega: ArrayLike,
    q: QuadratureSign,
    carrier_phase_b: complex = 1.0,
):
    """beta+/-(omega) = (Gbar +/- gbar) exp(i omega tau_b), carrier part of the phase set to carrier_phase_b."""
    return collapse(_beta(transfer_functions(op, omega), fb, q, carrier_phase_b))


def dc_loop_margin(op: OpoParams, fb: FeedbackParams) -> float:
    """Smallest closed-loop denominator 1 + alpha(0) r over both quadratures.

    alpha(0) is real, so the margin crosses zero exactly where the loop
    round-trip gain reaches unity; it is positive below the threshold.
    """
    tq = transfer_functions(op, 0.0)
    r = loop_reflection(fb)
    margins = []
    for q in QuadratureSign:
        direct, _ = tq.quadrature(q)
        margins.append(1.0 + fb.carrier_phase * complex(direct).real * r)
    return min(margins)


def oscillation_threshold(op: OpoParams, fb: FeedbackParams, xtol: Optional[float] = None) -> float:
    """Pump strength at which the closed loop starts to oscillate; op.x is ignored.

    Returns 1 (the open-loop threshold) when the loop cannot reach unity gain
    below it, e.g. for T2 = 1 or L2 = 1.
    """
    if xtol is None:
        xtol = get_settings().threshold_xtol
    if loop_reflection(fb) == 0.0:
        return 1.0

    def margin(x: float) -> float:
        return dc_loop_margin(op.model_copy(update={'x': x}), fb)

    upper = float(np.nextafter(1.0, 0.0))
    if margin(upper) > 0.0:
        return 1.0
    x_threshold = bisect(margin, 0.0, upper, xtol=xtol)
    logger.debug(f"Closed-loop threshold x* = {x_threshold:.10f} (T2={fb.T2:g}, L2={fb.L2:g})")
    return x_threshold


def closed_loop_spectrum(
    op: OpoParams,
    fb: FeedbackParams,
    omega: ArrayLike,
    q: QuadratureSign,
    guard: Optional[float] = None,
    carrier_phase_b: complex = 1.0,
) -> ArrayLike:
    """Vacuum-input output spectrum S+/-_out2 of the coherent-feedback loop."""
    if guard is None:
        guard = get_settings().denominator_guard

    tq = transfer_functions(op, omega)
    if dc_loop_margin(op, fb) <= guard:
        x_threshold = oscillation_threshold(op, fb)
        raise ThresholdError(
            f"pump strength x = {op.x:g} is at or above the closed-loop threshold "
            f"x* = {x_threshold:.9f} (T2 = {fb.T2:g}, L2 = {fb.L2:g})",
            x=op.x,
            x_threshold=x_threshold,
        )

    alpha = _alpha(tq, fb, q)
    beta = _beta(tq, fb, q, carrier_phase_b)
    T2, L2 = fb.T2, fb.L2
    denominator = 1.0 + alpha * loop_reflection(fb)
    den2 = abs2(denominator)
    if np.any(den2 <= guard * guard):
        raise ThresholdError(
            f"closed-loop denominator vanishes (|1 + alpha r| <= {guard:g}) for x = {op.x:g}",
            x=op.x,
        )

    loop = alpha / denominator
    input_path = np.sqrt(1.0 - T2) + T2 * np.sqrt(1.0 - L2) * loop
    opo_loss_path = T2 * (1.0 - L2) * abs2(beta) / den2
    loop_loss_path = np.sqrt(T2 * L2) - np.sqrt(T2 * (1.0 - L2) * (1.0 - T2) * L2) * loop
    return collapse(abs2(input_path) + opo_loss_path + abs2(loop_loss_path))


def detected_spectrum(s: ArrayLike, det: DetectionParams) -> ArrayLike:
    """Blend a spectrum toward the QNL with the overall detection efficiency: 1 + eta (S - 1)."""
    if np.any(np.asarray(s) < 0):
        raise InvalidParameterError("spectrum values must be non-negative", field="S")
    return 1.0 + det.eta * (s - 1.0)
