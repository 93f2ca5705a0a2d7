"""Open-loop OPO: damping rates, transfer functions and vacuum noise spectra.

All spectra are normalized so that the quantum noise limit is 1. Functions
taking ``omega`` accept a float (returning Python scalars) or a numpy array
(returning arrays of the same shape); ``omega`` is a sideband angular
frequency in rad/s measured from the carrier.
"""
from typing import Tuple, Union

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from shared.errors import DomainError, ThresholdError
from shared.models import OpoParams, QuadratureSign, TransferQuad

ArrayLike = Union[float, np.ndarray]


def angular_frequency(f_hz: ArrayLike) -> ArrayLike:
    """Convert an ordinary frequency in Hz to angular frequency in rad/s."""
    return 2.0 * np.pi * f_hz


def damping_rates(p: OpoParams) -> Tuple[float, float, float]:
    """Return (gamma1, gammaL1, gamma) in 1/s."""
    gamma1 = SPEED_OF_LIGHT * p.T1 / p.l
    gamma_l1 = SPEED_OF_LIGHT * p.L1 / p.l
    return gamma1, gamma_l1, gamma1 + gamma_l1


def pump_amplitude(p: OpoParams) -> float:
    """Signed real pump amplitude epsilon = pump_sign * x * gamma / 2."""
    _, _, gamma = damping_rates(p)
    return p.pump_sign * p.x * gamma / 2.0


def require_below_threshold(p: OpoParams) -> None:
    if p.x >= 1.0:
        raise ThresholdError(
            f"pump strength x = {p.x:g} is at or above the open-loop oscillation threshold x = 1",
            x=p.x,
            x_threshold=1.0,
        )


def collapse(value):
    """0-d arrays and numpy scalars back to Python scalars, arrays untouched."""
    if isinstance(value, np.generic) or (isinstance(value, np.ndarray) and value.ndim == 0):
        return value.item()
    return value


def abs2(z):
    """|z|^2 without the square root."""
    return z.real * z.real + z.imag * z.imag


def transfer_functions(p: OpoParams, omega: ArrayLike) -> TransferQuad:
    """Evaluate G, g, Gbar, gbar of the OPO at sideband frequency omega."""
    require_below_threshold(p)
    gamma1, gamma_l1, gamma = damping_rates(p)
    eps = pump_amplitude(p)

    w = np.asarray(omega, dtype=float)
    s = gamma / 2.0 - 1j * w
    loss_term = gamma_l1 / 2.0 - 1j * w
    denominator = s * s - eps * eps

    G = ((gamma1 / 2.0) ** 2 - loss_term * loss_term + eps * eps) / denominator
    Gbar = np.sqrt(gamma1 * gamma_l1) * s / denominator
    g = eps * gamma1 / denominator
    gbar = np.sqrt(gamma_l1 / gamma1) * g

    return TransferQuad(
        G=collapse(G),
        g=collapse(g),
        Gbar=collapse(Gbar),
        gbar=collapse(gbar),
        omega=collapse(w),
    )


def open_loop_spectrum(p: OpoParams, omega: ArrayLike, q: QuadratureSign) -> ArrayLike:
    """Vacuum-input output spectrum S+/-_out1 = |G +/- g|^2 + |Gbar +/- gbar|^2."""
    tq = transfer_functions(p, omega)
    direct, loss = tq.quadrature(q)
    return collapse(abs2(direct) + abs2(loss))


def dc_lossless_spectrum(p: OpoParams, q: QuadratureSign) -> float:
    """Closed form of the open-loop spectrum at omega = 0 for a lossless cavity."""
    if p.L1 != 0.0:
        raise DomainError(f"the lossless closed form needs L1 = 0, got L1 = {p.L1:g}")
    require_below_threshold(p)
    gamma1, _, _ = damping_rates(p)
    eps = pump_amplitude(p)
    if q is QuadratureSign.PLUS:
        return ((gamma1 + 2.0 * eps) / (gamma1 - 2.0 * eps)) ** 2
    return ((gamma1 - 2.0 * eps) / (gamma1 + 2.0 * eps)) ** 2


def uncertainty_product(s_plus: ArrayLike, s_minus: ArrayLike) -> ArrayLike:
    """S+ * S-; at least 1 for any physical state."""
    return s_plus * s_minus
