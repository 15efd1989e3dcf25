"""Analytic self-organization thresholds of a flat cloud."""
from __future__ import annotations

import numpy as np

from .dynamics import SystemParams, detunings


class ZeroTemperatureError(ValueError):
    pass


class ZeroCouplingError(ValueError):
    pass


def _detuning_factor(params: SystemParams) -> float:
    # |Delta_- - NU0 - i kappa| * |Delta_+ - NU0 + i kappa|^2
    d_plus, d_minus = detunings(params)
    nu0, kappa = params.nu0, params.kappa
    return float(np.hypot(d_minus - nu0, kappa) * ((d_plus - nu0) ** 2 + kappa**2))


def _check(params: SystemParams, need_coupling: bool = False) -> None:
    if not params.kappa > 0:
        raise ValueError("threshold formulas need kappa > 0")
    if not params.kB_T > 0:
        raise ZeroTemperatureError("threshold formulas need kB_T > 0")
    if need_coupling and params.u0 == 0:
        raise ZeroCouplingError("U0 = 0: particles do not couple to the cavity")


def linear_gain(params: SystemParams) -> float:
    """Amplification of a small lambda/2 density modulation per iteration.

    The flat distribution is unstable when the gain exceeds one.
    """
    _check(params)
    return float(params.n_particles * params.u0**2 * params.eta**2 / (params.kB_T * _detuning_factor(params)))


def eta_threshold(params: SystemParams) -> float:
    """Pump amplitude at which ``linear_gain`` reaches one (moving cloud)."""
    _check(params, need_coupling=True)
    return float(np.sqrt(params.kB_T * _detuning_factor(params) / (params.n_particles * params.u0**2)))


def eta_threshold_rest(params: SystemParams) -> float:
    """Threshold for a cloud at rest; ``params.v`` is ignored."""
    _check(params, need_coupling=True)
    radicand = (params.delta_c - params.nu0) ** 2 + params.kappa**2
    return float(np.sqrt(params.kB_T * radicand**1.5 / (params.n_particles * params.u0**2)))


def eta_threshold_min(params: SystemParams) -> float:
    """Lowest rest-frame threshold, reached at delta_c = N U0."""
    _check(params, need_coupling=True)
    return float(np.sqrt(params.kB_T * params.kappa**3 / (params.n_particles * params.u0**2)))


def optimal_backscatter_detuning(params: SystemParams, r_abs: float) -> tuple[float, float] | None:
    """Cavity detunings of maximal backscattering, or None for a bad cavity.

    The pair only exists when kappa < N |U0| r_abs; otherwise the backscatter
    has a single broad maximum at delta_c = N U0.
    """
    if not 0.0 <= r_abs <= 1.0:
        raise ValueError(f"r_abs must lie in [0, 1], got {r_abs}")
    radicand = params.nu0**2 * r_abs**2 - params.kappa**2
    if radicand < 0:
        return None
    root = np.sqrt(radicand)
    return float(params.nu0 - root), float(params.nu0 + root)
