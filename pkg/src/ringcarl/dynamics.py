"""Closed-form fields, optical potential and forces for a pumped ring cavity.

Units: hbar = k = 1, time in 1/kappa (kappa itself is kept as a parameter so
the lossless limit can be taken). Lengths are in 1/k, so the optical lattice
period is pi and the wavelength is 2*pi. Energies are in hbar*kappa when
kappa = 1.

Sign conventions: ``r_minus = <exp(2ikx)>`` couples into ``da_minus/dt`` and its
conjugate into ``da_plus/dt``. The pump feeds only the + mode. The potential
is ``V(x) = U0 |a_plus e^{ikx} + a_minus e^{-ikx}|^2``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

K = 1.0  # wavenumber, the inverse length unit
HBAR = 1.0
WAVELENGTH = 2.0 * np.pi / K
PERIOD = WAVELENGTH / 2.0  # lattice period of the interference pattern

SINGULAR_RTOL = 1e-14


class SingularDenominatorError(ArithmeticError):
    """Parameters sit on an exact collective resonance of the two modes."""


@dataclass(frozen=True)
class SystemParams:
    n_particles: int = 200
    u0: float = -1.0 / 115.0
    kappa: float = 1.0
    delta_c: float = -2.0
    eta: float = 0.0
    kB_T: float = 1.0
    mass: float = 10.0
    v: float = 0.0

    def __post_init__(self):
        if int(self.n_particles) != self.n_particles or self.n_particles < 1:
            raise ValueError(f"n_particles must be a positive integer, got {self.n_particles}")
        if not self.kappa >= 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if not self.mass > 0:
            raise ValueError(f"mass must be > 0, got {self.mass}")
        if not self.kB_T >= 0:
            raise ValueError(f"kB_T must be >= 0, got {self.kB_T}")
        if not self.eta >= 0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")
        for name in ("u0", "delta_c", "v"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def nu0(self) -> float:
        """Collective cavity shift N*U0."""
        return self.n_particles * self.u0

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class FieldAmplitudes:
    a_plus: complex
    a_minus: complex

    @property
    def product(self) -> complex:
        """a_plus * conj(a_minus), the interference term of the intensity."""
        return self.a_plus * np.conj(self.a_minus)


@dataclass(frozen=True)
class PotentialShape:
    depth_coefficient: float
    alpha: float
    linear_slope: float


def check_bunching(r: complex, tol: float = 1e-12) -> complex:
    r = complex(r)
    if abs(r) > 1.0 + tol:
        raise ValueError(f"|bunching| must be <= 1, got {abs(r)}")
    return r


def detunings(params: SystemParams) -> tuple[float, float]:
    """Doppler-split detunings (delta_plus, delta_minus) = delta_c +- k v."""
    return params.delta_c + K * params.v, params.delta_c - K * params.v


def _shifted(params: SystemParams) -> tuple[complex, complex]:
    d_plus, d_minus = detunings(params)
    nu0 = params.nu0
    return complex(d_plus - nu0, params.kappa), complex(d_minus - nu0, params.kappa)


def _denominator(params: SystemParams, r: complex) -> complex:
    A, B = _shifted(params)
    coupling = params.nu0**2 * abs(r) ** 2
    D = A * B - coupling
    scale = max(1.0, abs(A * B), coupling)
    if abs(D) < SINGULAR_RTOL * scale:
        raise SingularDenominatorError(
            f"collective resonance: |D| = {abs(D):.3e} for delta_c={params.delta_c}, "
            f"v={params.v}, NU0={params.nu0}, |R|={abs(r)}"
        )
    return D


def steady_fields(params: SystemParams, r: complex) -> FieldAmplitudes:
    """Stationary mode amplitudes for a frozen bunching ``r``."""
    r = check_bunching(r)
    D = _denominator(params, r)
    _, B = _shifted(params)
    a_plus = 1j * params.eta * B / D
    a_minus = 1j * params.eta * params.nu0 * r / D
    return FieldAmplitudes(complex(a_plus), complex(a_minus))


def field_product(params: SystemParams, r: complex) -> complex:
    """Closed form of a_plus * conj(a_minus) in steady state."""
    r = check_bunching(r)
    D = _denominator(params, r)
    _, B = _shifted(params)
    return complex(params.eta**2 * B * params.nu0 * np.conj(r) / abs(D) ** 2)


def potential_shift_phi(params: SystemParams) -> float:
    """Phase offset between density peaks and intensity maxima, in (-pi, 0)."""
    _, d_minus = detunings(params)
    detuning = d_minus - params.nu0
    if detuning == 0 and params.kappa == 0:
        raise ValueError("phi undefined for delta_minus = NU0 and kappa = 0")
    return float(np.arctan2(-params.kappa, -detuning))


def frame_acceleration(params: SystemParams, r: complex) -> float:
    """Inertial acceleration that pins a potential minimum on the density peak.

    Returned with the inertial sign, so the potential in the co-moving frame
    carries ``-m g x`` and ``g <= 0`` means the cloud is pushed along the pump.
    """
    r = check_bunching(r)
    D = _denominator(params, r)
    return float(
        -params.eta**2 * (4.0 * K / params.mass) * params.n_particles * params.u0**2
        * abs(r) * params.kappa / abs(D) ** 2
    )


def momentum_rate_acceleration(params: SystemParams, r: complex) -> float:
    """Mean acceleration from the backscattered photon flux, -4 kappa |a-|^2 k / (N m)."""
    a_minus = steady_fields(params, r).a_minus
    return float(-4.0 * params.kappa * abs(a_minus) ** 2 * HBAR * K / (params.n_particles * params.mass))


def potential_shape(fields: FieldAmplitudes, params: SystemParams, g: float = 0.0) -> PotentialShape:
    z = fields.product
    return PotentialShape(
        depth_coefficient=float(abs(params.u0) * abs(z)),
        alpha=float(np.angle(z)),
        linear_slope=float(-params.mass * g),
    )


def potential_at(x, fields: FieldAmplitudes, params: SystemParams, g: float = 0.0):
    """Optical potential plus the inertial tilt ``-m g x``; works on arrays.

    The constant intensity part is kept; it drops out of every force and
    Boltzmann weight.
    """
    x = np.asarray(x, dtype=float)
    z = fields.product
    intensity = (
        abs(fields.a_plus) ** 2 + abs(fields.a_minus) ** 2
        + 2.0 * abs(z) * np.cos(2 * K * x + np.angle(z))
    )
    return HBAR * params.u0 * intensity - params.mass * g * x


def dipole_force(x, fields: FieldAmplitudes, params: SystemParams):
    """-dV/dx of the optical potential (no inertial term); works on arrays."""
    x = np.asarray(x, dtype=float)
    z = fields.product
    # Im[z e^{2ikx}] form avoids extracting modulus and phase
    return 4.0 * HBAR * K * params.u0 * np.imag(z * np.exp(2j * K * x))


def mode_rhs(fields: FieldAmplitudes, r: complex, params: SystemParams) -> tuple[complex, complex]:
    """Time derivatives of (a_plus, a_minus) for a given bunching."""
    d_plus, d_minus = detunings(params)
    nu0 = params.nu0
    a_p, a_m = fields.a_plus, fields.a_minus
    da_p = (1j * d_plus - 1j * nu0 - params.kappa) * a_p - 1j * nu0 * np.conj(r) * a_m + params.eta
    da_m = (1j * d_minus - 1j * nu0 - params.kappa) * a_m - 1j * nu0 * r * a_p
    return complex(da_p), complex(da_m)
