"""Direct N-particle + two-mode integration.

Particles are classical point masses in the dipole potential of the two
counter-propagating modes; the modes obey the linear mode equations with the
instantaneous bunching. No spontaneous-emission noise is included. Positions
are folded onto one wavelength, which is exact because everything depends on
x through exp(2ikx) only; momenta are never folded, so the centre-of-mass
drift stays observable.

The detunings include ``params.v`` exactly as in the closed forms, i.e. the
pump is held at fixed frequency in the frame moving with ``v``. For a beam
crossing a lab-fixed pump keep ``v = 0`` and give the beam momentum ``p0``
instead; the backscatter resonance then sits at ``delta_c = N U0 + 2 k v``.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numba
import numpy as np

from . import dynamics
from .dynamics import HBAR, K, WAVELENGTH, FieldAmplitudes, SystemParams
from .stability import eta_threshold

FIELD_MODES = ("dynamic", "adiabatic", "frozen")

OK, NONFINITE = 0, 1


class NonFiniteStateError(FloatingPointError):
    pass


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.005
    t_end: float = 60.0
    record_every: int = 100
    seed: int = 0
    field_mode: str = "dynamic"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if not self.t_end >= self.dt:
            raise ValueError("t_end must be >= dt")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError("record_every must be a positive integer")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.field_mode not in FIELD_MODES:
            raise ValueError(f"field_mode must be one of {FIELD_MODES}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def validate(self, params: SystemParams) -> None:
        limit = max_stable_dt(params)
        if self.dt > limit * (1 + 1e-12):
            raise ValueError(f"dt = {self.dt} exceeds the stability bound {limit:.4g} for these parameters")


def max_stable_dt(params: SystemParams) -> float:
    """0.01 * min(1/kappa, 1/max(|delta_pm - NU0|, 1))."""
    d_plus, d_minus = dynamics.detunings(params)
    inv_kappa = math.inf if params.kappa == 0 else 1.0 / params.kappa
    rate = max(abs(d_plus - params.nu0), abs(d_minus - params.nu0), 1.0)
    return 0.01 * min(inv_kappa, 1.0 / rate)


@dataclass(frozen=True)
class EnsembleState:
    t: float
    x: np.ndarray
    p: np.ndarray
    fields: FieldAmplitudes

    @property
    def n(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class ObservableRecord:
    t: float
    kinetic_energy_per_particle: float
    bunching_abs: float
    bunching_phase: float
    com_momentum: float
    a_plus_sq: float
    a_minus_sq: float


def init_ensemble(params: SystemParams, p0: float = 0.0, seed: int = 0) -> EnsembleState:
    """Uniform positions on one wavelength, Gaussian momenta of variance m kT."""
    rng = np.random.default_rng(seed)
    n = params.n_particles
    x = rng.uniform(0.0, WAVELENGTH, n)
    sigma = math.sqrt(params.mass * params.kB_T)
    p = p0 + sigma * rng.standard_normal(n) if sigma > 0 else np.full(n, float(p0))
    return EnsembleState(0.0, x, p, FieldAmplitudes(0j, 0j))


def ensemble_bunching(state: EnsembleState) -> complex:
    return complex(np.mean(np.exp(2j * K * state.x)))


def forces(state: EnsembleState, params: SystemParams) -> np.ndarray:
    return dynamics.dipole_force(state.x, state.fields, params)


def derivative(state: EnsembleState, params: SystemParams):
    """Return (dx/dt, dp/dt, (da_plus/dt, da_minus/dt)) for the dynamic field model."""
    r = ensemble_bunching(state)
    dx = state.p / params.mass
    dp = forces(state, params)
    da = dynamics.mode_rhs(state.fields, r, params)
    return dx, dp, da


def total_momentum(state: EnsembleState) -> float:
    """Particle momentum plus field momentum hbar k (|a+|^2 - |a-|^2)."""
    f = state.fields
    return float(np.sum(state.p) + HBAR * K * (abs(f.a_plus) ** 2 - abs(f.a_minus) ** 2))


# --- compiled integrator ---------------------------------------------------

@numba.njit(cache=True)
def _fields_rhs(ap, am, r, d_plus, d_minus, nu0, kappa, eta):
    dap = (1j * (d_plus - nu0) - kappa) * ap - 1j * nu0 * np.conj(r) * am + eta
    dam = (1j * (d_minus - nu0) - kappa) * am - 1j * nu0 * r * ap
    return dap, dam


@numba.njit(cache=True)
def _adiabatic_fields(r, d_plus, d_minus, nu0, kappa, eta):
    A = (d_plus - nu0) + 1j * kappa
    B = (d_minus - nu0) + 1j * kappa
    D = A * B - nu0 * nu0 * abs(r) ** 2
    return 1j * eta * B / D, 1j * eta * nu0 * r / D


@numba.njit(cache=True)
def _particle_rhs(x, p, ap, am, u0, mass, dx, dp):
    """Fill dx, dp and return the bunching of x (k = hbar = 1 hard-wired)."""
    n = x.shape[0]
    z = ap * np.conj(am)
    zr, zi = z.real, z.imag
    coef = 4.0 * u0
    sr = 0.0
    si = 0.0
    for j in range(n):
        c = math.cos(2.0 * x[j])
        s = math.sin(2.0 * x[j])
        sr += c
        si += s
        dx[j] = p[j] / mass
        dp[j] = coef * (zr * s + zi * c)  # 4 k U0 Im[z e^{2ikx}]
    return (sr + 1j * si) / n


@numba.njit(cache=True)
def _bunching(x):
    sr = 0.0
    si = 0.0
    for j in range(x.shape[0]):
        sr += math.cos(2.0 * x[j])
        si += math.sin(2.0 * x[j])
    return (sr + 1j * si) / x.shape[0]


@numba.njit(cache=True)
def _integrate(x, p, ap, am, t0, dt, n_steps, record_every,
               u0, nu0, kappa, d_plus, d_minus, eta, mass, adiabatic, frozen, out):
    """Classical RK4 over (x, p, a_plus, a_minus) in place.

    ``adiabatic`` slaves the fields to the instantaneous bunching; ``frozen``
    holds them at their initial values (a test harness for the particle part).

    Writes one observable row into ``out`` at t0 and every ``record_every``
    steps, plus the final step. Returns (status, rows, ap, am, step).
    """
    n = x.shape[0]
    two_pi = 2.0 * math.pi
    k1x = np.empty(n); k1p = np.empty(n)
    k2x = np.empty(n); k2p = np.empty(n)
    k3x = np.empty(n); k3p = np.empty(n)
    k4x = np.empty(n); k4p = np.empty(n)
    xs = np.empty(n); ps = np.empty(n)
    rows = 0
    if adiabatic:
        ap, am = _adiabatic_fields(_bunching(x), d_plus, d_minus, nu0, kappa, eta)
    for step in range(n_steps + 1):
        if step % record_every == 0 or step == n_steps:
            r = _bunching(x)
            ek = 0.0
            pm = 0.0
            for j in range(n):
                ek += p[j] * p[j]
                pm += p[j]
            out[rows, 0] = t0 + step * dt
            out[rows, 1] = ek / (2.0 * mass * n)
            out[rows, 2] = abs(r)
            out[rows, 3] = math.atan2(r.imag, r.real)
            out[rows, 4] = pm / n
            out[rows, 5] = abs(ap) ** 2
            out[rows, 6] = abs(am) ** 2
            rows += 1
            if not (math.isfinite(ek) and math.isfinite(out[rows - 1, 5]) and math.isfinite(out[rows - 1, 6])):
                return NONFINITE, rows, ap, am, step
        if step == n_steps:
            break

        if adiabatic:
            r = _bunching(x)
            ap, am = _adiabatic_fields(r, d_plus, d_minus, nu0, kappa, eta)
            _particle_rhs(x, p, ap, am, u0, mass, k1x, k1p)
            for j in range(n):
                xs[j] = x[j] + 0.5 * dt * k1x[j]; ps[j] = p[j] + 0.5 * dt * k1p[j]
            r2 = _bunching(xs)
            a2p, a2m = _adiabatic_fields(r2, d_plus, d_minus, nu0, kappa, eta)
            _particle_rhs(xs, ps, a2p, a2m, u0, mass, k2x, k2p)
            for j in range(n):
                xs[j] = x[j] + 0.5 * dt * k2x[j]; ps[j] = p[j] + 0.5 * dt * k2p[j]
            r3 = _bunching(xs)
            a3p, a3m = _adiabatic_fields(r3, d_plus, d_minus, nu0, kappa, eta)
            _particle_rhs(xs, ps, a3p, a3m, u0, mass, k3x, k3p)
            for j in range(n):
                xs[j] = x[j] + dt * k3x[j]; ps[j] = p[j] + dt * k3p[j]
            r4 = _bunching(xs)
            a4p, a4m = _adiabatic_fields(r4, d_plus, d_minus, nu0, kappa, eta)
            _particle_rhs(xs, ps, a4p, a4m, u0, mass, k4x, k4p)
        else:
            r1 = _particle_rhs(x, p, ap, am, u0, mass, k1x, k1p)
            k1ap, k1am = _fields_rhs(ap, am, r1, d_plus, d_minus, nu0, kappa, eta)
            for j in range(n):
                xs[j] = x[j] + 0.5 * dt * k1x[j]; ps[j] = p[j] + 0.5 * dt * k1p[j]
            if frozen:
                k1ap = 0j; k1am = 0j
            a2p = ap + 0.5 * dt * k1ap; a2m = am + 0.5 * dt * k1am
            r2 = _particle_rhs(xs, ps, a2p, a2m, u0, mass, k2x, k2p)
            k2ap, k2am = _fields_rhs(a2p, a2m, r2, d_plus, d_minus, nu0, kappa, eta)
            for j in range(n):
                xs[j] = x[j] + 0.5 * dt * k2x[j]; ps[j] = p[j] + 0.5 * dt * k2p[j]
            if frozen:
                k2ap = 0j; k2am = 0j
            a3p = ap + 0.5 * dt * k2ap; a3m = am + 0.5 * dt * k2am
            r3 = _particle_rhs(xs, ps, a3p, a3m, u0, mass, k3x, k3p)
            k3ap, k3am = _fields_rhs(a3p, a3m, r3, d_plus, d_minus, nu0, kappa, eta)
            for j in range(n):
                xs[j] = x[j] + dt * k3x[j]; ps[j] = p[j] + dt * k3p[j]
            if frozen:
                k3ap = 0j; k3am = 0j
            a4p = ap + dt * k3ap; a4m = am + dt * k3am
            r4 = _particle_rhs(xs, ps, a4p, a4m, u0, mass, k4x, k4p)
            k4ap, k4am = _fields_rhs(a4p, a4m, r4, d_plus, d_minus, nu0, kappa, eta)
            if not frozen:
                ap = ap + dt / 6.0 * (k1ap + 2.0 * k2ap + 2.0 * k3ap + k4ap)
                am = am + dt / 6.0 * (k1am + 2.0 * k2am + 2.0 * k3am + k4am)

        for j in range(n):
            x[j] += dt / 6.0 * (k1x[j] + 2.0 * k2x[j] + 2.0 * k3x[j] + k4x[j])
            p[j] += dt / 6.0 * (k1p[j] + 2.0 * k2p[j] + 2.0 * k3p[j] + k4p[j])
            x[j] -= two_pi * math.floor(x[j] / two_pi)
        if adiabatic:
            ap, am = _adiabatic_fields(_bunching(x), d_plus, d_minus, nu0, kappa, eta)
        if not (math.isfinite(ap.real) and math.isfinite(ap.imag)
                and math.isfinite(am.real) and math.isfinite(am.imag)):
            return NONFINITE, rows, ap, am, step + 1
    return OK, rows, ap, am, n_steps


def _advance(state: EnsembleState, params: SystemParams, dt: float, n_steps: int,
             record_every: int, field_mode: str):
    if field_mode not in FIELD_MODES:
        raise ValueError(f"field_mode must be one of {FIELD_MODES}")
    x = np.array(state.x, dtype=np.float64)
    p = np.array(state.p, dtype=np.float64)
    d_plus, d_minus = dynamics.detunings(params)
    n_rows = n_steps // record_every + 2
    out = np.empty((n_rows, 7))
    status, rows, ap, am, step = _integrate(
        x, p, complex(state.fields.a_plus), complex(state.fields.a_minus), float(state.t),
        float(dt), int(n_steps), int(record_every),
        float(params.u0), float(params.nu0), float(params.kappa), float(d_plus), float(d_minus),
        float(params.eta), float(params.mass), field_mode == "adiabatic", field_mode == "frozen", out,
    )
    if status == NONFINITE:
        raise NonFiniteStateError(
            f"non-finite state at t = {state.t + step * dt:.6g} (step {step}); "
            f"|a+|^2 = {abs(ap) ** 2:.3e}, |a-|^2 = {abs(am) ** 2:.3e}, eta = {params.eta}, "
            f"delta_c = {params.delta_c}"
        )
    final = EnsembleState(state.t + n_steps * dt, x, p, FieldAmplitudes(complex(ap), complex(am)))
    return final, out[:rows]


def step_rk4(state: EnsembleState, params: SystemParams, dt: float, field_mode: str = "dynamic") -> EnsembleState:
    """One classical RK4 step of the coupled particle-field system."""
    return _advance(state, params, dt, 1, 1, field_mode)[0]


def evolve(state: EnsembleState, params: SystemParams, dt: float, n_steps: int,
           field_mode: str = "dynamic") -> EnsembleState:
    return _advance(state, params, dt, n_steps, max(n_steps, 1), field_mode)[0]


def run(params: SystemParams, cfg: SimConfig, p0: float = 0.0,
        state: EnsembleState | None = None) -> list[ObservableRecord]:
    """Integrate from a thermal ensemble (or ``state``) and record observables."""
    cfg.validate(params)
    if state is None:
        state = init_ensemble(params, p0, cfg.seed)
    _, table = _advance(state, params, cfg.dt, cfg.n_steps, cfg.record_every, cfg.field_mode)
    return [ObservableRecord(*map(float, row)) for row in table]


def cell_seed(seed: int, row: int, col: int) -> int:
    return int(np.random.SeedSequence([seed, row, col]).generate_state(1, dtype=np.uint64)[0])


SWEEP_COLUMNS = ("delta_c", "eta", "energy_change", "mean_abs_R", "final_com_p", "error_flag")


def summarize(records: Sequence[ObservableRecord]) -> dict:
    abs_r = np.array([rec.bunching_abs for rec in records])
    return {
        "energy_change": records[-1].kinetic_energy_per_particle - records[0].kinetic_energy_per_particle,
        "mean_abs_R": float(abs_r.mean()),
        "final_com_p": records[-1].com_momentum,
    }


def _sim_cell(args) -> dict:
    params, cfg, p0 = args
    row = {"delta_c": params.delta_c, "eta": params.eta}
    try:
        row.update(summarize(run(params, cfg, p0)), error_flag="")
    except (NonFiniteStateError, ValueError) as exc:
        row.update(energy_change=math.nan, mean_abs_R=math.nan, final_com_p=math.nan,
                   error_flag=type(exc).__name__)
    return row


def sweep_sim(
    params_base: SystemParams,
    delta_grid: Sequence[float],
    eta_grid: Sequence[float],
    cfg: SimConfig,
    p0: float = 0.0,
    jobs: int = 1,
) -> list[dict]:
    """One run per (delta_c, eta) cell with seeds derived from (seed, row, col)."""
    delta_grid = list(delta_grid)
    eta_grid = list(eta_grid)
    if not delta_grid or not eta_grid:
        raise ValueError("sweep grids must be nonempty")
    cells = [
        (params_base.with_(delta_c=float(dc), eta=float(eta)), replace(cfg, seed=cell_seed(cfg.seed, i, j)), p0)
        for i, dc in enumerate(delta_grid)
        for j, eta in enumerate(eta_grid)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sim_cell, cells))
    return [_sim_cell(c) for c in cells]


def threshold_overlay(params: SystemParams) -> float:
    try:
        return eta_threshold(params)
    except ValueError:
        return math.nan
