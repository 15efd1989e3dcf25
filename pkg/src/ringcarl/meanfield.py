"""Self-consistent Boltzmann density in the accelerated frame.

One iteration takes a bunching ``R = |R| exp(2ikx0)``, computes the stationary
fields, tilts the optical potential so its stationary point sits on ``x0`` and
fills the single well ``[x0 - lambda/4, x0 + lambda/4]`` with a canonical
density. The bunching of that density feeds the next iteration.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import dynamics
from .dynamics import K, PERIOD, FieldAmplitudes, SingularDenominatorError, SystemParams

DEFAULT_GRID = 1024
ORDERED_PEAK_FACTOR = 1.5  # peak density above this multiple of uniform counts as ordered
UNIFORM_DENSITY = 1.0 / PERIOD


class NoLocalMinimumError(ArithmeticError):
    """The tilted potential is monotonic: no quasistationary well exists.

    Cannot occur for steady fields, where the tilt is at most the grating
    force (ratio kappa / |delta_minus - NU0 + i kappa|); kept as a guard.
    """

    def __init__(self, message: str, g: float):
        super().__init__(message)
        self.g = g


@dataclass(frozen=True)
class DensityProfile:
    """Density on ``grid_points`` equal intervals of one lattice period.

    ``x_values`` holds both end nodes (``grid_points + 1`` samples) so that the
    trapezoidal rule stays second order for tilted, non-periodic densities.
    """
    grid_points: int
    x_values: np.ndarray
    rho_values: np.ndarray

    @property
    def peak(self) -> float:
        return float(self.rho_values.max())

    def integral(self) -> float:
        return float(np.trapezoid(self.rho_values, self.x_values))


@dataclass
class FixedPointResult:
    r_final: complex
    density: DensityProfile
    fields: FieldAmplitudes
    g_final: float
    iterations_used: int
    converged: bool
    peak_density: float
    history: list[float] = field(default_factory=list)
    v_final: float = 0.0


def period_grid(center: float, grid: int = DEFAULT_GRID) -> np.ndarray:
    return center + np.linspace(-PERIOD / 2, PERIOD / 2, grid + 1)


def boltzmann_density(
    potential_sampler: Callable[[np.ndarray], np.ndarray],
    kB_T: float,
    grid: int = DEFAULT_GRID,
    center: float = 0.0,
) -> DensityProfile:
    """Canonical density exp(-V/kT)/Z over one period centered on ``center``."""
    if not kB_T > 0:
        raise ValueError(f"Boltzmann density needs kB_T > 0, got {kB_T}")
    if grid < 64:
        raise ValueError(f"grid must be >= 64, got {grid}")
    x = period_grid(center, grid)
    v = np.asarray(potential_sampler(x), dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("potential is not finite on the period")
    w = np.exp(-(v - v.min()) / kB_T)
    rho = w / np.trapezoid(w, x)
    return DensityProfile(grid, x, rho)


def bunching_from_density(density: DensityProfile) -> complex:
    return complex(np.trapezoid(density.rho_values * np.exp(2j * K * density.x_values), density.x_values))


def _tilted_potential(params: SystemParams, fields: FieldAmplitudes, g: float, x0: float):
    def sampler(x):
        # tilt measured from x0; the offset is a constant shift
        return dynamics.potential_at(x, fields, params, 0.0) - params.mass * g * (x - x0)
    return sampler


def iterate_step(params: SystemParams, r_in: complex, grid: int = DEFAULT_GRID):
    """One mean-field map application.

    Returns ``(r_out, fields, g, density)`` with ``r_out`` in lab phase, so a
    translation of the input density translates the output by the same amount.
    """
    r_in = dynamics.check_bunching(r_in)
    x0 = float(np.angle(r_in)) / (2 * K) if r_in != 0 else 0.0
    fields = dynamics.steady_fields(params, r_in)
    g = dynamics.frame_acceleration(params, r_in)
    max_grating_force = 4.0 * K * abs(params.u0) * abs(fields.product)
    if abs(params.mass * g) > max_grating_force * (1 + 1e-9) and g != 0:
        raise NoLocalMinimumError(
            f"inertial force {abs(params.mass * g):.4g} exceeds grating force {max_grating_force:.4g}", g
        )
    density = boltzmann_density(_tilted_potential(params, fields, g, x0), params.kB_T, grid, center=x0)
    r_out = bunching_from_density(density)
    if abs(r_out) > 1.0:
        r_out /= abs(r_out)
    return r_out, fields, g, density


def iterate_selfconsistent(
    params: SystemParams,
    r0: complex,
    max_iters: int = 100,
    tol: float = 1e-8,
    grid: int = DEFAULT_GRID,
    velocity_step: float | None = None,
) -> FixedPointResult:
    """Iterate the mean-field map until |R| stops changing.

    With ``velocity_step`` set, the frame velocity follows the pinning
    acceleration between iterations, ``v -> v - g * velocity_step``.
    Non-convergence is reported through ``converged``, never raised.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    if not tol > 0:
        raise ValueError("tol must be > 0")
    r = dynamics.check_bunching(r0)
    history: list[float] = []
    converged = False
    p = params
    n = 0
    for n in range(1, max_iters + 1):
        r_new, fields, g, density = iterate_step(p, r, grid)
        history.append(abs(r_new))
        done = abs(abs(r_new) - abs(r)) < tol
        r = r_new
        if velocity_step is not None:
            p = p.with_(v=p.v - g * velocity_step)
        if done:
            converged = True
            break
    return FixedPointResult(
        r_final=r,
        density=density,
        fields=fields,
        g_final=g,
        iterations_used=n,
        converged=converged,
        peak_density=density.peak,
        history=history,
        v_final=p.v,
    )


def step_gain(params: SystemParams, r_abs: float = 1e-6, grid: int = DEFAULT_GRID) -> float:
    """|R_out| / |R_in| of a single map application at small seed."""
    r_out = iterate_step(params, complex(r_abs), grid)[0]
    return abs(r_out) / r_abs


def empirical_threshold(
    params: SystemParams,
    eta_lo: float,
    eta_hi: float,
    rtol: float = 1e-6,
    r_abs: float = 1e-6,
    grid: int = DEFAULT_GRID,
) -> float:
    """Bisect the pump amplitude at which the single-step gain crosses one."""
    def grows(eta):
        return step_gain(params.with_(eta=eta), r_abs, grid) > 1.0
    if grows(eta_lo) or not grows(eta_hi):
        raise ValueError(f"gain does not cross one inside [{eta_lo}, {eta_hi}]")
    while eta_hi - eta_lo > rtol * eta_hi:
        mid = 0.5 * (eta_lo + eta_hi)
        if grows(mid):
            eta_hi = mid
        else:
            eta_lo = mid
    return 0.5 * (eta_lo + eta_hi)


def is_ordered(peak_density: float, factor: float = ORDERED_PEAK_FACTOR) -> bool:
    return peak_density > factor * UNIFORM_DENSITY


SWEEP_COLUMNS = ("delta_c", "eta", "peak_density", "abs_R", "abs_a_minus_sq", "g", "converged", "error_flag")


def _sweep_cell(args) -> dict:
    params, r0, iters, tol, grid = args
    row = {"delta_c": params.delta_c, "eta": params.eta}
    try:
        res = iterate_selfconsistent(params, r0, iters, tol, grid)
    except (SingularDenominatorError, NoLocalMinimumError, FloatingPointError) as exc:
        row.update(peak_density=math.nan, abs_R=math.nan, abs_a_minus_sq=math.nan,
                   g=getattr(exc, "g", math.nan), converged=False, error_flag=type(exc).__name__)
        return row
    row.update(
        peak_density=res.peak_density,
        abs_R=abs(res.r_final),
        abs_a_minus_sq=abs(res.fields.a_minus) ** 2,
        g=res.g_final,
        converged=res.converged,
        error_flag="",
    )
    return row


def sweep_contour(
    params_base: SystemParams,
    delta_grid: Sequence[float],
    eta_grid: Sequence[float],
    r0: float = 1e-3,
    iters: int = 100,
    tol: float = 1e-8,
    grid: int = DEFAULT_GRID,
    jobs: int = 1,
) -> list[dict]:
    """Self-consistent summary for every (delta_c, eta) cell, delta_c-major."""
    delta_grid = list(delta_grid)
    eta_grid = list(eta_grid)
    if not delta_grid or not eta_grid:
        raise ValueError("sweep grids must be nonempty")
    for g in (delta_grid, eta_grid):
        d = np.diff(g)
        if len(d) and not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("sweep grids must be strictly monotone")
    cells = [
        (params_base.with_(delta_c=float(dc), eta=float(eta)), complex(r0), iters, tol, grid)
        for dc in delta_grid
        for eta in eta_grid
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_cell, cells, chunksize=max(1, len(cells) // (4 * jobs))))
    return [_sweep_cell(c) for c in cells]


def threshold_per_column(rows: Sequence[dict], factor: float = ORDERED_PEAK_FACTOR) -> dict[float, float | None]:
    """First eta (in grid order) of each delta_c column whose density is ordered."""
    out: dict[float, float | None] = {}
    for row in rows:
        dc = row["delta_c"]
        out.setdefault(dc, None)
        if out[dc] is None and not row["error_flag"] and is_ordered(row["peak_density"], factor):
            out[dc] = row["eta"]
    return out
