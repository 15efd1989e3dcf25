"""Acceptance gate: twelve criteria, each printing one PASS/FAIL line.

Run under pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""
import cmath
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from ringcarl import dynamics as dyn
from ringcarl import meanfield as mf
from ringcarl import runner
from ringcarl import simulate as sim
from ringcarl import stability as stab
from ringcarl.dynamics import FieldAmplitudes, SystemParams
from ringcarl.simulate import EnsembleState, SimConfig

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # direct execution
    ACCEPTANCE_LINES = []

sys.path.insert(0, str(Path(__file__).parent))
from test_simulate import richardson_ratio  # noqa: E402


def random_params(rng, n):
    for _ in range(n):
        p = SystemParams(
            n_particles=int(rng.integers(1, 5001)),
            u0=-10 ** rng.uniform(-4, math.log10(0.05)),
            kappa=rng.uniform(0.05, 5.0),
            delta_c=rng.uniform(-10, 10),
            eta=rng.uniform(0, 50),
            kB_T=rng.uniform(0.1, 5),
            mass=rng.uniform(0.5, 500),
            v=rng.uniform(-6, 6),
        )
        r = rng.uniform(1e-3, 1) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
        yield p, r


# --- criteria; each returns (passed, detail) --------------------------------

def criterion_1():
    worst = 0.0
    for p, r in random_params(np.random.default_rng(1), 1000):
        da = dyn.mode_rhs(dyn.steady_fields(p, r), r, p)
        worst = max(worst, (abs(da[0]) + abs(da[1])) / (1 + p.eta))
    return worst < 1e-10, f"max |rhs|/(1+eta) = {worst:.2e} over 1000 sets (< 1e-10)"


def criterion_2():
    errs, ratios = [], []
    for p, r in random_params(np.random.default_rng(2), 1000):
        g_pin = dyn.frame_acceleration(p, r)
        a_minus = dyn.steady_fields(p, r).a_minus
        g_flux = -4 * p.kappa * abs(a_minus) ** 2 * dyn.K / (p.n_particles * p.mass)
        errs.append(abs(g_pin - g_flux) / abs(g_flux))
        ratios.append(g_flux / (abs(r) * g_pin))
    worst = max(errs)
    detail = (f"max rel diff pinning vs flux acceleration = {worst:.3g} (< 1e-12 required); "
              f"flux/(|R| * pinning) = 1 within {max(abs(x - 1) for x in ratios):.1e}, "
              "so the two agree only where |R| = 1")
    return worst < 1e-12, detail


def criterion_3():
    worst_gain = 0.0
    for p, _ in random_params(np.random.default_rng(3), 1000):
        worst_gain = max(worst_gain, abs(stab.linear_gain(p.with_(eta=stab.eta_threshold(p))) - 1))
    base = SystemParams(n_particles=200, u0=-1 / 115, kappa=1.0, kB_T=1.0)
    grid = base.nu0 + np.linspace(-5, 5, 10001)
    grid[5000] = base.nu0
    vals = np.array([stab.eta_threshold_rest(base.with_(delta_c=d)) for d in grid])
    floor = stab.eta_threshold_min(base)
    at_min = abs(vals[5000] - floor) <= 1e-14 * floor
    elsewhere = bool(np.all(np.delete(vals, 5000) > floor))
    ok = worst_gain < 1e-12 and at_min and elsewhere
    return ok, (f"max |G(eta_th) - 1| = {worst_gain:.1e}; rest >= min on 1e4 points, "
                f"equality at NU0 only: {at_min and elsewhere}")


def criterion_4():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(20):
        kappa = rng.uniform(0.5, 2.0)
        n = int(rng.integers(200, 3001))
        nu0 = -rng.uniform(0.5, 5) * kappa
        p = SystemParams(n_particles=n, u0=nu0 / n, kappa=kappa, delta_c=nu0 + rng.uniform(-3, 3),
                         kB_T=rng.uniform(0.3, 3), v=rng.uniform(-1, 1))
        th = stab.eta_threshold(p)
        emp = mf.empirical_threshold(p, 0.5 * th, 2 * th, rtol=1e-7, r_abs=1e-6)
        worst = max(worst, abs(emp - th) / th)
    return worst < 5e-3, f"max rel diff mean-field vs analytic threshold = {worst:.2e} over 20 sets (< 5e-3)"


def meanfield_minimum(base):
    deltas = np.round(np.arange(-3.5, 0.0 + 1e-9, 0.1), 10)
    floor = stab.eta_threshold_min(base)
    etas = floor * np.arange(0.8, 2.0 + 1e-9, 0.005)
    rows = mf.sweep_contour(base, deltas, etas, r0=1e-3, iters=100)
    cols = mf.threshold_per_column(rows)
    found = {dc: th for dc, th in cols.items() if th is not None}
    best = min(found, key=lambda dc: found[dc])
    return best, found[best] / floor


def criterion_5():
    details, ok = [], True
    for n, u0 in ((200, -1 / 115), (1000, -1 / 375)):
        base = SystemParams(n_particles=n, u0=u0, kappa=1.0, kB_T=1.0)
        best, ratio = meanfield_minimum(base)
        hit = abs(best - base.nu0) <= 0.1 + 1e-9
        ok &= hit
        details.append(f"N={n}: minimum at {best:+.1f} vs NU0 = {base.nu0:+.3f} (eta/eta_min = {ratio:.3f})")
    return ok, "; ".join(details)


REPORTED_THRESHOLD = 31.6  # value quoted in the literature for this parameter set


def criterion_6():
    base = SystemParams(n_particles=2000, u0=-0.001, kappa=1.0, delta_c=-2.0, kB_T=1.0)
    th = stab.eta_threshold(base)
    low = mf.iterate_selfconsistent(base.with_(eta=0.5 * th), 1e-3).peak_density * dyn.PERIOD
    high = mf.iterate_selfconsistent(base.with_(eta=2.0 * th), 1e-3).peak_density * dyn.PERIOD
    ok = low < 1.1 and high > 3
    return ok, (f"peak/uniform = {low:.3f} at 0.5x and {high:.2f} at 2x; computed threshold "
                f"{th:.4f} (sqrt 500) vs reported {REPORTED_THRESHOLD}")


def criterion_7():
    p = SystemParams(n_particles=50, u0=-0.02, kappa=0.0, delta_c=-0.5, eta=0.0, mass=1.0)
    s = sim.init_ensemble(p, seed=3)
    s = EnsembleState(0.0, s.x, s.p, FieldAmplitudes(3 + 0j, 1j))
    drift = abs(sim.total_momentum(sim.evolve(s, p, 0.005, 2000)) - sim.total_momentum(s)) / 10.0
    return drift < 1e-8, f"|d(total momentum)|/t = {drift:.1e} (< 1e-8)"


HEATING_MASS = 10.0


def criterion_8():
    base = SystemParams(n_particles=200, u0=-0.015, kappa=1.0, kB_T=1.0, mass=HEATING_MASS)
    deltas, etas = np.linspace(-8, 2, 15), np.linspace(1, 30, 15)
    cfg = SimConfig(dt=0.002, t_end=60.0, record_every=500, seed=7)
    rows = sim.sweep_sim(base, deltas, etas, cfg)
    # zero pump conserves the kinetic energy exactly, so the baseline is the
    # seed-to-seed spread of the initial thermal energy per particle
    baseline = base.kB_T / math.sqrt(2 * base.n_particles)
    gained = [r for r in rows if r["energy_change"] > 10 * baseline]
    above = [r for r in gained if r["eta"] >= stab.eta_threshold(base.with_(delta_c=r["delta_c"]))]
    frac = len(above) / len(gained) if gained else 0.0
    return bool(gained) and frac >= 0.9, (
        f"{len(above)}/{len(gained)} heated cells above the analytic curve ({frac:.0%}, >= 90%), m = {HEATING_MASS}")


def criterion_9():
    base = SystemParams(n_particles=3000, u0=-0.0017, kappa=1.0, kB_T=1.0, v=5.0)
    offsets = np.arange(1.0, 6.5, 1.0)

    def asym(a, b):
        return (a - b) / max(a, b)

    analytic = [asym(stab.eta_threshold(base.with_(delta_c=base.nu0 + u)),
                     stab.eta_threshold(base.with_(delta_c=base.nu0 - u))) for u in offsets]
    deltas = np.concatenate([base.nu0 - offsets[::-1], base.nu0 + offsets])
    etas = np.geomspace(25, 300, 250)
    cols = mf.threshold_per_column(mf.sweep_contour(base, deltas, etas, r0=1e-3, iters=100))
    empirical = [asym(cols[base.nu0 + u], cols[base.nu0 - u]) for u in offsets]
    same_sign = all(np.sign(a) == np.sign(e) for a, e in zip(analytic, empirical))
    ok = max(map(abs, analytic)) > 0.1 and max(map(abs, empirical)) > 0.1 and same_sign
    return ok, (f"max asymmetry analytic {max(map(abs, analytic)):.2f}, mean-field "
                f"{max(map(abs, empirical)):.2f}, same side at all {len(offsets)} offsets: {same_sign}")


def local_maxima(x, y):
    i = np.where((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:]))[0] + 1
    return x[i]


def criterion_10():
    step = 1e-3
    grid = np.arange(-5.0, 1.0 + step / 2, step)
    details, ok = [], True
    for kappa in (0.2, 3.0):
        p = SystemParams(n_particles=1000, u0=-0.002, kappa=kappa, eta=1.0)
        power = np.array([abs(dyn.steady_fields(p.with_(delta_c=d), 1.0).a_minus) ** 2 for d in grid])
        peaks = local_maxima(grid, power)
        roots = stab.optimal_backscatter_detuning(p, 1.0)
        expected = [p.nu0] if roots is None else sorted(roots)
        hit = len(peaks) == len(expected) and all(abs(a - b) <= step for a, b in zip(sorted(peaks), expected))
        ok &= hit
        details.append(f"kappa={kappa}: maxima {np.round(peaks, 3).tolist()} expected {np.round(expected, 3).tolist()}")
    return ok, "; ".join(details)


def criterion_11():
    ratio = richardson_ratio()
    return abs(ratio - 16) <= 3, f"Richardson ratio = {ratio:.2f} (16 +- 3)"


def criterion_12(tmp=None):
    import tempfile

    with tempfile.TemporaryDirectory() as d:
        bodies = []
        for name in ("a", "b"):
            out = Path(d) / f"{name}.csv"
            code = runner.main(["simulate", "--eta", "20", "--t_end", "5", "--seed", "123", "--out", str(out)])
            assert code == 0
            bodies.append(runner.csv_body(out.read_text()).replace(str(out), "OUT"))
    same = bodies[0] == bodies[1]
    return same, f"CSV bodies byte-identical: {same} ({len(bodies[0])} bytes)"


CRITERIA = {
    1: ("fixed-point closure", criterion_1),
    2: ("dual-acceleration identity", criterion_2),
    3: ("threshold-gain closure", criterion_3),
    4: ("mean-field vs analytic threshold", criterion_4),
    5: ("minimum-threshold detuning", criterion_5),
    6: ("ordering transition", criterion_6),
    7: ("momentum conservation", criterion_7),
    8: ("N-body threshold contour", criterion_8),
    9: ("moving-cloud asymmetry", criterion_9),
    10: ("optimal-backscatter roots", criterion_10),
    11: ("integrator order", criterion_11),
    12: ("determinism", criterion_12),
}
SLOW = {5, 8, 9}


def evaluate(number):
    name, fn = CRITERIA[number]
    start = time.perf_counter()
    ok, detail = fn()
    line = f"criterion {number} {'PASS' if ok else 'FAIL'} [{name}] {detail} ({time.perf_counter() - start:.1f}s)"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok, line


@pytest.mark.parametrize(
    "number", [pytest.param(n, marks=pytest.mark.slow) if n in SLOW else n for n in CRITERIA])
def test_criterion(number):
    ok, line = evaluate(number)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(n)[0] for n in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
