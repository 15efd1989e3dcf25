"""``ring-carl`` command line: threshold curves, mean-field and N-body sweeps.

Every CSV starts with ``#`` lines holding the fully resolved configuration, so
each output file is enough to regenerate itself.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import logging
import math
import sys
from dataclasses import fields
from pathlib import Path
from typing import Iterable, Sequence

from . import meanfield, simulate, stability
from .config import COMMANDS, ConfigError, RunConfig, _coerce, load, replace
from .dynamics import SingularDenominatorError
from .simulate import NonFiniteStateError, max_stable_dt

log = logging.getLogger("ringcarl")

EXIT_OK, EXIT_CONFIG, EXIT_SINGULAR, EXIT_NONFINITE = 0, 2, 3, 4
DEFAULT_DT = 0.005

TIMESERIES_COLUMNS = ("t", "ekin_per_particle", "abs_R", "arg_R", "com_p", "a_plus_sq", "a_minus_sq")
THRESHOLD_COLUMNS = ("eta_threshold", "eta_threshold_min", "linear_gain_at_eta")
SWEEP_SIM_COLUMNS = ("delta_c", "eta", "energy_change", "mean_abs_R", "final_com_p", "eta_threshold", "error_flag")


def _cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(cfg: RunConfig, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(f"# ring-carl {cfg.command}\n")
    buf.write(f"# created = {_dt.datetime.now(_dt.timezone.utc).isoformat(timespec='seconds')}\n")
    for line in cfg.to_text().splitlines():
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def csv_body(text: str) -> str:
    """CSV text without the timestamp line, for reproducibility checks."""
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("# created"))


def read_csv(text: str) -> list[dict[str, str]]:
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(lines))


def cmd_threshold(cfg: RunConfig) -> str:
    base = cfg.params()
    rows = []
    grid = cfg.delta_grid() if cfg.scan == "delta_c" else cfg.v_grid()
    for value in grid:
        p = base.with_(**{cfg.scan: float(value)})
        rows.append((float(value), stability.eta_threshold(p), stability.eta_threshold_min(p), stability.linear_gain(p)))
    return render_csv(cfg, (cfg.scan, *THRESHOLD_COLUMNS), rows)


def cmd_meanfield(cfg: RunConfig) -> tuple[str, dict]:
    base = cfg.params()
    deltas, etas = cfg.delta_grid(), cfg.eta_grid()
    counts = cfg.compare_list() or [cfg.iterations]
    compare = bool(cfg.compare_list())
    header = (("iterations",) if compare else ()) + meanfield.SWEEP_COLUMNS
    rows, thresholds = [], {}
    for count in counts:
        cells = meanfield.sweep_contour(base, deltas, etas, cfg.r0, count, cfg.tol, cfg.grid_points, cfg.jobs)
        for cell in cells:
            rows.append(((count,) if compare else ()) + tuple(cell[c] for c in meanfield.SWEEP_COLUMNS))
        thresholds[str(count)] = {repr(float(k)): v for k, v in meanfield.threshold_per_column(cells).items()}
    analytic = {}
    for dc in deltas:
        try:
            analytic[repr(float(dc))] = stability.eta_threshold(base.with_(delta_c=float(dc)))
        except ValueError:
            analytic[repr(float(dc))] = None
    summary = {
        "uniform_density": meanfield.UNIFORM_DENSITY,
        "ordered_peak_factor": meanfield.ORDERED_PEAK_FACTOR,
        "empirical_threshold": thresholds if compare else thresholds[str(counts[0])],
        "analytic_threshold": analytic,
    }
    return render_csv(cfg, header, rows), summary


def _resolve_dt(cfg: RunConfig, params_list) -> float:
    bound = min(max_stable_dt(p) for p in params_list)
    if cfg.dt is None:
        return min(DEFAULT_DT, bound)
    return cfg.dt


def cmd_simulate(cfg: RunConfig) -> str:
    params = cfg.params()
    sim_cfg = cfg.sim_config(_resolve_dt(cfg, [params]))
    try:
        sim_cfg.validate(params)
    except ValueError as exc:
        raise ConfigError(f"dt: {exc}") from None
    records = simulate.run(params, sim_cfg, cfg.p0)
    rows = [
        (r.t, r.kinetic_energy_per_particle, r.bunching_abs, r.bunching_phase, r.com_momentum, r.a_plus_sq, r.a_minus_sq)
        for r in records
    ]
    return render_csv(replace(cfg, dt=sim_cfg.dt), TIMESERIES_COLUMNS, rows)


def cmd_sweep_sim(cfg: RunConfig) -> str:
    base = cfg.params()
    deltas, etas = cfg.delta_grid(), cfg.eta_grid()
    dt = _resolve_dt(cfg, [base.with_(delta_c=float(dc)) for dc in deltas])
    cells = simulate.sweep_sim(base, deltas, etas, cfg.sim_config(dt), cfg.p0, cfg.jobs)
    rows = []
    for cell in cells:
        cell["eta_threshold"] = simulate.threshold_overlay(base.with_(delta_c=cell["delta_c"]))
        rows.append(tuple(cell[c] for c in SWEEP_SIM_COLUMNS))
    return render_csv(replace(cfg, dt=dt), SWEEP_SIM_COLUMNS, rows)


def execute(cfg: RunConfig) -> tuple[str, dict | None]:
    if cfg.command == "threshold":
        return cmd_threshold(cfg), None
    if cfg.command == "meanfield":
        return cmd_meanfield(cfg)
    if cfg.command == "simulate":
        return cmd_simulate(cfg), None
    return cmd_sweep_sim(cfg), None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ring-carl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="flat key = value configuration file")
        sp.add_argument("-v", "--verbose", action="store_true")
        for f in fields(RunConfig):
            if f.name == "command":
                continue
            sp.add_argument(f"--{f.name}", dest=f.name, default=None, metavar=f.name.upper())
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        overrides = {"command": args.command}
        for f in fields(RunConfig):
            raw = getattr(args, f.name, None)
            if f.name != "command" and raw is not None:
                overrides[f.name] = _coerce(f.name, raw)
        cfg = load(args.config, overrides)
        text, summary = execute(cfg)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SingularDenominatorError as exc:
        print(f"numerical singularity: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except NonFiniteStateError as exc:
        print(f"non-finite state: {exc}", file=sys.stderr)
        return EXIT_NONFINITE
    except ValueError as exc:
        # parameters outside the domain of a formula, e.g. kB_T = 0 for a threshold
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if cfg.out == "-":
        sys.stdout.write(text)
        if summary is not None:
            sys.stdout.write("# summary " + json.dumps(summary, sort_keys=True) + "\n")
    else:
        out = Path(cfg.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        if summary is not None:
            out.with_suffix(".json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
        log.info("wrote %s", out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
