"""Command-line drivers that write figure data as CSV and property reports as JSON.

    relspin table1     spin operator property table (exit 2 on mismatch)
    relspin fig1       hydrogenic spin and position variance versus Z
    relspin fig2       laser-driven precession rate versus field amplitude
    relspin classical  classical spin ensemble and its wavelength average

Parameters come from embedded defaults, then an optional flat ``key = value``
config file (--config), then ``--set key=value`` flags.  Every CSV starts with
a timestamp line followed by one ``# key=value`` line per parameter.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import datetime
import logging
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .constants import intensity_to_w_cm2, length_to_au
from .errors import FitDegenerate, RegimeViolation, RelspinError

log = logging.getLogger("relspin")

EXIT_OK, EXIT_INVALID, EXIT_MISMATCH = 0, 1, 2
FIG1_Z = (1, 10, 20, 30, 40, 50, 60, 70, 80, 90, 92)
FIG2_BACKENDS = ("Dirac1D", "RelativisticPauli", "NonrelativisticPauli")
PERTURBATIVE_ROTATION = 0.3  # largest per-pulse spin rotation (rad) accepted in fig2

# name -> (type, default, fast default)
DEFAULTS = {
    "table1": {
        "samples": (int, 100, 100),
    },
    "fig1": {
        "z_values": (str, ",".join(map(str, FIG1_Z)), ",".join(map(str, FIG1_Z))),
        "kinds": (str, "all", "all"),
        "points": (int, 128, 96),
        "box_factor": (float, 40.0, 40.0),
    },
    "fig2": {
        "amp_low": (float, 10.0, 10.0),
        "amp_high": (float, 316.3, 316.3),
        "amp_count": (int, 6, 4),
        "wavelength_nm": (float, 0.159, 0.159),
        "backends": (str, ",".join(FIG2_BACKENDS), ",".join(FIG2_BACKENDS)),
        "points": (int, 16, 16),
        "ramp_periods": (int, 2, 2),
        "target_rotation": (float, 0.2, 0.2),
    },
    "classical": {
        "larmor_ratio": (float, 0.02, 0.02),
        "particles": (int, 64, 32),
        "flat_periods": (int, 60, 50),
        "ramp_periods": (int, 5, 2),
        "wavelength_nm": (float, 0.159, 0.159),
    },
}


class ConfigError(ValueError):
    pass


def _convert(kind, key, text):
    try:
        return kind(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot parse {text!r} as {kind.__name__}") from None


def read_config_file(path) -> dict:
    """Flat ``key = value`` lines; blank lines and ``#`` comments are ignored."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def resolve_params(command: str, fast: bool, file_values: dict, overrides: list[str]) -> dict:
    spec = DEFAULTS[command]
    params = {k: (v[2] if fast else v[1]) for k, v in spec.items()}
    raw = dict(file_values)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        raw[k.strip()] = v.strip()
    for key, value in raw.items():
        if key not in spec:
            raise ConfigError(f"unknown parameter {key!r} for {command}; known: {sorted(spec)}")
        params[key] = _convert(spec[key][0], key, value)
    return params


def _header(command: str, params: dict, seed: int) -> list[str]:
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    lines = [f"relspin {__version__} {command} generated {stamp}", f"seed={seed}"]
    lines += [f"{k}={params[k]}" for k in sorted(params)]
    return lines


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    if v is None:
        return ""
    return str(v)


def write_csv(path: Path, header: list[str], columns: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _map(func, items, workers: int):
    """Ordered map, in a process pool when ``workers`` > 1."""
    if workers <= 1:
        return [func(it) for it in items]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


# -------------------------------------------------------------------- table1


def cmd_table1(params: dict, out: Path, seed: int) -> int:
    from .spin_operators import property_table

    if params["samples"] < 1:
        raise ConfigError("samples must be >= 1")
    table = property_table(samples=params["samples"], seed=seed)
    path = out / "table1.json"
    path.write_text(table.to_json() + "\n")
    for rep in table.reports:
        mark = "ok" if rep.matches_reference() else "MISMATCH " + ", ".join(rep.mismatches())
        print(f"{rep.kind:<16} {' '.join('Y' if v else '-' for v in rep.verdicts.values())}  {mark}")
    print(f"wrote {path}")
    return EXIT_OK if table.all_match() else EXIT_MISMATCH


# ---------------------------------------------------------------------- fig1


def _parse_kinds(text: str):
    from .spin_operators import SpinOperatorKind

    if text.strip().lower() == "all":
        return list(SpinOperatorKind)
    return [SpinOperatorKind.parse(s.strip()) for s in text.split(",") if s.strip()]


def fig1_cell(job):
    """All rows for one Z: spin for every kind at m = +1/2 and -1/2, variances for the position kinds."""
    from .grid import hydrogenic_grid, sample_state, variance_of_position
    from .hydrogenic import ground_state
    from .spin_operators import POSITION_KINDS, spin_expectation

    Z, kind_names, points, box_factor = job
    kinds = _parse_kinds(kind_names)
    grid = hydrogenic_grid(Z, points, box_factor)
    up = sample_state(ground_state(Z, 0.5), grid)
    spins_up = {k: spin_expectation(up, k).real for k in kinds}
    variances = {k: variance_of_position(up, k) for k in kinds if k in POSITION_KINDS}
    defect = up.diagnostics["norm_defect"]
    del up
    down = sample_state(ground_state(Z, -0.5), grid)
    spins_down = {k: spin_expectation(down, k).real for k in kinds}
    return [(Z, k.value, spins_up[k], spins_down[k], variances.get(k), defect, points, grid.lengths[0])
            for k in kinds]


def cmd_fig1(params: dict, out: Path, seed: int, workers: int) -> int:
    from .grid import GridSpec
    from .hydrogenic import _check_z

    try:
        zs = [float(s) for s in params["z_values"].split(",") if s.strip()]
    except ValueError:
        raise ConfigError("z_values must be a comma separated list of numbers") from None
    for Z in zs:
        _check_z(Z)
    _parse_kinds(params["kinds"])
    GridSpec.cube(params["points"], 1.0)  # validates the size
    jobs = [(Z, params["kinds"], params["points"], params["box_factor"]) for Z in sorted(zs)]
    rows = [r for cell in _map(fig1_cell, jobs, workers) for r in cell]
    path = out / "fig1.csv"
    write_csv(path, _header("fig1", params, seed),
              ["Z", "kind", "spin_z", "spin_z_m_down", "variance_z", "norm_defect", "points", "box"], rows)
    for Z, kind, s_up, s_down, var, *_ in rows:
        v = "" if var is None else f"  Var*Z^2={var * Z * Z:.5f}"
        print(f"Z={Z:>5g} {kind:<16} <S_z>={s_up:.6f} (m=-1/2: {s_down:.6f}){v}")
    print(f"wrote {path}")
    return EXIT_OK


# ---------------------------------------------------------------------- fig2


def fig2_point(job):
    from .laser.fields import LaserConfig, omega_prediction, ponderomotive_spin_frequency
    from .laser.precession import precession_frequency

    backend, amp, wavelength, ramp_periods, points, target = job
    cfg = LaserConfig.from_periods(amp, wavelength, 1, ramp_periods)
    try:
        res = precession_frequency(backend, cfg, points=points, target_rotation=target)
    except FitDegenerate as exc:
        return (backend, amp, intensity_to_w_cm2(cfg.intensity), None, None, None, None, f"FitDegenerate: {exc}")
    rotation = abs(res.omega) * res.times[-1]
    status = "ok" if rotation < PERTURBATIVE_ROTATION else "nonperturbative"
    return (backend, amp, intensity_to_w_cm2(cfg.intensity), res.omega, res.omega / omega_prediction(cfg),
            res.omega / ponderomotive_spin_frequency(cfg), res.residual, status)


def cmd_fig2(params: dict, out: Path, seed: int, workers: int) -> int:
    from .laser.precession import loglog_slope, sweep_amplitudes
    from .laser.propagate import Backend

    backends = [Backend.parse(b.strip()).value for b in params["backends"].split(",") if b.strip()]
    lo, hi, count = params["amp_low"], params["amp_high"], params["amp_count"]
    if not (0 < lo < hi) or count < 2:
        raise ConfigError("need 0 < amp_low < amp_high and amp_count >= 2")
    if not 0 < params["target_rotation"] < PERTURBATIVE_ROTATION:
        raise ConfigError(f"target_rotation must lie in (0, {PERTURBATIVE_ROTATION})")
    if math.log10(hi / lo) < 1.5:
        log.warning("sweep spans %.2f decades, less than 1.5", math.log10(hi / lo))
    wavelength = length_to_au(params["wavelength_nm"] * 1e-9)
    amps = sweep_amplitudes(lo, hi, count)
    jobs = [(b, float(a), wavelength, params["ramp_periods"], params["points"], params["target_rotation"])
            for b in backends for a in amps]
    rows = _map(fig2_point, jobs, workers)
    header = _header("fig2", params, seed)
    path = out / "fig2.csv"
    write_csv(path, header, ["backend", "amplitude_au", "intensity_w_cm2", "omega_au", "omega_over_prediction",
                             "omega_over_ponderomotive", "fit_residual", "status"], rows)
    slopes = []
    for b in backends:
        good = [r for r in rows if r[0] == b and r[7] == "ok"]
        expected = Backend.parse(b).field_power
        if len(good) >= 2:
            slope = loglog_slope([r[1] for r in good], [r[3] for r in good])
        else:
            slope = float("nan")
        slopes.append((b, slope, expected, len(good), abs(slope - expected) <= 0.2))
        print(f"{b:<22} slope {slope:.4f} (expected {expected}) from {len(good)} points")
    write_csv(out / "fig2_slopes.csv", header, ["backend", "slope", "expected", "points_used", "within_0.2"], slopes)
    print(f"wrote {path}")
    return EXIT_OK


# ----------------------------------------------------------------- classical


def cmd_classical(params: dict, out: Path, seed: int) -> int:
    from .classical import (
        TorqueModel,
        default_classical_config,
        plateau_trajectories,
        predicted_rates,
        secular_rates,
        write_trajectories_csv,
    )
    from .laser.fields import larmor_frequency, ponderomotive_spin_frequency

    if params["particles"] < 2 or params["flat_periods"] < 1 or params["ramp_periods"] < 1:
        raise ConfigError("need particles >= 2, flat_periods >= 1, ramp_periods >= 1")
    if params["larmor_ratio"] <= 0:
        raise ConfigError("larmor_ratio must be positive")
    cfg = default_classical_config(params["larmor_ratio"], length_to_au(params["wavelength_nm"] * 1e-9),
                                   params["flat_periods"], params["ramp_periods"])
    omega_p = ponderomotive_spin_frequency(cfg)
    header = _header("classical", params, seed)
    summary, trajs, warn_rows = [], [], []
    for model in TorqueModel:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", RegimeViolation)
            traj = plateau_trajectories(cfg, model, params["particles"])
        warn_rows += [str(w.message) for w in caught if issubclass(w.category, RegimeViolation)]
        rates = secular_rates(traj)
        dev = np.max(np.abs(rates - predicted_rates(traj.x, cfg, model))) / (2 * omega_p)
        summary.append((model.value, float(np.mean(rates)), float(np.mean(rates)) / omega_p, dev, ""))
        trajs.append(traj)
    for msg in sorted(set(warn_rows)):
        summary.append(("RegimeViolation", None, None, None, msg))
    write_trajectories_csv(out / "classical_trajectories.csv", trajs, header)
    header = header + [f"omega_p={omega_p:.12g}", f"larmor_over_omega={larmor_frequency(cfg) / cfg.angular_frequency:.12g}"]
    write_csv(out / "classical_summary.csv", header,
              ["model", "mean_rate_au", "mean_rate_over_omega_p", "max_pointwise_deviation", "note"], summary)
    for row in summary:
        if row[1] is not None:
            print(f"{row[0]:<16} mean rate / Omega_P = {row[2]:+.6f}  pointwise deviation {row[3]:.2e}")
        else:
            print(f"warning: {row[4]}")
    print(f"wrote {out / 'classical_summary.csv'}")
    return EXIT_OK


# ---------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="results", help="output directory (created if missing)")
    common.add_argument("--seed", type=int, default=2024)
    common.add_argument("--workers", type=int, default=1, help="process pool size for independent cells")
    common.add_argument("--config", help="flat key = value parameter file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one parameter (repeatable)")
    common.add_argument("--fast", action="store_true", help="smaller grids and sweeps")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="relspin", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"relspin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("table1", "property table of the seven spin operators"),
                       ("fig1", "hydrogenic spin and position variance versus Z"),
                       ("fig2", "precession rate versus field amplitude"),
                       ("classical", "classical spin ensemble")):
        p = sub.add_parser(name, parents=[common], help=text)
        keys = ", ".join(f"{k}={v[1]}" for k, v in DEFAULTS[name].items())
        p.epilog = f"parameters: {keys}"
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        file_values = read_config_file(args.config) if args.config else {}
        params = resolve_params(args.command, args.fast, file_values, args.set)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "table1":
            return cmd_table1(params, out, args.seed)
        if args.command == "fig1":
            return cmd_fig1(params, out, args.seed, args.workers)
        if args.command == "fig2":
            return cmd_fig2(params, out, args.seed, args.workers)
        return cmd_classical(params, out, args.seed)
    except (ConfigError, RelspinError, ValueError, OSError) as exc:
        print(f"relspin: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
