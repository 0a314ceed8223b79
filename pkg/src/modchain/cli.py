"""Command-line front end: every experiment writes a CSV table and a JSON summary.

Config files are INI-style, one section per experiment plus [common];
command-line flags override file values.  All floats are printed with 10
significant digits; times are in hbar/J, energies and temperatures in J.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .eigensolve import energy_gap, lowest_k, module_ground
from .entanglement import PairReducer, entanglement_from_weights
from .hamiltonian import ChainSpec, ModuleSpec, build_module_hamiltonian
from .basis import build_sector_basis
from .kernels import BACKEND
from . import experiments as ex

EXPERIMENTS = (
    "gap", "static", "trace", "peak", "optimize", "amplify",
    "perturbative", "spectral", "thermal", "disorder",
)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (float, np.floating)):
        return f"{x:.10g}"
    return str(x)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _write_summary(path: Path, experiment, params, scalars, wall_time):
    doc = {
        "experiment": experiment,
        "version": __version__,
        "kernel_backend": BACKEND,
        "wall_time_s": round(wall_time, 3),
        "parameters": params,
        "results": scalars,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON-serializable: {type(x)}")


def parse_grid(text: str) -> np.ndarray:
    """Either 'start:stop:step' or a comma-separated list."""
    if ":" in text:
        start, stop, step = (float(p) for p in text.split(":"))
        return np.round(np.arange(start, stop + 1e-9, step), 10)
    return np.array([float(p) for p in text.split(",")])


def _chain_from(args) -> ChainSpec:
    left = ModuleSpec(args.n_half, args.j, args.j_prime, args.delta)
    return ChainSpec(left, left, args.j_i)


def _window_from(args) -> np.ndarray:
    return np.linspace(0.0, args.window, args.samples)


def _weights_row(w):
    return [w[0], w[1], w[2], w[3]]


# ---------------------------------------------------------------------------
# experiment runners: each returns (csv_header, csv_rows, summary_scalars)


def _run_gap(args):
    rows = []
    for jp in parse_grid(args.j_prime_grid):
        spec = ModuleSpec(args.n_half, args.j, float(jp), args.delta)
        g = energy_gap(spec)
        basis = build_sector_basis(spec.n_sites, spec.n_sites // 2)
        pairs = lowest_k(build_module_hamiltonian(spec, basis), 2)
        rows.append(
            [jp, g.e0, g.delta, pairs[1].energy - pairs[0].energy,
             g.sector_of_ground, g.sector_of_gap]
        )
    header = ["j_prime", "e0_J", "gap_cross_sector_J", "gap_ground_sector_J",
              "sector_of_ground", "sector_of_gap"]
    return header, rows, {"n_points": len(rows)}


def _run_static(args):
    rows = []
    for jp in parse_grid(args.j_prime_grid):
        spec = ModuleSpec(args.n_half, args.j, float(jp), args.delta)
        basis, gs = module_ground(spec)
        red = PairReducer(basis, 0, spec.n_sites - 1)
        w = red.bell_weights(gs.vector)
        val = entanglement_from_weights(w)
        rows.append([jp, val.e, val.c] + _weights_row(w))
    header = ["j_prime", "e", "concurrence", "p_s", "p_x", "p_y", "p_z"]
    return header, rows, {"n_points": len(rows)}


def _run_trace(args):
    chain = _chain_from(args)
    tr = ex.entanglement_trace(chain, _window_from(args), args.tol)
    rows = [
        [t, e] + _weights_row(w)
        for t, e, w in zip(tr.times, tr.e, tr.weights)
    ]
    peak = ex.find_peak(tr)
    header = ["t_hbar_over_J", "e", "p_s", "p_x", "p_y", "p_z"]
    return header, rows, {"e_max": peak.e_max, "t_opt": peak.t_opt}


def _run_peak(args):
    chain = _chain_from(args)
    tr = ex.entanglement_trace(chain, _window_from(args), args.tol)
    p = ex.find_peak(tr)
    header = ["t_opt_hbar_over_J", "e_max", "refined", "window_truncated"]
    rows = [[p.t_opt, p.e_max, p.refined, p.window_truncated]]
    return header, rows, {"e_max": p.e_max, "t_opt": p.t_opt,
                          "window_truncated": p.window_truncated}


def _run_optimize(args):
    sweep = ex.optimize_couplings(
        args.n_half, args.delta,
        parse_grid(args.j_prime_grid), parse_grid(args.j_i_grid),
        _window_from(args), args.j, args.tol, args.workers,
    )
    rows = []
    for a, jp in enumerate(sweep.j_prime_grid):
        for b, ji in enumerate(sweep.j_i_grid):
            rows.append([jp, ji, sweep.e_max[a, b], sweep.t_opt[a, b]])
    header = ["j_prime", "j_i", "e_max", "t_opt_hbar_over_J"]
    scalars = {
        "best_j_prime": sweep.best_j_prime,
        "best_j_i": sweep.best_j_i,
        "e_max": sweep.best_peak.e_max,
        "t_opt": sweep.best_peak.t_opt,
        "n_failed": sweep.n_failed,
    }
    return header, rows, scalars


def _run_amplify(args):
    rows_out, sweep = ex.amplification_scan(
        args.n_half, args.delta,
        parse_grid(args.j_prime_grid), parse_grid(args.j_i_grid),
        _window_from(args), args.j, args.tol, args.workers,
        extend_perturbative=True,
    )
    rows = [
        [r.j_prime, r.e_static, r.e_max, r.t_opt, r.best_j_i]
        for r in rows_out
    ]
    header = ["j_prime", "e_static", "e_max", "t_opt_hbar_over_J", "best_j_i"]
    amplified = all(r.e_max >= r.e_static for r in rows_out)
    return header, rows, {"always_amplified": amplified}


def _run_perturbative(args):
    left = ModuleSpec(args.n_half, args.j, args.j_prime, args.delta)
    pred = ex.perturbative_prediction(left, left)
    chain = ChainSpec(left, left, pred.j_i_star / args.j)
    times = np.linspace(0.0, 1.1 * pred.t_opt_pred, args.samples)
    tr = ex.entanglement_trace(chain, times, args.tol)
    e_pred = pred.e_of_t(times)
    rows = [[t, ep, es] for t, ep, es in zip(times, e_pred, tr.e)]
    header = ["t_hbar_over_J", "e_closed_form", "e_simulated"]
    scalars = {
        "j_eff_l": pred.j_eff_l,
        "j_eff_r": pred.j_eff_r,
        "j_i_star": pred.j_i_star,
        "t_opt_pred": pred.t_opt_pred,
        "max_deviation": float(np.abs(e_pred - tr.e).max()),
        "e_max_simulated": float(tr.e.max()),
    }
    return header, rows, scalars


def _run_spectral(args):
    chain = _chain_from(args)
    sd = ex.spectral_decomposition(chain)
    tr = ex.entanglement_trace(chain, _window_from(args), args.tol)
    rep = ex.interference_check(sd, ex.find_peak(tr))
    rows = [
        [n, sd.excitations[n], sd.weights[n]]
        for n in range(len(sd.weights))
    ]
    header = ["n", "excitation_J", "weight"]
    scalars = {
        "omega": sd.omega,
        "t_phase": rep.t_phase,
        "t_opt": rep.t_opt,
        "offset": rep.offset,
        "top2_weight_sum": rep.top2_weight_sum,
    }
    return header, rows, scalars


def _run_thermal(args):
    chain = _chain_from(args)
    temps = parse_grid(args.temperatures)
    points = ex.thermal_curve(chain, temps, _window_from(args))
    rows = [[p.temperature, p.e_max, p.t_peak] for p in points]
    header = ["k_B_T_J", "e_max", "t_peak_hbar_over_J"]
    return header, rows, {"n_points": len(rows)}


def _run_disorder(args):
    chain = _chain_from(args)
    rows = []
    stats_all = []
    for lam in parse_grid(args.lambdas):
        st = ex.disorder_ensemble(
            chain, float(lam), args.n_realizations, args.seed,
            _window_from(args), args.tol, args.workers,
        )
        stats_all.append(st)
        rows.append(
            [lam, st.mean_e_max, st.se_e_max, st.mean_e_at_clean_topt,
             st.se_e_at_clean_topt, st.mean_t_peak, st.se_t_peak, st.n_failed]
        )
    header = ["lambda", "mean_e_max", "se_e_max", "mean_e_at_clean_topt",
              "se_e_at_clean_topt", "mean_t_peak", "se_t_peak", "n_failed"]
    st0 = stats_all[0]
    return header, rows, {
        "clean_e_max": st0.clean_e_max,
        "clean_t_opt": st0.clean_t_opt,
        "seed": args.seed,
    }


_RUNNERS = {
    "gap": _run_gap,
    "static": _run_static,
    "trace": _run_trace,
    "peak": _run_peak,
    "optimize": _run_optimize,
    "amplify": _run_amplify,
    "perturbative": _run_perturbative,
    "spectral": _run_spectral,
    "thermal": _run_thermal,
    "disorder": _run_disorder,
}

_DEFAULTS = {
    "n_half": 8,
    "j": 1.0,
    "j_prime": 0.5,
    "j_i": 0.75,
    "delta": 0.0,
    "window": 40.0,
    "samples": 801,
    "tol": 1e-8,
    "workers": 1,
    "seed": 12345,
    "n_realizations": 50,
    "lambdas": "0.0,0.05,0.1,0.15,0.2",
    "temperatures": "0.001,0.01,0.1,1.0,10.0,100.0,1000.0",
    "j_prime_grid": "0.10:1.50:0.05",
    "j_i_grid": "0.10:2.00:0.05",
    "out": ".",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modchain",
        description="Quenched modular XXZ chains: entanglement amplification experiments",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=str, help="INI config; flags override")
        p.add_argument("--out", type=str, help="output directory")
        p.add_argument("--n-half", type=int, dest="n_half",
                       help="sites per module (N/2)")
        p.add_argument("--j", type=float, help="bulk exchange J (energy unit)")
        p.add_argument("--j-prime", type=float, dest="j_prime",
                       help="impurity coupling J' (dimensionless)")
        p.add_argument("--j-i", type=float, dest="j_i",
                       help="quench bond J_I (dimensionless)")
        p.add_argument("--delta", type=float, help="anisotropy in [-1, 1]")
        p.add_argument("--window", type=float, help="time window Jt max")
        p.add_argument("--samples", type=int, help="time samples in window")
        p.add_argument("--tol", type=float, help="propagator error budget")
        p.add_argument("--workers", type=int, help="parallel worker count")
        p.add_argument("--seed", type=int, help="ensemble seed")
        p.add_argument("--n-realizations", type=int, dest="n_realizations")
        p.add_argument("--lambdas", type=str,
                       help="disorder half-widths, list or start:stop:step")
        p.add_argument("--temperatures", type=str,
                       help="k_B T grid in J, list or start:stop:step")
        p.add_argument("--j-prime-grid", type=str, dest="j_prime_grid")
        p.add_argument("--j-i-grid", type=str, dest="j_i_grid")
    return parser


def _merge_config(args) -> argparse.Namespace:
    """defaults < [common] < [experiment] < explicit flags."""
    merged = dict(_DEFAULTS)
    if args.config:
        cp = configparser.ConfigParser()
        if not cp.read(args.config):
            raise FileNotFoundError(f"config file not found: {args.config}")
        for section in ("common", args.experiment):
            if cp.has_section(section):
                for key, val in cp.items(section):
                    merged[key.replace("-", "_")] = val
    for key, val in vars(args).items():
        if val is not None:
            merged[key] = val
    out = argparse.Namespace(**merged)
    # config-file values arrive as strings
    for key in ("n_half", "samples", "workers", "seed", "n_realizations"):
        setattr(out, key, int(getattr(out, key)))
    for key in ("j", "j_prime", "j_i", "delta", "window", "tol"):
        setattr(out, key, float(getattr(out, key)))
    return out


def _params_block(args) -> dict:
    skip = {"config", "experiment"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args = _merge_config(args)
    except Exception as exc:
        print(f"modchain: {exc}", file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        header, rows, scalars = _RUNNERS[args.experiment](args)
    except Exception as exc:
        print(f"modchain: {args.experiment} failed: {exc}", file=sys.stderr)
        return 1
    wall = time.perf_counter() - t0
    _write_csv(out_dir / f"{args.experiment}.csv", header, rows)
    _write_summary(
        out_dir / f"{args.experiment}_summary.json",
        args.experiment, _params_block(args), scalars, wall,
    )
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
