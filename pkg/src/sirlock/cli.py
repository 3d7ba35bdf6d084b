"""Command-line harness: simulations, policy tuning, sweeps and figure data.

Every command reads a RunConfig assembled from built-in defaults, an optional
flat key=value config file, and command-line flags (flags win). Outputs are
UTF-8 CSV and JSON files written to the output directory. Exit codes:
0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .analytic import (
    cost_policy_a,
    cost_policy_b,
    optimize_iota,
    optimize_rho,
    uncontrolled_tail_cost,
)
from .bound import lower_bound
from .controls import ConstantControl, PiecewiseConstantControl
from .errors import SirlockError
from .integrator import integrate, trajectory_cost, trajectory_to_csv
from .model import uncontrolled_peak
from .numerics import Bracket
from .ocontrol import (
    infinite_horizon_cost,
    lockdown_foi_correlation,
    solve_optimal_control,
)
from .params import CostParams, EpidemicParams, State
from .policies import simulate_policy_a, simulate_policy_b

YEAR = 365.0


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    beta: float = 0.2
    gamma: float = 1.0 / 18.0
    gamma0: float = 5.6e-4
    gamma1: float = 5.6e-3
    kappa: float = 40.0 * YEAR
    theta: float = 1.0
    lmax: float = 1.0
    s0: float = 0.98
    i0: float = 0.01
    r0: float = 0.01
    horizon_days: float = 5.0 * YEAR
    n_intervals: int = 1000
    kappa_grid: list = field(default_factory=list)
    horizon_grid: list = field(default_factory=list)
    rho_bracket: tuple | None = None
    iota_bracket: tuple | None = None
    output_dir: str = "."

    def epidemic(self) -> EpidemicParams:
        return EpidemicParams(self.beta, self.gamma, self.theta, self.lmax)

    def cost(self) -> CostParams:
        return CostParams(self.kappa, self.gamma0, self.gamma1)

    def init_state(self) -> State:
        return State(0.0, self.s0, self.i0, self.r0)


_SCALAR_KEYS = {
    "beta": "beta",
    "gamma": "gamma",
    "gamma0": "gamma0",
    "gamma1": "gamma1",
    "kappa": "kappa",
    "theta": "theta",
    "lmax": "lmax",
    "s0": "s0",
    "i0": "i0",
    "r0": "r0",
    "horizon-days": "horizon_days",
    "horizon_days": "horizon_days",
    "n-intervals": "n_intervals",
    "n_intervals": "n_intervals",
}
_LIST_KEYS = {
    "kappa-grid": "kappa_grid",
    "kappa_grid": "kappa_grid",
    "horizon-grid": "horizon_grid",
    "horizon_grid": "horizon_grid",
    "rho-bracket": "rho_bracket",
    "rho_bracket": "rho_bracket",
    "iota-bracket": "iota_bracket",
    "iota_bracket": "iota_bracket",
}


def _parse_floats(text: str) -> list:
    try:
        return [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"expected numbers, got {text!r}") from exc


def parse_config_file(path: str) -> dict:
    """Flat key = value lines; # starts a comment; blank lines ignored."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    out: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw.rstrip()!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip().strip('"').strip("'")
            if key in _SCALAR_KEYS:
                field_name = _SCALAR_KEYS[key]
                try:
                    out[field_name] = int(value) if field_name == "n_intervals" else float(value)
                except ValueError as exc:
                    raise ConfigError(f"{path}:{lineno}: bad number for {key}: {value!r}") from exc
            elif key in _LIST_KEYS:
                vals = _parse_floats(value)
                name = _LIST_KEYS[key]
                out[name] = tuple(vals) if name.endswith("bracket") else vals
            elif key in ("output-dir", "output_dir"):
                out["output_dir"] = value
            else:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = replace(cfg, **parse_config_file(args.config))
    overrides = {}
    for flag, field_name in [
        ("beta", "beta"), ("gamma", "gamma"), ("gamma0", "gamma0"),
        ("gamma1", "gamma1"), ("kappa", "kappa"), ("theta", "theta"),
        ("lmax", "lmax"), ("s0", "s0"), ("i0", "i0"), ("r0", "r0"),
        ("horizon_days", "horizon_days"), ("n_intervals", "n_intervals"),
        ("output_dir", "output_dir"),
    ]:
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field_name] = value
    if getattr(args, "kappa_grid", None):
        overrides["kappa_grid"] = _parse_floats(args.kappa_grid)
    cfg = replace(cfg, **overrides)

    try:
        cfg.epidemic()
        cfg.cost()
        cfg.init_state()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if not cfg.horizon_days > 0:
        raise ConfigError(f"horizon-days must be positive, got {cfg.horizon_days}")
    return cfg


def _outpath(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.output_dir, exist_ok=True)
    return os.path.join(cfg.output_dir, name)


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _say(*parts) -> None:
    print(*parts)


# ---------------------------------------------------------------- commands


def cmd_simulate(cfg: RunConfig, args) -> int:
    p, c, init = cfg.epidemic(), cfg.cost(), cfg.init_state()
    t_end = cfg.horizon_days
    policy = args.policy

    if policy == "a":
        if args.rho is None:
            raise ConfigError("--policy a requires --rho")
        run = simulate_policy_a(args.rho, init, p, c, t_end)
    elif policy == "b":
        if args.iota is None:
            raise ConfigError("--policy b requires --iota")
        run = simulate_policy_b(args.iota, init, p, c, t_end)
    elif policy == "file":
        if args.control_file is None:
            raise ConfigError("--policy file requires --control-file")
        if not os.path.exists(args.control_file):
            raise ConfigError(f"control file not found: {args.control_file}")
        control = PiecewiseConstantControl.from_csv(args.control_file)
        run = None
    else:
        control = ConstantControl(0.0)
        run = None

    if run is None:
        traj = integrate(p, control, init, t_end)
        cost = trajectory_cost(traj, c)
        summary = {
            "cost": cost.to_dict(),
            "final_state": {"t": traj.final_state.t, "s": traj.final_state.s,
                            "i": traj.final_state.i, "r": traj.final_state.r},
        }
    else:
        traj = run.trajectory
        summary = run.summary_dict()

    traj_path = _outpath(cfg, "trajectory.csv")
    trajectory_to_csv(traj, traj_path, c)
    json_path = _outpath(cfg, "summary.json")
    _write_json(json_path, summary)
    _say(f"wrote {traj_path}")
    _say(f"wrote {json_path}")
    return 0


def _export_policy_run(cfg: RunConfig, run, stem: str, c: CostParams) -> None:
    traj_path = _outpath(cfg, f"{stem}_trajectory.csv")
    trajectory_to_csv(run.trajectory, traj_path, c)
    json_path = _outpath(cfg, f"{stem}_summary.json")
    _write_json(json_path, run.summary_dict())
    _say(f"wrote {traj_path}")
    _say(f"wrote {json_path}")


def cmd_policy_a(cfg: RunConfig, args) -> int:
    p, c, init = cfg.epidemic(), cfg.cost(), cfg.init_state()
    run = simulate_policy_a(args.rho, init, p, c, cfg.horizon_days)
    _export_policy_run(cfg, run, "policy_a", c)
    _say(f"policy A rho={args.rho}: cost {run.cost.total:.6f} over {cfg.horizon_days:g} days")
    return 0


def cmd_policy_b(cfg: RunConfig, args) -> int:
    p, c, init = cfg.epidemic(), cfg.cost(), cfg.init_state()
    run = simulate_policy_b(args.iota, init, p, c, cfg.horizon_days)
    _export_policy_run(cfg, run, "policy_b", c)
    _say(f"policy B iota={args.iota}: cost {run.cost.total:.6f} over {cfg.horizon_days:g} days")
    return 0


def _bracket_or_none(pair) -> Bracket | None:
    return Bracket(pair[0], pair[1]) if pair else None


def cmd_optimize_rho(cfg: RunConfig, args) -> int:
    p, c, init = cfg.epidemic(), cfg.cost(), cfg.init_state()
    rho_star, cert = optimize_rho(init, p, c, _bracket_or_none(cfg.rho_bracket))
    path = _outpath(cfg, "optimize_rho.json")
    _write_json(path, {"rho_star": rho_star, "certificate": cert.to_dict()})
    _say(f"rho* = {rho_star:.8f}, cost {cert.cost.total:.6f}")
    _say(f"wrote {path}")
    return 0


def cmd_optimize_iota(cfg: RunConfig, args) -> int:
    p, c, init = cfg.epidemic(), cfg.cost(), cfg.init_state()
    iota_star, cert = optimize_iota(init, p, c, _bracket_or_none(cfg.iota_bracket))
    path = _outpath(cfg, "optimize_iota.json")
    _write_json(path, {"iota_star": iota_star, "certificate": cert.to_dict()})
    _say(f"iota* = {iota_star:.8f}, cost {cert.cost.total:.6f}")
    _say(f"wrote {path}")
    return 0


def cmd_optimal_control(cfg: RunConfig, args) -> int:
    p, c, init = cfg.epidemic(), cfg.cost(), cfg.init_state()
    res = solve_optimal_control(init, p, c, cfg.horizon_days, cfg.n_intervals)
    control_path = _outpath(cfg, "oc_control.csv")
    res.piecewise().to_csv(control_path)
    traj_path = _outpath(cfg, "oc_trajectory.csv")
    trajectory_to_csv(res.trajectory, traj_path, c)
    summary = res.summary_dict()
    summary["spearman_L_foi"] = lockdown_foi_correlation(res.trajectory, p)
    summary["cost_with_tail"] = infinite_horizon_cost(res, p, c).to_dict()
    json_path = _outpath(cfg, "oc_summary.json")
    _write_json(json_path, summary)
    for path in (control_path, traj_path, json_path):
        _say(f"wrote {path}")
    _say(
        f"optimal control: cost {res.cost.total:.6f}, regime {res.regime}, "
        f"converged {res.converged}"
    )
    return 0


def cmd_lower_bound(cfg: RunConfig, args) -> int:
    p, c, init = cfg.epidemic(), cfg.cost(), cfg.init_state()
    res = lower_bound(init, p, c)
    path = _outpath(cfg, "lower_bound.json")
    _write_json(path, res.to_dict())
    _say(f"C* = {res.c_star:.6f} at i* = {res.i_star:.8f}")
    _say(f"wrote {path}")
    return 0


# ------------------------------------------------------------------ sweeps


def _sweep_point(task) -> tuple:
    """One sweep row, run in a worker process."""
    axis, value, cfg_fields = task
    cfg = RunConfig(**cfg_fields)
    p, init = cfg.epidemic(), cfg.init_state()
    if axis == "kappa":
        c = CostParams(value, cfg.gamma0, cfg.gamma1)
        T = cfg.horizon_days
    else:
        c = cfg.cost()
        T = value
    res = solve_optimal_control(init, p, c, T, cfg.n_intervals)
    econ_loss = res.cost.economic / (1.5 * YEAR)
    return (value, econ_loss, res.cost.deaths, res.regime, res.cost.total, res.converged)


def _default_kappa_sweep_grid() -> list:
    return list(np.geomspace(1.0 * YEAR, 100.0 * YEAR, 60))


def _default_horizon_grid() -> list:
    return [0.25 * YEAR * k for k in range(1, 13)]


def cmd_sweep(cfg: RunConfig, args) -> int:
    axis = args.axis
    if axis == "kappa":
        grid = list(cfg.kappa_grid) or _default_kappa_sweep_grid()
    else:
        grid = list(cfg.horizon_grid) or _default_horizon_grid()
    if not grid:
        raise ConfigError("sweep grid is empty")

    cfg_fields = {k: getattr(cfg, k) for k in (
        "beta", "gamma", "gamma0", "gamma1", "kappa", "theta", "lmax",
        "s0", "i0", "r0", "horizon_days", "n_intervals",
    )}
    tasks = [(axis, value, cfg_fields) for value in grid]
    workers = min(len(tasks), os.cpu_count() or 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]

    path = _outpath(cfg, f"sweep_{axis}.csv")
    with open(path, "w", newline="") as fh:
        fh.write("axis_value,econ_loss,deaths,regime,total_cost,converged\n")
        for value, econ, deaths, regime, total, conv in rows:
            fh.write(
                f"{value:.12g},{econ:.12g},{deaths:.12g},{regime},"
                f"{total:.12g},{str(conv).lower()}\n"
            )
    _say(f"wrote {path} ({len(rows)} rows)")
    return 0


def _compare_row(kappa: float, cfg: RunConfig) -> dict:
    p, init = cfg.epidemic(), cfg.init_state()
    c = CostParams(kappa, cfg.gamma0, cfg.gamma1)
    T = max(cfg.horizon_days, 5.0 * YEAR)
    rho_star, cert_a = optimize_rho(init, p, c)
    iota_star, cert_b = optimize_iota(init, p, c)
    bound = lower_bound(init, p, c)
    oc = solve_optimal_control(init, p, c, T, cfg.n_intervals)
    cost_oc = infinite_horizon_cost(oc, p, c).total
    return {
        "kappa": kappa,
        "cost_a": cert_a.cost.total,
        "cost_b": cert_b.cost.total,
        "cost_oc": cost_oc,
        "c_star": bound.c_star,
        "rho_star": rho_star,
        "iota_star": iota_star,
    }


def _default_compare_grid() -> list:
    return [5.0 * YEAR, 10.0 * YEAR, 20.0 * YEAR, 40.0 * YEAR]


def cmd_compare(cfg: RunConfig, args) -> int:
    grid = list(cfg.kappa_grid) or _default_compare_grid()
    rows = [_compare_row(k, cfg) for k in grid]
    path = _outpath(cfg, "compare.csv")
    cols = ["kappa", "cost_a", "cost_b", "cost_oc", "c_star", "rho_star", "iota_star"]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(format(row[k], ".12g") for k in cols) + "\n")
    _say(f"wrote {path} ({len(rows)} rows)")
    return 0


# ----------------------------------------------------------------- figures


def _figure_1(cfg: RunConfig) -> list:
    p, c, init = cfg.epidemic(), cfg.cost(), cfg.init_state()
    run = simulate_policy_a(1.2, init, p, c, cfg.horizon_days)
    dyn = _outpath(cfg, "fig1_dynamics.csv")
    trajectory_to_csv(run.trajectory, dyn, c)

    hi = p.beta * init.s / p.gamma
    rhos = np.linspace(1.0 + 1e-3, hi * (1.0 - 1e-6), 80)
    curve = _outpath(cfg, "fig1_cost_vs_rho.csv")
    with open(curve, "w", newline="") as fh:
        fh.write("rho,cost\n")
        for rho in rhos:
            fh.write(f"{rho:.12g},{cost_policy_a(rho, init, p, c).cost.total:.12g}\n")
    return [dyn, curve]


def _figure_2(cfg: RunConfig) -> list:
    p, c, init = cfg.epidemic(), cfg.cost(), cfg.init_state()
    run = simulate_policy_b(0.06, init, p, c, cfg.horizon_days)
    dyn = _outpath(cfg, "fig2_dynamics.csv")
    trajectory_to_csv(run.trajectory, dyn, c)

    i_max = uncontrolled_peak(init, p)
    iotas = np.linspace(init.i, init.i + (i_max - init.i) * (1.0 - 1e-6), 80)
    curve = _outpath(cfg, "fig2_cost_vs_iota.csv")
    with open(curve, "w", newline="") as fh:
        fh.write("iota,cost\n")
        for iota in iotas:
            fh.write(f"{iota:.12g},{cost_policy_b(iota, init, p, c).cost.total:.12g}\n")
    return [dyn, curve]


def _figure_3(cfg: RunConfig) -> list:
    paths = []
    for axis, fixed in (("kappa", {"horizon_days": 1.5 * YEAR}),
                        ("horizon", {"kappa": 20.0 * YEAR})):
        sub = replace(cfg, **fixed)
        ns = argparse.Namespace(axis=axis)
        sub.output_dir = cfg.output_dir
        cmd_sweep(sub, ns)
        src = _outpath(cfg, f"sweep_{axis}.csv")
        dst = _outpath(cfg, f"fig3_{axis}_sweep.csv")
        os.replace(src, dst)
        paths.append(dst)
    return paths


def _figure_4(cfg: RunConfig) -> list:
    # Horizon study at a configurable kappa: short horizons select
    # suppression, long ones mitigation with a flat-top infected curve.
    sub = replace(cfg, kappa=cfg.kappa if cfg.kappa != 40.0 * YEAR else 20.0 * YEAR)
    p, c, init = sub.epidemic(), sub.cost(), sub.init_state()
    paths = []
    for tag, T in (("T1y", 1.0 * YEAR), ("T3y", 3.0 * YEAR)):
        res = solve_optimal_control(init, p, c, T, sub.n_intervals)
        oc_path = _outpath(cfg, f"fig4_{tag}_oc.csv")
        trajectory_to_csv(res.trajectory, oc_path, c)
        paths.append(oc_path)

        rho_star, _ = optimize_rho(init, p, c)
        run_a = simulate_policy_a(rho_star, init, p, c, T)
        a_path = _outpath(cfg, f"fig4_{tag}_policy_a.csv")
        trajectory_to_csv(run_a.trajectory, a_path, c)
        paths.append(a_path)

        iota_star, _ = optimize_iota(init, p, c)
        run_b = simulate_policy_b(iota_star, init, p, c, T)
        b_path = _outpath(cfg, f"fig4_{tag}_policy_b.csv")
        trajectory_to_csv(run_b.trajectory, b_path, c)
        paths.append(b_path)
    return paths


def _figure_5(cfg: RunConfig) -> list:
    rows = [_compare_row(k, cfg) for k in (list(cfg.kappa_grid) or _default_compare_grid())]
    path = _outpath(cfg, "fig5_compare.csv")
    cols = ["kappa", "cost_a", "cost_b", "cost_oc", "c_star", "rho_star", "iota_star"]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(format(row[k], ".12g") for k in cols) + "\n")
    return [path]


_GNUPLOT_SNIPPETS = {
    1: (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set xlabel 'days'\n"
        "plot 'fig1_dynamics.csv' using 1:3 with lines title 'i(t)', \\\n"
        "     '' using 1:5 with lines title 'L(t)'\n"
        "pause -1\n"
        "set xlabel 'rho'\n"
        "plot 'fig1_cost_vs_rho.csv' using 1:2 with lines title 'cost'\n"
    ),
    2: (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set xlabel 'days'\n"
        "plot 'fig2_dynamics.csv' using 1:3 with lines title 'i(t)', \\\n"
        "     '' using 1:5 with lines title 'L(t)'\n"
        "pause -1\n"
        "set xlabel 'iota'\n"
        "plot 'fig2_cost_vs_iota.csv' using 1:2 with lines title 'cost'\n"
    ),
    3: (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set logscale x\n"
        "set xlabel 'kappa (days)'\n"
        "plot 'fig3_kappa_sweep.csv' using 1:2 with linespoints title 'econ loss', \\\n"
        "     '' using 1:3 with linespoints title 'deaths'\n"
    ),
    4: (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set xlabel 'days'\n"
        "plot 'fig4_T3y_oc.csv' using 1:3 with lines title 'i, optimal', \\\n"
        "     'fig4_T3y_policy_b.csv' using 1:3 with lines title 'i, policy B'\n"
    ),
    5: (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set xlabel 'kappa (days)'\n"
        "plot 'fig5_compare.csv' using 1:2 with linespoints title 'C_A', \\\n"
        "     '' using 1:3 with linespoints title 'C_B', \\\n"
        "     '' using 1:4 with linespoints title 'optimal', \\\n"
        "     '' using 1:5 with linespoints title 'lower bound'\n"
    ),
}


def cmd_figures(cfg: RunConfig, args) -> int:
    builders = {1: _figure_1, 2: _figure_2, 3: _figure_3, 4: _figure_4, 5: _figure_5}
    number = args.number
    paths = builders[number](cfg)
    for path in paths:
        if os.path.basename(path).startswith("fig"):
            _say(f"wrote {path}")
    if args.gnuplot:
        script = _outpath(cfg, f"fig{number}.gp")
        with open(script, "w") as fh:
            fh.write(_GNUPLOT_SNIPPETS[number])
        _say(f"wrote {script}")
    return 0


# -------------------------------------------------------------- arg parsing


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key = value config file")
    for flag in ("beta", "gamma", "gamma0", "gamma1", "kappa", "theta",
                 "lmax", "s0", "i0", "r0"):
        sub.add_argument(f"--{flag}", type=float)
    sub.add_argument("--horizon-days", dest="horizon_days", type=float)
    sub.add_argument("--n-intervals", dest="n_intervals", type=int)
    sub.add_argument("--output-dir", dest="output_dir")
    sub.add_argument("--kappa-grid", dest="kappa_grid",
                     help="comma-separated kappa values")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sirlock",
        description="Lockdown control of a SIR epidemic: simulation, "
                    "feedback policies, cost bounds and optimal control.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="integrate the dynamics under a control")
    sim.add_argument("--policy", choices=["none", "a", "b", "file"], default="none")
    sim.add_argument("--rho", type=float)
    sim.add_argument("--iota", type=float)
    sim.add_argument("--control-file", dest="control_file")
    _add_common(sim)
    sim.set_defaults(fn=cmd_simulate)

    pa = subs.add_parser("policy-a", help="simulate the reproduction-target policy")
    pa.add_argument("--rho", type=float, required=True)
    _add_common(pa)
    pa.set_defaults(fn=cmd_policy_a)

    pb = subs.add_parser("policy-b", help="simulate the prevalence-ceiling policy")
    pb.add_argument("--iota", type=float, required=True)
    _add_common(pb)
    pb.set_defaults(fn=cmd_policy_b)

    orho = subs.add_parser("optimize-rho", help="tune the reproduction-target policy")
    _add_common(orho)
    orho.set_defaults(fn=cmd_optimize_rho)

    oiota = subs.add_parser("optimize-iota", help="tune the prevalence-ceiling policy")
    _add_common(oiota)
    oiota.set_defaults(fn=cmd_optimize_iota)

    oc = subs.add_parser("optimal-control", help="solve the finite-horizon control problem")
    _add_common(oc)
    oc.set_defaults(fn=cmd_optimal_control)

    lb = subs.add_parser("lower-bound", help="certified lower bound on the optimal cost")
    _add_common(lb)
    lb.set_defaults(fn=cmd_lower_bound)

    sw = subs.add_parser("sweep", help="optimal-control sweep over kappa or horizon")
    sw.add_argument("--axis", choices=["kappa", "horizon"], required=True)
    _add_common(sw)
    sw.set_defaults(fn=cmd_sweep)

    cp = subs.add_parser("compare", help="policies vs optimal control vs lower bound")
    _add_common(cp)
    cp.set_defaults(fn=cmd_compare)

    fig = subs.add_parser("figures", help="emit plot-ready data files")
    fig.add_argument("number", type=int, choices=[1, 2, 3, 4, 5])
    fig.add_argument("--gnuplot", action="store_true",
                     help="also write a gnuplot script")
    _add_common(fig)
    fig.set_defaults(fn=cmd_figures)

    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.fn(cfg, args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except SirlockError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
