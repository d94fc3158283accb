"""Command-line driver: JSON configs in, deterministic CSV/JSON out.

Exit codes: 0 success, 2 validation error, 3 solver failure,
4 guard-tolerance failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import experiments
from .constants import ExponentDim, a_scaling, c_frac, c_tilde, k_const
from .expressions import Expression, ExpressionError
from .grid import Domain, build_grid, sample
from .kernels import fractional_kernel, plevy_mass, tail_mass
from .operators import apply_L, local_p_laplacian, pointwise_bound_certificate
from .reporting import fingerprint, fmt_float, write_csv, write_sweep_outputs
from .solve import (
    LOCAL_DIRICHLET,
    LOCAL_NEUMANN,
    IncompatibleDataError,
    Problem,
    SolveConfig,
    SolverError,
    solve,
)
from .traces import trace_convergence_report

__all__ = ["main", "run"]

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_GUARD = 4


class ConfigError(ValueError):
    pass


def _require(cfg: dict, allowed: dict, where: str) -> None:
    """allowed maps key -> bool (required?); unknown keys are rejected."""
    for key in cfg:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}")
    for key, required in allowed.items():
        if required and key not in cfg:
            raise ConfigError(f"missing required key {key!r} in {where}")


_COMMON_KEYS = {"seed": False, "out_dir": False, "threads": False}


def _pd(cfg: dict) -> ExponentDim:
    try:
        return ExponentDim(p=float(cfg.get("p", 2.0)), d=int(cfg.get("d", 1)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))


def _solver_cfg(cfg: dict) -> SolveConfig:
    sub = cfg.get("solver", {})
    _require(
        sub,
        {"grad_tol": False, "max_iter": False, "reg_schedule": False, "memory": False, "seed": False},
        "solver",
    )
    try:
        return SolveConfig(
            grad_tol=float(sub.get("grad_tol", 1e-10)),
            max_iter=int(sub.get("max_iter", 20000)),
            reg_schedule=tuple(sub["reg_schedule"]) if "reg_schedule" in sub else None,
            memory=int(sub.get("memory", 20)),
            seed=int(sub.get("seed", 0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))


def _kernel(cfg: dict, pd: ExponentDim, eps: float):
    family = cfg.get("family", "rescaled")
    base = cfg.get("base", "indicator")
    if family not in ("fractional", "rescaled"):
        raise ConfigError(f"unknown kernel family {family!r}")
    if base not in ("indicator", "exponential"):
        raise ConfigError(f"unknown base profile {base!r}")
    return experiments.kernel_for(pd, family, eps, base)


def _out_dir(cfg: dict, args) -> str:
    out = args.out_dir or cfg.get("out_dir") or "."
    os.makedirs(out, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommand bodies (each returns an exit code)


def _cmd_constants(cfg: dict, args) -> int:
    _require(
        cfg,
        {**_COMMON_KEYS, "d": False, "p": True, "s": False, "eps": False},
        "constants config",
    )
    ds = cfg.get("d", [1])
    ds = ds if isinstance(ds, list) else [ds]
    ps = cfg["p"] if isinstance(cfg["p"], list) else [cfg["p"]]
    ss = cfg.get("s", [])
    es = cfg.get("eps", [])
    table = []
    for d in ds:
        for p in ps:
            pd = ExponentDim(p=float(p), d=int(d))
            entry = {"d": d, "p": p, "K": k_const(pd)}
            entry["C"] = {str(s): c_frac(pd, float(s)) for s in ss}
            entry["C_tilde"] = {str(s): c_tilde(pd, float(s)) for s in ss}
            entry["a"] = {str(e): a_scaling(pd, float(e)) for e in es}
            table.append(entry)
    out = {"constants": table, "config_fingerprint": fingerprint(cfg)}
    path = os.path.join(_out_dir(cfg, args), "constants.json")
    with open(path, "w") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_kernel_check(cfg: dict, args) -> int:
    _require(
        cfg,
        {**_COMMON_KEYS, "p": False, "d": False, "family": True, "base": False, "eps_list": True},
        "kernel-check config",
    )
    pd = _pd(cfg)
    rows = []
    for eps in cfg["eps_list"]:
        k = _kernel(cfg, pd, float(eps))
        rows.append(
            {
                "eps": float(eps),
                "mass": plevy_mass(k),
                "tail_025": tail_mass(k, 0.25),
                "tail_05": tail_mass(k, 0.5),
                "tail_1": tail_mass(k, 1.0),
            }
        )
    path = os.path.join(_out_dir(cfg, args), "kernel_check.csv")
    write_csv(path, ("eps", "mass", "tail_025", "tail_05", "tail_1"), rows)
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_pointwise(cfg: dict, args) -> int:
    _require(
        cfg,
        {
            **_COMMON_KEYS,
            "p": False,
            "d": False,
            "family": False,
            "base": False,
            "u": True,
            "x": True,
            "eps_list": True,
            "box": False,
            "spacing_refine": False,
            "tau_tail": False,
        },
        "pointwise config",
    )
    pd = _pd(cfg)
    if pd.d != 1:
        raise ConfigError("pointwise runs are 1D")
    expr = Expression(cfg["u"], d=1)
    x0 = float(cfg["x"])
    box = cfg.get("box", [-1.0, 1.0])
    dom = Domain(bounds=((float(box[0]), float(box[1])),))
    K = k_const(pd)
    target = -K * local_p_laplacian(pd, expr, x0)
    rows = []
    for eps in cfg["eps_list"]:
        eps = float(eps)
        k = _kernel(cfg, pd, eps)
        h = 1.0 / np.ceil(cfg.get("spacing_refine", 8) / eps) / (box[1] - box[0]) * (box[1] - box[0])
        h = (box[1] - box[0]) / np.ceil((box[1] - box[0]) * cfg.get("spacing_refine", 8) / eps)
        grid, _tail = experiments.sweep_grid(dom, k, float(h), cfg.get("tau_tail", 0.01))
        i = int(np.argmin(np.abs(grid.x - x0)))
        if not grid.in_omega[i]:
            raise ConfigError(f"x={x0} does not fall on an interior node")
        u = sample(expr, grid)
        ev = apply_L(k, grid, u, i)
        rows.append(
            {
                "eps": eps,
                "x": float(grid.x[i]),
                "L_eps": ev.value,
                "minus_K_pLap": target,
                "gap": abs(ev.value - target),
                "tail_bound": ev.tail_bound,
            }
        )
    path = os.path.join(_out_dir(cfg, args), "pointwise.csv")
    write_csv(path, ("eps", "x", "L_eps", "minus_K_pLap", "gap", "tail_bound"), rows)
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_solve(cfg: dict, args) -> int:
    _require(
        cfg,
        {
            **_COMMON_KEYS,
            "variant": True,
            "p": False,
            "d": False,
            "domain": False,
            "spacing": True,
            "collar": False,
            "tau_tail": False,
            "family": False,
            "base": False,
            "eps": False,
            "f": False,
            "g": False,
            "solver": False,
        },
        "solve config",
    )
    pd = _pd(cfg)
    bounds = cfg.get("domain", {"bounds": [[0.0, 1.0]] * pd.d})["bounds"]
    dom = Domain(bounds=tuple(tuple(map(float, b)) for b in bounds))
    variant = cfg["variant"]
    kernel = None
    if variant in ("nonlocal-dirichlet", "nonlocal-neumann", "regional-neumann"):
        if "eps" not in cfg:
            raise ConfigError(f"variant {variant!r} needs an eps")
        kernel = _kernel(cfg, pd, float(cfg["eps"]))
    spacing = float(cfg["spacing"])
    if "collar" in cfg:
        collar = float(cfg["collar"])
    elif kernel is not None:
        from .kernels import choose_collar

        collar = (
            max(kernel.support, spacing)
            if np.isfinite(kernel.support)
            else max(choose_collar(kernel, float(cfg.get("tau_tail", 0.01))), spacing)
        )
    else:
        collar = spacing
    grid = build_grid(dom, spacing, collar)
    f = sample(cfg["f"], grid).values if cfg.get("f") else None
    if variant == LOCAL_NEUMANN:
        g = tuple(map(float, cfg.get("g", (0.0, 0.0))))
    else:
        g = sample(cfg["g"], grid).values if cfg.get("g") else None
    prob = Problem(variant=variant, pd=pd, grid=grid, kernel=kernel, f=f, g=g)
    sol = solve(prob, _solver_cfg(cfg))
    out = _out_dir(cfg, args)
    rows = [
        {"index": i, **{f"x{j}": grid.coords[i, j] for j in range(pd.d)}, "value": v}
        for i, v in enumerate(sol.u.values)
    ]
    cols = ("index",) + tuple(f"x{j}" for j in range(pd.d)) + ("value",)
    write_csv(os.path.join(out, "solution.csv"), cols, rows)
    diag = {
        "j_value": sol.j_value,
        "grad_norm": sol.grad_norm,
        "grad_tol_abs": sol.grad_tol_abs,
        "iterations": sol.iterations,
        "reg_residual": sol.reg_residual,
        "converged": sol.converged,
        "variant": variant,
        "config_fingerprint": fingerprint(cfg),
    }
    with open(os.path.join(out, "diagnostics.json"), "w") as fh:
        json.dump(diag, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {out}/solution.csv (J = {fmt_float(sol.j_value)})")
    return EXIT_OK


def _cmd_trace(cfg: dict, args) -> int:
    _require(
        cfg,
        {
            **_COMMON_KEYS,
            "p": False,
            "d": False,
            "g": True,
            "eps_list": True,
            "family": False,
            "base": False,
            "solver": False,
            "domain": False,
        },
        "trace config",
    )
    pd = _pd(cfg)
    rows = trace_convergence_report(
        cfg["g"],
        pd,
        [float(e) for e in cfg["eps_list"]],
        lambda eps: _kernel(cfg, pd, eps),
        _solver_cfg(cfg),
    )
    path = os.path.join(_out_dir(cfg, args), "trace.csv")
    write_csv(
        path,
        ("eps", "nonlocal_norm", "local_norm", "gap"),
        [
            {
                "eps": r.eps,
                "nonlocal_norm": r.nonlocal_norm,
                "local_norm": r.local_norm,
                "gap": r.gap,
            }
            for r in rows
        ],
    )
    print(f"wrote {path}")
    return EXIT_OK


_SWEEP_KEYS = {
    **_COMMON_KEYS,
    "p": False,
    "d": False,
    "family": False,
    "base": False,
    "eps_list": False,
    "s_list": False,
    "u": False,
    "v": False,
    "f": False,
    "g": False,
    "phi": False,
    "tau": False,
    "box": False,
    "spacing": False,
    "spacing_refine": False,
    "collar": False,
    "tau_tail": False,
    "regional": False,
    "solver": False,
    "guards": False,
}


def _run_sweep(name: str, cfg: dict, args) -> int:
    _require(cfg, _SWEEP_KEYS, f"sweep {name} config")
    pd = _pd(cfg)
    family = cfg.get("family", "rescaled")
    base = cfg.get("base", "indicator")
    eps_list = [float(e) for e in cfg.get("eps_list", [0.4, 0.2, 0.1, 0.05])]
    scfg = _solver_cfg(cfg)
    if name == "bbm":
        rep = experiments.bbm_sweep(
            cfg["u"],
            pd,
            family,
            eps_list,
            box=tuple(cfg.get("box", (-2.0, 2.0))),
            spacing=float(cfg.get("spacing", 1.0 / 512)),
            base=base,
        )
    elif name == "collapse":
        rep = experiments.collapse_sweep(
            cfg["u"], cfg["v"], pd, family, eps_list, base=base,
            tau_tail=float(cfg.get("tau_tail", 0.01)),
        )
    elif name == "dirichlet":
        rep = experiments.dirichlet_convergence(
            cfg.get("f"), cfg["g"], pd, family, eps_list, scfg, base=base,
            tau_tail=float(cfg.get("tau_tail", 0.01)),
            spacing_refine=int(cfg.get("spacing_refine", 8)),
        )
    elif name == "neumann":
        rep = experiments.neumann_convergence(
            cfg.get("f"), cfg.get("phi"), pd, family, eps_list, scfg, base=base,
            tau_tail=float(cfg.get("tau_tail", 0.01)),
            regional=bool(cfg.get("regional", False)),
            spacing_refine=int(cfg.get("spacing_refine", 8)),
        )
    elif name == "weakdata":
        rep = experiments.weak_data_convergence(
            cfg["phi"], cfg["v"], pd, family, eps_list, base=base,
            tau_tail=float(cfg.get("tau_tail", 0.01)),
        )
    elif name == "fractional":
        rep = experiments.fractional_sweep(
            cfg.get("f"),
            cfg.get("g", "0*x"),
            pd,
            [float(s) for s in cfg.get("s_list", [0.6, 0.8, 0.9, 0.95])],
            scfg,
            spacing=float(cfg.get("spacing", 1.0 / 256)),
            collar=float(cfg.get("collar", 2.0)),
        )
    elif name == "functional":
        rep = experiments.functional_convergence(
            cfg["v"], int(cfg.get("tau", 1)), pd, family, eps_list,
            f_expr=cfg.get("f"), g_expr=cfg.get("g"), base=base,
            spacing_refine=int(cfg.get("spacing_refine", 32)),
        )
    else:
        raise ConfigError(f"unknown sweep {name!r}")
    out = _out_dir(cfg, args)
    csv_path, json_path = write_sweep_outputs(rep, out)
    print(f"wrote {csv_path} and {json_path}")
    guards = cfg.get("guards", {})
    _require(guards, {"monotone": False, "max_final_fraction": False, "max_final": False}, "guards")
    failed = []
    for col in guards.get("monotone", rep.monotone_columns):
        if not rep.weakly_decreasing(col):
            failed.append(f"column {col!r} is not weakly decreasing")
    for col, thresh in guards.get("max_final_fraction", {}).items():
        frac = rep.final_fraction(col)
        if not frac <= float(thresh):
            failed.append(f"final/first of {col!r} = {fmt_float(frac)} > {thresh}")
    for col, thresh in guards.get("max_final", {}).items():
        val = rep.rows[-1][col]
        if not val <= float(thresh):
            failed.append(f"final {col!r} = {fmt_float(val)} > {thresh}")
    if failed:
        for msg in failed:
            print(f"guard failure: {msg}", file=sys.stderr)
        return EXIT_GUARD
    return EXIT_OK


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plevylab",
        description="nonlocal p-Levy operators, energy forms, and their local limits",
    )
    parser.add_argument("--config", help="path to a JSON config file")
    parser.add_argument("--out-dir", help="output directory (overrides config)")
    parser.add_argument("--threads", type=int, help="reserved; accepted for compatibility")
    parser.add_argument("--seed", type=int, help="seed override")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("constants", "kernel-check", "pointwise", "solve", "trace"):
        sub.add_parser(name)
    sweep = sub.add_parser("sweep")
    sweep.add_argument(
        "sweep_name",
        choices=("bbm", "collapse", "dirichlet", "neumann", "weakdata", "fractional", "functional"),
    )
    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    threads = args.threads
    if threads is None and os.environ.get("PLEVY_THREADS"):
        try:
            threads = int(os.environ["PLEVY_THREADS"])
        except ValueError:
            print("invalid PLEVY_THREADS value", file=sys.stderr)
            return EXIT_VALIDATION
    if threads is not None and threads < 1:
        print("--threads must be >= 1", file=sys.stderr)
        return EXIT_VALIDATION
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"cannot read config: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        if not isinstance(cfg, dict):
            print("config must be a JSON object", file=sys.stderr)
            return EXIT_VALIDATION
    if args.seed is not None:
        cfg["seed"] = args.seed
    try:
        if args.command == "constants":
            return _cmd_constants(cfg, args)
        if args.command == "kernel-check":
            return _cmd_kernel_check(cfg, args)
        if args.command == "pointwise":
            return _cmd_pointwise(cfg, args)
        if args.command == "solve":
            return _cmd_solve(cfg, args)
        if args.command == "trace":
            return _cmd_trace(cfg, args)
        if args.command == "sweep":
            return _run_sweep(args.sweep_name, cfg, args)
    except (ConfigError, ExpressionError, IncompatibleDataError, ValueError, KeyError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    raise AssertionError("unreachable")


def main() -> None:
    sys.exit(run())
