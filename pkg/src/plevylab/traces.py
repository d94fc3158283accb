"""Nonlocal and local trace norms by constrained energy minimization, and the
robust lifting (the energy-minimal extension of complement data).

The nonlocal trace norm minimizes the p-th power of the full nonlocal norm
over all extensions of the collar datum — the same constraint structure as a
Dirichlet solve, so the machinery is shared. The local trace norm is 1D
(where the boundary is two points) with endpoint values imposed on ghost
values through one-sided half-cell differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calculus import psi_reg, pth_power_reg
from .constants import ExponentDim, k_const
from .forms import FULL, assemble
from .grid import Domain, Grid, GridFunction, build_grid
from .kernels import Kernel
from .solve import (
    NONLOCAL_DIRICHLET,
    Problem,
    SolveConfig,
    Solution,
    _minimize,
    solve,
)

__all__ = [
    "nonlocal_trace_norm",
    "local_trace_norm_1d",
    "robust_lifting",
    "trace_convergence_report",
    "TraceRow",
]


def _vals(u) -> np.ndarray:
    return u.values if isinstance(u, GridFunction) else np.asarray(u, dtype=float)


def nonlocal_trace_norm(kernel: Kernel, grid: Grid, datum, cfg: SolveConfig | None = None) -> float:
    """inf { ||u||_{W^p_nu(Omega|R^d)} : u = datum on the collar }.

    datum is a full grid function; only its collar values matter.
    """
    cfg = cfg or SolveConfig()
    p = kernel.pd.p
    g = _vals(datum)
    asm = assemble(grid, kernel)
    om = grid.in_omega
    fixed = ~om
    vol = grid.cell_volume
    pairw = asm.pair * asm.region_mask(FULL)
    edgew = asm.edge_weights(FULL) * asm.edge_moment if grid.d == 1 else np.zeros(0)
    h = grid.spacing

    def value(v, delta):
        du = np.subtract.outer(v, v)
        E = float(np.sum(pth_power_reg(p, du, delta) * pairw)) * vol**2
        if edgew.size:
            E += float(np.sum(edgew * pth_power_reg(p, np.diff(v) / h, delta))) * vol
        lp = float(np.sum(pth_power_reg(p, v[om], delta))) * vol
        return lp + E

    def grad(v, delta):
        gvec = 2.0 * p * np.sum(psi_reg(p, np.subtract.outer(v, v), delta) * pairw, axis=1) * vol**2
        if edgew.size:
            flux = p * edgew * psi_reg(p, np.diff(v) / h, delta)
            gvec[:-1] -= flux
            gvec[1:] += flux
        gvec[om] += p * psi_reg(p, v[om], delta) * vol
        return gvec

    def project_point(x):
        x[fixed] = g[fixed]
        return x

    def project_grad(gv):
        gv = gv.copy()
        gv[fixed] = 0.0
        return gv

    x0 = np.full(grid.n_nodes, float(np.mean(g[fixed])))
    x0[fixed] = g[fixed]
    schedule = (0.0,) if p >= 2.0 else tuple(
        d * max(1.0, float(np.max(np.abs(g)))) for d in (1e-2, 1e-4, 1e-6, 0.0)
    )
    tol_abs = cfg.grad_tol * max(1.0, float(np.linalg.norm(project_grad(grad(project_point(x0.copy()), schedule[0])))))
    x = x0
    for delta in schedule:
        x, f, gn, _it, _hist = _minimize(
            lambda v, _d=delta: value(v, _d),
            lambda v, _d=delta: grad(v, _d),
            x,
            project_point,
            project_grad,
            cfg,
            tol_abs,
        )
    return value(x, 0.0) ** (1.0 / p)


def local_trace_norm_1d(
    pd: ExponentDim,
    endpoints: tuple[float, float],
    cfg: SolveConfig | None = None,
    spacing: float = 1.0 / 1024,
) -> float:
    """1D trace norm inf { ||u||*_{W^{1,p}(0,1)} : u(0+) = g0, u(1-) = g1 }.

    The endpoint values sit on ghost points at the boundary itself; the two
    boundary cells see them through half-cell one-sided differences.
    """
    cfg = cfg or SolveConfig()
    if pd.d != 1:
        raise ValueError("local trace norm is 1D only")
    p = pd.p
    g0, g1 = float(endpoints[0]), float(endpoints[1])
    K = k_const(pd)
    m = int(round(1.0 / spacing))
    h = 1.0 / m
    half = h / 2.0

    def value(v, delta):
        lp = float(np.sum(pth_power_reg(p, v, delta))) * h
        grad_pth = float(np.sum(pth_power_reg(p, np.diff(v) / h, delta))) * h
        grad_pth += float(pth_power_reg(p, (v[0] - g0) / half, delta)) * half
        grad_pth += float(pth_power_reg(p, (g1 - v[-1]) / half, delta)) * half
        return lp + K * grad_pth

    def grad(v, delta):
        gv = p * psi_reg(p, v, delta) * h
        flux = p * psi_reg(p, np.diff(v) / h, delta)  # interior edges, weight h/h
        gv[:-1] -= K * flux
        gv[1:] += K * flux
        gv[0] += K * p * psi_reg(p, (v[0] - g0) / half, delta)
        gv[-1] -= K * p * psi_reg(p, (g1 - v[-1]) / half, delta)
        return gv

    ident = lambda x: x
    x0 = g0 + (np.arange(m) + 0.5) * h * (g1 - g0)
    schedule = (0.0,) if p >= 2.0 else tuple(
        d * max(1.0, abs(g0), abs(g1)) for d in (1e-2, 1e-4, 1e-6, 0.0)
    )
    tol_abs = cfg.grad_tol * max(1.0, float(np.linalg.norm(grad(x0, schedule[0]))))
    x = x0
    for delta in schedule:
        x, f, gn, _it, _hist = _minimize(
            lambda v, _d=delta: value(v, _d),
            lambda v, _d=delta: grad(v, _d),
            x,
            ident,
            ident,
            cfg,
            tol_abs,
        )
    return value(x, 0.0) ** (1.0 / p)


def robust_lifting(kernel: Kernel, grid: Grid, datum, cfg: SolveConfig | None = None) -> Solution:
    """R_eps(datum): the nonlocal Dirichlet solution with f = 0 — the
    nonlocal p-harmonic extension of the collar datum."""
    prob = Problem(
        variant=NONLOCAL_DIRICHLET,
        pd=kernel.pd,
        grid=grid,
        kernel=kernel,
        f=None,
        g=_vals(datum),
    )
    return solve(prob, cfg)


@dataclass(frozen=True)
class TraceRow:
    eps: float
    nonlocal_norm: float
    local_norm: float
    gap: float


def trace_convergence_report(
    g_expr,
    pd: ExponentDim,
    eps_list,
    kernel_factory,
    cfg: SolveConfig | None = None,
    domain: Domain | None = None,
    spacing_rule=lambda eps: 1.0 / round(8.0 / eps),
    collar_rule=None,
) -> list[TraceRow]:
    """Nonlocal trace norms along an eps-ladder against the 1D local value.

    g_expr is a closed form on R; the local value uses its endpoint limits
    g(0), g(1). kernel_factory maps eps to a Kernel.
    """
    from .expressions import Expression
    from .grid import sample
    from .kernels import choose_collar

    if pd.d != 1:
        raise ValueError("trace reports are 1D only")
    cfg = cfg or SolveConfig()
    dom = domain or Domain(bounds=((0.0, 1.0),))
    expr = Expression(g_expr, d=1) if isinstance(g_expr, str) else g_expr
    lo, hi = dom.bounds[0]
    local = local_trace_norm_1d(pd, (expr.eval_scalar(lo), expr.eval_scalar(hi)), cfg)
    rows = []
    for eps in eps_list:
        k = kernel_factory(eps)
        h = spacing_rule(eps)
        W = collar_rule(k) if collar_rule is not None else max(choose_collar(k, 0.01), h)
        grid = build_grid(dom, h, W)
        datum = sample(expr, grid)
        nl = nonlocal_trace_norm(k, grid, datum, cfg)
        rows.append(TraceRow(eps=eps, nonlocal_norm=nl, local_norm=local, gap=abs(nl - local)))
    return rows
