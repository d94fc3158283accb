"""Cell-centered grids over a box domain plus a truncated complement collar.

No node ever lies on the topological boundary (boxes have measure-zero
boundaries and the forms integrate over open regions), so every node is
unambiguously interior or collar. Beyond the collar the complement is
truncated; the neglected interaction is bounded by the kernel tail mass and
reported by the callers that rely on it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .expressions import Expression

__all__ = ["Domain", "Grid", "GridFunction", "build_grid", "sample", "integrate_omega"]

_DIVISIBILITY_RTOL = 1e-9


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box: an interval in 1D, a rectangle in 2D."""

    bounds: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.bounds) not in (1, 2):
            raise ValueError("only 1D and 2D boxes are supported")
        for lo, hi in self.bounds:
            if not hi > lo:
                raise ValueError(f"empty interior: bounds ({lo}, {hi})")

    @property
    def d(self) -> int:
        return len(self.bounds)

    @property
    def extents(self) -> tuple[float, ...]:
        return tuple(hi - lo for lo, hi in self.bounds)

    @property
    def volume(self) -> float:
        v = 1.0
        for e in self.extents:
            v *= e
        return v


@dataclass(eq=False)
class Grid:
    """Uniform cell-centered grid; immutable after construction."""

    domain: Domain
    spacing: float
    collar_width: float  # effective width actually covered (>= requested)
    coords: np.ndarray  # (n, d) node coordinates, lexicographic order
    in_omega: np.ndarray  # (n,) bool
    boundary_adjacent: np.ndarray  # (n,) bool, Omega cells touching the boundary
    shape: tuple[int, ...]  # cells per axis including collar
    omega_cells: tuple[int, ...] = field(default=())

    def __post_init__(self):
        self.coords.setflags(write=False)
        self.in_omega.setflags(write=False)
        self.boundary_adjacent.setflags(write=False)

    @property
    def d(self) -> int:
        return self.domain.d

    @property
    def n_nodes(self) -> int:
        return self.coords.shape[0]

    @property
    def n_omega(self) -> int:
        return int(np.sum(self.in_omega))

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.d

    @property
    def x(self) -> np.ndarray:
        """1D convenience accessor for node coordinates."""
        if self.d != 1:
            raise ValueError("x is only defined for 1D grids")
        return self.coords[:, 0]


@dataclass(eq=False)
class GridFunction:
    """Real node values on a grid; the discrete stand-in for u: R^d -> R."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"value count {self.values.shape} does not match grid ({self.grid.n_nodes},)"
            )
        if not np.all(np.isfinite(self.values)):
            i = int(np.argmax(~np.isfinite(self.values)))
            raise ValueError(f"non-finite value at node {tuple(self.grid.coords[i])}")

    def restrict_omega(self) -> np.ndarray:
        return self.values[self.grid.in_omega]


def build_grid(dom: Domain, spacing: float, collar: float) -> Grid:
    """Uniform cell-centered grid over Omega plus a collar of width >= collar.

    The spacing must tile every axis of Omega exactly; collar cells are whole
    cells, so the effective covered width is ceil(collar/spacing) * spacing.
    """
    if spacing <= 0.0:
        raise ValueError(f"spacing must be positive, got {spacing}")
    if collar < spacing:
        raise ValueError(f"collar ({collar}) must be at least one spacing ({spacing})")
    counts = []
    for lo, hi in dom.bounds:
        extent = hi - lo
        if spacing > extent:
            raise ValueError(f"spacing {spacing} exceeds domain extent {extent}")
        n = extent / spacing
        if abs(n - round(n)) > _DIVISIBILITY_RTOL * max(1.0, n):
            raise ValueError(f"spacing {spacing} does not divide the extent {extent}")
        counts.append(int(round(n)))
    n_col = int(np.ceil(collar / spacing - 1e-12))
    eff_collar = n_col * spacing

    axes, omega_axis_masks, adjacent_axis_masks = [], [], []
    for (lo, _), n_om in zip(dom.bounds, counts):
        total = n_om + 2 * n_col
        idx = np.arange(total)
        centers = lo + (idx - n_col + 0.5) * spacing
        inside = (idx >= n_col) & (idx < n_col + n_om)
        adjacent = inside & ((idx == n_col) | (idx == n_col + n_om - 1))
        axes.append(centers)
        omega_axis_masks.append(inside)
        adjacent_axis_masks.append(adjacent)

    shape = tuple(len(a) for a in axes)
    if dom.d == 1:
        coords = axes[0][:, None]
        in_omega = omega_axis_masks[0]
        boundary_adjacent = adjacent_axis_masks[0]
    else:
        coords = np.array(list(itertools.product(*axes)))
        in_omega = np.array(
            [a & b for a, b in itertools.product(omega_axis_masks[0], omega_axis_masks[1])]
        )
        adj = []
        for (ia, oa), (ib, ob) in itertools.product(
            zip(adjacent_axis_masks[0], omega_axis_masks[0]),
            zip(adjacent_axis_masks[1], omega_axis_masks[1]),
        ):
            adj.append((oa & ob) & (ia | ib))
        boundary_adjacent = np.array(adj)
    return Grid(
        domain=dom,
        spacing=spacing,
        collar_width=eff_collar,
        coords=np.ascontiguousarray(coords, dtype=float),
        in_omega=np.ascontiguousarray(in_omega, dtype=bool),
        boundary_adjacent=np.ascontiguousarray(boundary_adjacent, dtype=bool),
        shape=shape,
        omega_cells=tuple(counts),
    )


def sample(expr: Expression | str, grid: Grid) -> GridFunction:
    """Node-wise evaluation of a closed-form expression."""
    if isinstance(expr, str):
        expr = Expression(expr, d=grid.d)
    if expr.d != grid.d:
        raise ValueError(f"expression dimension {expr.d} does not match grid dimension {grid.d}")
    if grid.d == 1:
        vals = expr(grid.coords[:, 0])
    else:
        vals = expr(grid.coords[:, 0], grid.coords[:, 1])
    return GridFunction(grid=grid, values=vals)


def integrate_omega(grid: Grid, values: np.ndarray) -> float:
    """Midpoint-rule integral over Omega; exact for constants on boxes."""
    values = np.asarray(values, dtype=float)
    return float(np.sum(values[grid.in_omega]) * grid.cell_volume)
