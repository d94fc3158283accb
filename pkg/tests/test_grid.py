"""Grid construction, classification, sampling, and exact midpoint integration."""

import numpy as np
import pytest

from plevylab.expressions import EvaluationError
from plevylab.grid import Domain, GridFunction, build_grid, integrate_omega, sample

UNIT = Domain(bounds=((0.0, 1.0),))


def test_counts_1d_spec_example():
    g = build_grid(UNIT, 0.25, 0.5)
    assert g.n_omega == 4
    assert g.n_nodes - g.n_omega == 4
    assert np.allclose(np.sort(g.x[g.in_omega]), [0.125, 0.375, 0.625, 0.875])


def test_counts_2d_spec_example():
    g = build_grid(Domain(bounds=((0.0, 1.0), (0.0, 1.0))), 0.5, 0.5)
    assert g.n_omega == 4
    assert g.n_nodes - g.n_omega == 12


def test_collar_smaller_than_spacing_rejected():
    with pytest.raises(ValueError):
        build_grid(UNIT, 0.25, 0.1)


def test_spacing_larger_than_extent_rejected():
    with pytest.raises(ValueError):
        build_grid(UNIT, 2.0, 2.0)


def test_non_dividing_spacing_rejected():
    with pytest.raises(ValueError):
        build_grid(UNIT, 0.3, 0.3)


def test_cell_centered_nodes_avoid_boundary():
    g = build_grid(UNIT, 0.125, 0.25)
    x = g.x[g.in_omega]
    assert np.min(x) >= 0.0625 - 1e-15
    assert np.max(x) <= 1.0 - 0.0625 + 1e-15


def test_collar_covers_requested_width():
    g = build_grid(UNIT, 0.25, 0.6)  # 0.6 needs 3 cells of 0.25 -> 0.75
    assert g.collar_width == pytest.approx(0.75)
    collar_x = g.x[~g.in_omega]
    assert np.min(collar_x) < 0.0 - 0.6 + 0.25


def test_classes_disjoint_and_complete():
    g = build_grid(Domain(bounds=((0.0, 1.0), (0.0, 2.0))), 0.25, 0.5)
    assert g.n_omega + int(np.sum(~g.in_omega)) == g.n_nodes
    inside = np.all((g.coords > 0.0) & (g.coords < np.asarray([1.0, 2.0])), axis=1)
    assert np.array_equal(inside, g.in_omega)


def test_boundary_adjacent_flags():
    g = build_grid(UNIT, 0.25, 0.25)
    adj = g.boundary_adjacent
    assert np.array_equal(g.x[adj], [0.125, 0.875])


def test_ordering_is_deterministic():
    a = build_grid(UNIT, 0.125, 0.5)
    b = build_grid(UNIT, 0.125, 0.5)
    assert np.array_equal(a.coords, b.coords)
    assert np.array_equal(a.in_omega, b.in_omega)


def test_integrate_constant_exact():
    g = build_grid(Domain(bounds=((0.0, 1.0), (0.0, 0.5))), 0.125, 0.25)
    assert integrate_omega(g, np.ones(g.n_nodes)) == pytest.approx(0.5, abs=1e-15)


def test_sample_identity_and_cos():
    g = build_grid(UNIT, 0.25, 0.25)
    assert np.array_equal(sample("x", g).values, g.x)
    got = sample("cos(x)", g).values[g.in_omega][0]
    assert got == pytest.approx(np.cos(0.125), rel=1e-15)


def test_sample_pole_raises_with_coordinate():
    g = build_grid(Domain(bounds=((-0.5, 0.5),)), 0.25, 0.25)
    # cell centers avoid 0, so 1/x is finite here
    vals = sample("1/x", g).values
    assert np.all(np.isfinite(vals))
    # but a node placed on the pole errors with its coordinate
    g2 = build_grid(UNIT, 0.25, 0.5)  # has node exactly at x = -0.375 ... pick pole there
    with pytest.raises(EvaluationError, match="-0.375"):
        sample("1/(x+0.375)", g2)


def test_gridfunction_validation():
    g = build_grid(UNIT, 0.25, 0.25)
    with pytest.raises(ValueError):
        GridFunction(grid=g, values=np.ones(3))
    bad = np.ones(g.n_nodes)
    bad[2] = np.inf
    with pytest.raises(ValueError):
        GridFunction(grid=g, values=bad)
