"""Scalar p-calculus: psi, the elementary inequalities, Taylor remainders."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plevylab.calculus import (
    PConstants,
    check_simons,
    check_taylor,
    psi,
    psi_reg,
    zeta_profile,
)

P_BASKET = [1.25, 1.5, 2.0, 2.5, 3.0, 4.0]


def test_psi_identity_at_p2():
    assert psi(2.0, -3.0) == -3.0
    assert psi(3.0, -2.0) == -4.0


def test_psi_tiny_argument_no_overflow():
    v = psi(1.5, 1e-300)
    assert 0.0 <= v < 1e-149
    assert psi(1.5, -1e-300) == -v
    assert psi(1.25, 0.0) == 0.0


def test_psi_reg_matches_psi_at_zero_delta():
    t = np.linspace(-2, 2, 7)
    assert np.allclose(psi_reg(2.5, t, 0.0), psi(2.5, t))
    # and is a smooth surrogate otherwise
    assert abs(psi_reg(1.5, 0.0, 0.1)) == 0.0


@given(st.floats(-1e6, 1e6), st.sampled_from(P_BASKET))
@settings(max_examples=200, deadline=None)
def test_psi_odd(t, p):
    assert psi(p, -t) == pytest.approx(-psi(p, t), rel=1e-12, abs=1e-300)


@given(st.floats(-100, 100), st.floats(-100, 100), st.sampled_from(P_BASKET))
@settings(max_examples=200, deadline=None)
def test_psi_monotone(a, b, p):
    assert (psi(p, a) - psi(p, b)) * (a - b) >= -1e-12 * max(1.0, abs(a), abs(b)) ** p


def test_pconstants_branches():
    k2 = PConstants.for_p(2.0)
    assert k2.kappa == 1.0 and k2.kappa_prime == 0.5  # degenerate branch at p = 2
    k4 = PConstants.for_p(4.0)
    assert k4.kappa == 3.0 and k4.kappa_prime == 0.25
    k15 = PConstants.for_p(1.5)
    assert k15.kappa == pytest.approx(2.0**0.5 * 1.5)
    assert k15.kappa_prime == 0.5
    assert k15.alpha == 0.0 and k15.beta == pytest.approx(-0.25)
    assert k4.alpha == 1.0 and k4.beta == 0.0


def test_simons_trivial_equal_points():
    rep = check_simons(3.0, [1.0, 2.0], [1.0, 2.0])
    assert rep.satisfied and rep.upper_margin == 0.0 and rep.lower_margin == 0.0


def test_simons_p2_degenerate_equality():
    # |x - y| <= kappa_2 |x - y| with kappa_2 = 1: equality, still satisfied
    rep = check_simons(2.0, [2.0], [-1.0])
    assert rep.satisfied
    assert rep.upper_margin == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("p", P_BASKET)
def test_simons_randomized_no_violations(p):
    rng = np.random.default_rng(1234)
    for dim in (1, 2, 3):
        xs = rng.uniform(-10, 10, size=(400, dim))
        ys = rng.uniform(-10, 10, size=(400, dim))
        for x, y in zip(xs, ys):
            assert check_simons(p, x, y).satisfied


def test_taylor_zero_increment():
    rep = check_taylor(2.5, [0.3, -0.4], [0.0, 0.0])
    assert rep.satisfied and rep.upper_margin == 0.0 and rep.lower_margin == 0.0


def test_taylor_p2_middle_is_square():
    x, y = np.asarray([1.0]), np.asarray([0.5])
    mid = np.linalg.norm(x + y) ** 2 - np.linalg.norm(x) ** 2 - 2 * float(x @ y)
    assert mid == pytest.approx(float(np.linalg.norm(y) ** 2))
    rep = check_taylor(2.0, x, y)
    assert rep.satisfied
    # bounds bracket |y|^2: 2|y|^2 above, kappa'_2 |y|^2 = |y|^2/2 below
    assert rep.upper_margin == pytest.approx(0.25)
    assert rep.lower_margin == pytest.approx(0.125)


@pytest.mark.parametrize("p", P_BASKET)
def test_taylor_randomized_no_violations(p):
    rng = np.random.default_rng(4321)
    for dim in (1, 2):
        xs = rng.uniform(-10, 10, size=(400, dim))
        ys = rng.uniform(-10, 10, size=(400, dim))
        for x, y in zip(xs, ys):
            assert check_taylor(p, x, y).satisfied


def test_zeta_identically_zero_for_p2():
    rep = zeta_profile(2.0, np.asarray([-3.0, -0.5, 0.25, 10.0, 1e3]))
    assert np.max(np.abs(rep.zeta)) <= 1e-12


def test_zeta_integer_p_positive_branch_vanishes():
    rep = zeta_profile(3.0, np.asarray([0.25, 2.0, 1e3]))
    assert abs(rep.large_t_value - rep.large_t_target) <= 1e-10
    assert rep.large_t_target == 0.0
    # negative branch for odd p is bounded but tends to 2, not 0 (ledger)
    neg = zeta_profile(3.0, np.asarray([-1e6]))
    assert neg.zeta[0] == pytest.approx(2.0, rel=1e-4)


def test_zeta_fractional_p_limits():
    t = np.asarray([1e-6, -1e-6, 0.5, -2.0, 1e3, -1e3, 1e6])
    rep = zeta_profile(2.5, t)
    assert abs(rep.small_t_value) <= 1e-4
    assert rep.large_t_value == pytest.approx(1.0, abs=1e-2)
    assert np.isfinite(rep.bound)


def test_zeta_p3_large_positive_value_from_spec():
    rep = zeta_profile(3.0, np.asarray([1e3]))
    assert abs(rep.zeta[0]) <= 1e-10


def test_zeta_rejects_zero_sample():
    with pytest.raises(ValueError):
        zeta_profile(2.5, np.asarray([0.0, 1.0]))
