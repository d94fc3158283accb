"""Kernel families: normalization, tails, closed forms, collar selection."""

import math

import numpy as np
import pytest

from plevylab.constants import ExponentDim, sphere_area
from plevylab.kernels import (
    IntegrabilityError,
    RadialQuadrature,
    choose_collar,
    custom_kernel,
    exponential_base,
    fractional_kernel,
    fractional_seminorm_kernel,
    indicator_base,
    plevy_mass,
    rescaled_kernel,
    tail_mass,
)

PD2 = ExponentDim(p=2.0, d=1)
EPS_LADDER = [0.4, 0.2, 0.1, 0.05]


def test_fractional_mass_is_one_by_quadrature():
    k = fractional_kernel(PD2, 0.3)
    assert abs(plevy_mass(k) - 1.0) <= 1e-3  # analytic value is exactly 1


def test_fractional_tail_closed_form():
    # tail(delta) = eps * delta^{-(1-eps)p}
    k = fractional_kernel(PD2, 0.1)
    assert tail_mass(k, 1.0) == pytest.approx(0.1, rel=1e-12)
    assert tail_mass(k, 2.0) == pytest.approx(0.1 * 2.0 ** (-1.8), rel=1e-12)


def test_fractional_tail_matches_quadrature():
    k = fractional_kernel(PD2, 0.25)
    delta = 0.7
    closed = tail_mass(k, delta)
    # independent route: integrate the profile numerically
    from plevylab.kernels import _adaptive_radial

    quad = sphere_area(1) * _adaptive_radial(
        lambda r: np.asarray(k.profile(r)), delta, 1e8, settle_tol=1e-10
    )
    assert quad == pytest.approx(closed, rel=1e-6)


def test_fractional_small_ball_pmoment():
    # (1 - eps) delta^{eps p}
    k = fractional_kernel(PD2, 0.1)
    assert k.small_ball_pmoment(0.5) == pytest.approx(0.9 * 0.5**0.2, rel=1e-12)
    # mass splits: pmoment(1) + tail(1) = 1
    assert k.small_ball_pmoment(1.0) + tail_mass(k, 1.0) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("eps", EPS_LADDER)
@pytest.mark.parametrize("family", ["fractional", "rescaled-ind", "rescaled-exp"])
def test_mass_one_along_ladder(family, eps):
    if family == "fractional":
        k = fractional_kernel(PD2, eps)
    elif family == "rescaled-ind":
        k = rescaled_kernel(indicator_base(PD2), eps)
    else:
        k = rescaled_kernel(exponential_base(PD2), eps)
    assert abs(plevy_mass(k) - 1.0) <= 1e-3


@pytest.mark.parametrize("delta", [0.25, 0.5, 1.0])
def test_tail_decay_in_eps_both_families(delta):
    # weak decrease with one uphill step of <= 10% of the previous value
    # (the sweep convention; the exponential base genuinely backtracks by
    # ~3% at delta = 0.25 between eps = 0.4 and 0.2)
    for build in (
        lambda e: fractional_kernel(PD2, e),
        lambda e: rescaled_kernel(exponential_base(PD2), e),
    ):
        tails = [tail_mass(build(e), delta) for e in EPS_LADDER]
        uphill = sum(1 for a, b in zip(tails, tails[1:]) if b > a)
        assert uphill <= 1
        assert all(b <= a * 1.10 for a, b in zip(tails, tails[1:]))
        assert tails[-1] < tails[0]


@pytest.mark.parametrize("delta", [0.25, 0.5, 1.0])
def test_tail_decreasing_indicator_base(delta):
    tails = [tail_mass(rescaled_kernel(indicator_base(PD2), e), delta) for e in EPS_LADDER]
    assert all(b <= a + 1e-15 for a, b in zip(tails, tails[1:]))


def test_rescaled_exponential_tail_strictly_decreasing():
    k = lambda e: rescaled_kernel(exponential_base(PD2), e)
    tails = [tail_mass(k(e), 0.5) for e in (0.2, 0.1, 0.05)]
    assert tails[0] > tails[1] > tails[2] > 0.0


def test_rescaled_indicator_profile_matches_hand_formula():
    eps = 0.25
    base = indicator_base(PD2)
    k = rescaled_kernel(base, eps)
    c0 = (1 + 2.0) / 2.0  # (d+p)/|S^0|
    # inside the scaled support the first piece applies; outside it vanishes
    assert float(k(np.asarray([0.1]))[0]) == pytest.approx(eps ** (-3.0) * c0, rel=1e-14)
    assert float(k(np.asarray([0.3]))[0]) == 0.0
    assert float(k(np.asarray([1.2]))[0]) == 0.0


def test_rescaled_exponential_piecewise_profile():
    eps = 0.25
    base = exponential_base(PD2)
    k = rescaled_kernel(base, eps)
    c = float(base.fn(np.asarray([0.0]))[0])
    r1, r2, r3 = 0.1, 0.5, 2.0
    assert float(k(np.asarray([r1]))[0]) == pytest.approx(
        eps ** (-3.0) * c * math.exp(-r1 / eps), rel=1e-12
    )
    assert float(k(np.asarray([r2]))[0]) == pytest.approx(
        eps ** (-1.0) * r2 ** (-2.0) * c * math.exp(-r2 / eps), rel=1e-12
    )
    assert float(k(np.asarray([r3]))[0]) == pytest.approx(
        eps ** (-1.0) * c * math.exp(-r3 / eps), rel=1e-12
    )


def test_radiality_spot_check():
    k = fractional_kernel(PD2, 0.3)
    r = np.asarray([0.2, 1.7])
    assert np.allclose(k(r), k(-r))


def test_custom_unnormalized_kernel_reports_mass():
    # nu(r) = r^{-d-p}: integrable against (1 ^ r^p) down to the cutoff only;
    # the computed mass is finite and far from 1
    k = custom_kernel(PD2, lambda r: np.power(r, -3.0))
    m = plevy_mass(k, RadialQuadrature(r_min=1e-6))
    assert np.isfinite(m) and abs(m - 1.0) > 1.0


def test_non_decaying_profile_raises_integrability_error():
    # a non-integrable tail can never satisfy the p-Levy condition
    k = custom_kernel(PD2, lambda r: np.ones_like(np.asarray(r, dtype=float)))
    with pytest.raises(IntegrabilityError):
        plevy_mass(k, RadialQuadrature(r_min=1e-6))


def test_choose_collar_fractional_closed_form():
    # eps W^{-1.8} <= 0.01 needs W >= 10^{1/1.8} ~ 3.594 -> ladder value 4
    k = fractional_kernel(PD2, 0.1)
    assert choose_collar(k, 0.01) == 4.0


def test_choose_collar_tau_one_first_entry():
    k = fractional_kernel(PD2, 0.4)
    assert choose_collar(k, 1.0) == 0.5


def test_choose_collar_rescaled_finite():
    k = rescaled_kernel(exponential_base(PD2), 0.05)
    w = choose_collar(k, 0.01)
    assert 0.5 <= w <= 16.0
    assert tail_mass(k, w) <= 0.01


def test_base_profile_rejects_unnormalized():
    from plevylab.kernels import BaseProfile

    with pytest.raises(ValueError):
        BaseProfile(name="bad", pd=PD2, fn=lambda r: np.full_like(np.asarray(r, float), 7.0), support=1.0)


def test_one_dim_lower_bound_metadata():
    assert fractional_kernel(PD2, 0.2).satisfies_one_dim_lower_bound is True
    assert rescaled_kernel(indicator_base(PD2), 0.2).satisfies_one_dim_lower_bound is True
    assert custom_kernel(PD2, lambda r: np.exp(-np.asarray(r))).satisfies_one_dim_lower_bound is None


def test_fractional_seminorm_kernel_mass_tends_to_inverse_K():
    # p-Levy mass of (C~/2) r^{-d-sp} tends to 1/K_{d,p} as s -> 1; at high s
    # the sub-float-range mass forces the closed-form route
    from plevylab.constants import k_const

    pd = ExponentDim(p=2.0, d=1)
    k9 = fractional_seminorm_kernel(pd, 0.9)
    closed9 = k9.small_ball_pmoment(1.0) + k9.tail_closed_form(1.0)
    assert plevy_mass(k9) == pytest.approx(closed9, rel=1e-6)
    k999 = fractional_seminorm_kernel(pd, 0.999)
    closed = k999.small_ball_pmoment(1.0) + k999.tail_closed_form(1.0)
    assert closed == pytest.approx(1.0 / k_const(pd), rel=1e-3)


def test_interval_integrals_match_closed_form():
    k = fractional_kernel(PD2, 0.3)
    lo = np.asarray([0.5, 1.0])
    hi = np.asarray([0.75, 2.0])
    got = k.interval_profile_integrals(lo, hi)
    a = 2.0 * 0.3 * 0.7 / 2.0
    q = 1.0 + (1.0 - 0.3) * 2.0
    want = a * (lo ** (1 - q) - hi ** (1 - q)) / (q - 1)
    assert np.allclose(got, want, rtol=1e-12)


def test_interval_integrals_quadrature_path():
    # the rescaled kernel has no interval closed form; verify against a
    # brute-force Riemann sum over one cell spanning the eps breakpoint
    eps = 0.3
    k = rescaled_kernel(exponential_base(PD2), eps)
    lo, hi = 0.25, 0.35
    got = float(k.interval_profile_integrals(np.asarray([lo]), np.asarray([hi]))[0])
    r = np.linspace(lo, hi, 400001)
    want = float(np.trapezoid(k(r), r))
    assert got == pytest.approx(want, rel=1e-7)
