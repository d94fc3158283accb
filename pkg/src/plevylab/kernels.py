"""Radial p-Levy kernels: the two approximation-of-identity families plus customs.

A kernel is stored as a radial profile r -> nu(r) together with whatever
closed forms the family admits (tail mass, small-ball p-moment, interval
integrals of the profile). The closed forms matter: the power-law families
are too singular for naive quadrature near 0 and too heavy-tailed for naive
truncation, and the discrete forms consume exact per-cell integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gammainc, gammaincc, gammaln

from .constants import ExponentDim, c_tilde, sphere_area

__all__ = [
    "BaseProfile",
    "Kernel",
    "IntegrabilityError",
    "indicator_base",
    "exponential_base",
    "fractional_kernel",
    "rescaled_kernel",
    "fractional_seminorm_kernel",
    "custom_kernel",
    "plevy_mass",
    "tail_mass",
    "choose_collar",
]

_BASE_NORMALIZATION_TOL = 1e-6
_COLLAR_LADDER_START = 0.5
_COLLAR_LADDER_MAX = 1e4


class IntegrabilityError(ArithmeticError):
    """Radial quadrature failed to settle (profile not p-Levy integrable)."""


def _gauss_legendre_panels(edges_lo: np.ndarray, edges_hi: np.ndarray, fn, npts: int = 16):
    """Vectorized fixed-order GL quadrature of fn over many intervals at once."""
    nodes, weights = np.polynomial.legendre.leggauss(npts)
    mid = 0.5 * (edges_lo + edges_hi)
    half = 0.5 * (edges_hi - edges_lo)
    pts = mid[:, None] + half[:, None] * nodes[None, :]
    vals = fn(pts.ravel()).reshape(pts.shape)
    return half * (vals @ weights)


@dataclass(frozen=True)
class BaseProfile:
    """Radial base profile with certified p-Levy normalization int (1^|h|^p) nu = 1."""

    name: str
    pd: ExponentDim
    fn: Callable[[np.ndarray], np.ndarray]
    support: float  # radius; inf when fully supported
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        mass = _radial_plevy_mass(self.fn, self.pd, self.support, self.breakpoints)
        if abs(mass - 1.0) > _BASE_NORMALIZATION_TOL:
            raise ValueError(f"base profile {self.name!r} is not normalized: mass={mass!r}")


def indicator_base(pd: ExponentDim) -> BaseProfile:
    """nu(u) = c 1_{|u|<=1} with c = (d+p)/|S^{d-1}|."""
    c = (pd.d + pd.p) / sphere_area(pd.d)
    return BaseProfile(
        name="indicator",
        pd=pd,
        fn=lambda r: np.where(np.asarray(r) <= 1.0, c, 0.0),
        support=1.0,
        breakpoints=(1.0,),
    )


def exponential_base(pd: ExponentDim) -> BaseProfile:
    """nu(u) = c e^{-|u|}, normalized via incomplete-Gamma closed forms."""
    d, p = pd.d, pd.p
    lower = float(gammainc(p + d, 1.0)) * math.exp(gammaln(p + d))  # gamma(p+d, 1)
    upper = float(gammaincc(d, 1.0)) * math.exp(gammaln(d))  # Gamma(d, 1)
    c = 1.0 / (sphere_area(d) * (lower + upper))
    return BaseProfile(
        name="exponential",
        pd=pd,
        fn=lambda r: c * np.exp(-np.asarray(r, dtype=float)),
        support=math.inf,
    )


@dataclass(frozen=True, eq=False)
class Kernel:
    """Immutable radial kernel; evaluation and all integrals are pure."""

    family: str
    pd: ExponentDim
    profile: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)
    support: float = math.inf
    breakpoints: tuple[float, ...] = ()
    tail_closed_form: Callable[[float], float] | None = None
    pmoment_closed_form: Callable[[float], float] | None = None
    interval_closed_form: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    satisfies_one_dim_lower_bound: bool | None = None

    def __call__(self, r) -> np.ndarray:
        """Profile value nu(|h|); radial by construction."""
        return np.asarray(self.profile(np.abs(np.asarray(r, dtype=float))))

    def interval_profile_integrals(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """Exact-ish per-interval integrals of the radial profile, int_lo^hi nu(r) dr."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if self.interval_closed_form is not None:
            return self.interval_closed_form(lo, hi)
        out = np.zeros_like(lo)
        cuts = [b for b in self.breakpoints if np.any((lo < b) & (b < hi))]
        pieces_lo, pieces_hi = [lo], [hi]
        for b in cuts:
            new_lo, new_hi = [], []
            for a, c in zip(pieces_lo, pieces_hi):
                inside = (a < b) & (b < c)
                new_lo += [a, np.where(inside, b, c)]
                new_hi += [np.where(inside, b, c), c]
                # degenerate slices integrate to zero
            pieces_lo, pieces_hi = new_lo, new_hi
        for a, c in zip(pieces_lo, pieces_hi):
            mask = c > a
            if np.any(mask):
                vals = _gauss_legendre_panels(a[mask], c[mask], self.profile)
                tmp = np.zeros_like(out)
                tmp[mask] = vals
                out = out + tmp
        return out

    def small_ball_pmoment(self, delta: float) -> float:
        """int_{|h|<delta} |h|^p nu(h) dh (full d-dimensional integral)."""
        if delta <= 0.0:
            return 0.0
        if self.pmoment_closed_form is not None:
            return self.pmoment_closed_form(delta)
        d, p = self.pd.d, self.pd.p
        fn = lambda r: np.asarray(self.profile(r)) * r ** (p + d - 1)
        rmax = min(delta, self.support)
        return sphere_area(d) * _adaptive_radial(fn, 1e-8, rmax, self.breakpoints)


def _powerlaw_kernel(
    family: str,
    pd: ExponentDim,
    coef: float,
    exponent: float,
    params: dict,
    one_dim_lb: bool | None,
) -> Kernel:
    """Kernel coef * r^{-exponent} with every integral in closed form."""
    d, p = pd.d, pd.p
    sphere = sphere_area(d)

    def profile(r):
        return coef * np.power(np.asarray(r, dtype=float), -exponent)

    q = exponent - d  # tail decay order of the full-space integral

    def tail(delta: float) -> float:
        # |S^{d-1}| int_delta^inf coef r^{d-1-exponent} dr
        return sphere * coef * delta ** (-q) / q

    m = p + d - exponent  # p-moment integrand power + 1

    def pmoment(delta: float) -> float:
        return sphere * coef * delta**m / m

    def interval(lo, hi):
        e = exponent
        return coef * (np.power(lo, 1 - e) - np.power(hi, 1 - e)) / (e - 1)

    return Kernel(
        family=family,
        pd=pd,
        profile=profile,
        params=params,
        support=math.inf,
        tail_closed_form=tail,
        pmoment_closed_form=pmoment,
        interval_closed_form=interval,
        satisfies_one_dim_lower_bound=one_dim_lb,
    )


def fractional_kernel(pd: ExponentDim, eps: float) -> Kernel:
    """nu_eps(h) = a_{eps,d,p} |h|^{-d-(1-eps)p}; p-Levy mass is exactly 1.

    Tail closed form: eps * delta^{-(1-eps)p}; small-ball p-moment:
    (1-eps) * delta^{eps p}.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError(f"eps must lie in (0,1), got {eps}")
    a = pd.p * eps * (1.0 - eps) / sphere_area(pd.d)
    return _powerlaw_kernel(
        "fractional",
        pd,
        coef=a,
        exponent=pd.d + (1.0 - eps) * pd.p,
        params={"eps": eps},
        one_dim_lb=True,
    )


def fractional_seminorm_kernel(pd: ExponentDim, s: float) -> Kernel:
    """k_s(h) = (C~_{d,p,s}/2) |h|^{-d-sp}: the kernel of the W^{s,p} forms.

    The operator built on this kernel is the normalized fractional
    p-Laplacian itself (no auxiliary scaling), and its p-Levy mass tends to
    1/K_{d,p} as s -> 1^-.
    """
    ct = c_tilde(pd, s)
    return _powerlaw_kernel(
        "fractional-seminorm",
        pd,
        coef=0.5 * ct,
        exponent=pd.d + s * pd.p,
        params={"s": s, "c_tilde": ct},
        one_dim_lb=True,
    )


def rescaled_kernel(base: BaseProfile, eps: float) -> Kernel:
    """Three-piece rescaling of a normalized base profile.

    eps^{-d-p} nu(h/eps) on |h|<=eps, eps^{-d}|h|^{-p} nu(h/eps) on
    eps<|h|<=1, eps^{-d} nu(h/eps) beyond; the p-Levy mass is exactly 1 for
    every eps by change of variables.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError(f"eps must lie in (0,1), got {eps}")
    pd = base.pd
    d, p = pd.d, pd.p
    bfn = base.fn

    def profile(r):
        r = np.asarray(r, dtype=float)
        scaled = bfn(r / eps)
        with np.errstate(divide="ignore"):
            mid = eps ** (-d) * np.power(r, -p) * scaled
        return np.where(
            r <= eps, eps ** (-d - p) * scaled, np.where(r <= 1.0, mid, eps ** (-d) * scaled)
        )

    support = eps * base.support
    breaks = tuple(
        sorted(
            {eps, 1.0}
            | {eps * b for b in base.breakpoints}
            | ({support} if math.isfinite(support) else set())
        )
    )
    tail_cf = None
    if base.name == "indicator":
        c0 = float(bfn(np.asarray([0.5]))[0])  # constant on the support

        def tail_cf(delta: float) -> float:
            if delta >= support:
                return 0.0
            return sphere_area(d) * c0 * eps ** (-d - p) * (support**d - delta**d) / d

    return Kernel(
        family="rescaled",
        pd=pd,
        profile=profile,
        params={"eps": eps, "base": base.name},
        support=support,
        breakpoints=breaks,
        tail_closed_form=tail_cf,
        satisfies_one_dim_lower_bound=True,
    )


def custom_kernel(
    pd: ExponentDim,
    profile: Callable[[np.ndarray], np.ndarray],
    support: float = math.inf,
    breakpoints: tuple[float, ...] = (),
    name: str = "custom",
) -> Kernel:
    """Wrap a user-supplied radial profile; all integrals fall back to quadrature."""
    return Kernel(family=name, pd=pd, profile=profile, support=support, breakpoints=breakpoints)


# ---------------------------------------------------------------------------
# radial quadrature: geometric subdivision + midpoint rule, refined until the
# value settles (the (1 ^ r^p) weight tames p-Levy singularities but the cell
# layout must still follow the power-law geometry)


def _midpoint_geometric(fn, r_min: float, r_max: float, cells: int, breakpoints) -> float:
    edges = np.geomspace(r_min, r_max, cells + 1)
    for b in breakpoints:
        if r_min < b < r_max:
            edges = np.unique(np.concatenate([edges, [b]]))
    mid = 0.5 * (edges[:-1] + edges[1:])
    return float(np.sum(np.asarray(fn(mid)) * np.diff(edges)))


def _adaptive_radial(
    fn,
    r_min: float,
    r_max: float,
    breakpoints=(),
    settle_tol: float = 1e-7,
    max_levels: int = 14,
) -> float:
    if r_max <= r_min:
        return 0.0
    cells = 64
    prev = _midpoint_geometric(fn, r_min, r_max, cells, breakpoints)
    for _ in range(max_levels):
        cells *= 2
        cur = _midpoint_geometric(fn, r_min, r_max, cells, breakpoints)
        if abs(cur - prev) < settle_tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise IntegrabilityError(
        f"radial quadrature did not settle on [{r_min}, {r_max}] after {max_levels} refinements"
    )


def _quadrature_r_max(kernel: Kernel, tol: float) -> float:
    if math.isfinite(kernel.support):
        return kernel.support
    if kernel.tail_closed_form is not None:
        r = 1.0
        while kernel.tail_closed_form(r) > tol and r < 1e12:
            r *= 2.0
        return r
    # plain geometric extension: stop once a decade contributes below tol
    d = kernel.pd.d
    sphere = sphere_area(d)
    r = 8.0
    while r < 1e9:
        fn = lambda t: np.asarray(kernel.profile(t)) * t ** (d - 1)
        chunk = sphere * _adaptive_radial(fn, r, 10.0 * r, kernel.breakpoints)
        if chunk < tol:
            return 10.0 * r
        r *= 10.0
    raise IntegrabilityError("kernel tail does not decay; cannot choose r_max")


def _radial_plevy_mass(profile_fn, pd: ExponentDim, support: float, breakpoints) -> float:
    d, p = pd.d, pd.p
    fn = lambda r: np.minimum(1.0, r**p) * np.asarray(profile_fn(r)) * r ** (d - 1)
    r_max = support if math.isfinite(support) else 1e6
    return sphere_area(d) * _adaptive_radial(fn, 1e-8, r_max, breakpoints)


@dataclass(frozen=True)
class RadialQuadrature:
    """Spec of the radial quadrature window used by plevy_mass.

    r_min = None adapts the inner cutoff so that the (1 ^ r^p)-weighted mass
    below it is negligible — mandatory for the fractional family at small
    eps, whose mass concentrates below any fixed cutoff (at eps = 0.05 some
    15% of it sits below 1e-8).
    """

    r_min: float | None = None
    tail_tol: float = 1e-6

    def __post_init__(self):
        if self.r_min is not None and self.r_min > 1e-6:
            raise ValueError("r_min must be <= 1e-6")


def _auto_r_min(kernel: Kernel) -> float:
    if kernel.pmoment_closed_form is None:
        return 1e-8  # bounded-at-zero profiles lose O(r_min^{p+d}) only
    r = 1e-8
    while r > 1e-280 and kernel.pmoment_closed_form(r) > 1e-10:
        r *= 1e-2
    return r


def plevy_mass(kernel: Kernel, quad: RadialQuadrature | None = None) -> float:
    """p-Levy mass int (1 ^ |h|^p) nu(h) dh by adaptive radial quadrature."""
    quad = quad or RadialQuadrature()
    d, p = kernel.pd.d, kernel.pd.p
    r_min = quad.r_min if quad.r_min is not None else _auto_r_min(kernel)
    r_max = _quadrature_r_max(kernel, quad.tail_tol)
    fn = lambda r: np.minimum(1.0, r**p) * np.asarray(kernel.profile(r)) * r ** (d - 1)
    return sphere_area(d) * _adaptive_radial(fn, r_min, r_max, kernel.breakpoints)


def tail_mass(kernel: Kernel, delta: float) -> float:
    """int_{|h|>delta} nu(h) dh; closed form when the family provides one."""
    if delta <= 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    if kernel.tail_closed_form is not None:
        return float(kernel.tail_closed_form(delta))
    if delta >= kernel.support:
        return 0.0
    d = kernel.pd.d
    r_max = _quadrature_r_max(kernel, 1e-10)
    fn = lambda r: np.asarray(kernel.profile(r)) * r ** (d - 1)
    if delta >= r_max:
        return 0.0
    return sphere_area(d) * _adaptive_radial(fn, delta, r_max, kernel.breakpoints)


def choose_collar(kernel: Kernel, tau_tail: float) -> float:
    """Smallest collar width on the geometric ladder with tail mass <= tau_tail."""
    if not (0.0 < tau_tail <= 1.0):
        raise ValueError(f"tau_tail must lie in (0,1], got {tau_tail}")
    w = _COLLAR_LADDER_START
    while w <= _COLLAR_LADDER_MAX:
        if tail_mass(kernel, w) <= tau_tail:
            return w
        w *= 2.0
    raise ValueError(
        "collar ladder exhausted (W > 1e4); the kernel tail needs analytic handling"
    )
