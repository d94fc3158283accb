"""Universal constants of the nonlocal-to-local theory.

Everything funnels through log-Gamma so the ratios survive the pole/zero
cancellations near s = 0 and s = 1. The two published expressions for the
fractional normalization constant are cross-checked against each other away
from s = 1/2, where the cosine form is 0/0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import gammaln

__all__ = [
    "ExponentDim",
    "log_gamma",
    "sphere_area",
    "k_const",
    "c_frac",
    "c_tilde",
    "a_scaling",
    "ConsistencyError",
]

# keep the cosine form away from its removable singularity at s = 1/2
_COSINE_EXCLUSION = 1e-3
_S_MARGIN = 1e-4
_CROSS_CHECK_RTOL = 1e-9


class ConsistencyError(ArithmeticError):
    """The two equivalent expressions for C_{d,p,s} disagreed."""


@dataclass(frozen=True)
class ExponentDim:
    """Integrability exponent p in (1, inf) and spatial dimension d in {1, 2}."""

    p: float
    d: int

    def __post_init__(self):
        if not (self.p > 1.0) or not math.isfinite(self.p):
            raise ValueError(f"p must satisfy 1 < p < inf, got {self.p}")
        if self.d not in (1, 2):
            raise ValueError(f"d must be 1 or 2, got {self.d}")

    @property
    def p_conj(self) -> float:
        return self.p / (self.p - 1.0)


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0 (relative error <= 1e-13 on [1e-3, 1e3])."""
    if not (x > 0.0):
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return float(gammaln(x))


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^{d-1}: 2 pi^{d/2} / Gamma(d/2)."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return float(2.0 * math.pi ** (d / 2.0) / math.exp(log_gamma(d / 2.0)))


def k_const(pd: ExponentDim) -> float:
    """Spherical p-moment K_{d,p} = Gamma(d/2)Gamma((p+1)/2) / (Gamma((d+p)/2)Gamma(1/2)).

    Equals the average of |w_d|^p over the unit sphere; always in (0, 1],
    with K_{1,p} = 1 and K_{d,2} = 1/d.
    """
    d, p = pd.d, pd.p
    return math.exp(
        log_gamma(d / 2.0) + log_gamma((p + 1.0) / 2.0) - log_gamma((d + p) / 2.0) - log_gamma(0.5)
    )


def _c_frac_gamma(d: int, p: float, s: float) -> float:
    # all-Gamma expression; |Gamma(-s)| via reflection:
    # |Gamma(-s)| = pi / (sin(pi s) Gamma(1+s)) for s in (0,1)
    log_abs_gamma_neg_s = math.log(math.pi) - math.log(math.sin(math.pi * s)) - log_gamma(1.0 + s)
    num = (
        2.0 * s * math.log(2.0)
        + log_gamma((d + s * p) / 2.0)
        + log_gamma(s + 0.5)
        + log_gamma(2.0 * (1.0 - s))
    )
    den = (
        0.5 * d * math.log(math.pi)
        + log_abs_gamma_neg_s
        + log_gamma((s * p + 1.0) / 2.0)
        + log_gamma(p * (1.0 - s))
    )
    return math.exp(num - den)


def _c_frac_cosine(d: int, p: float, s: float) -> float:
    # s(1-2s)Gamma((d+sp)/2) / (pi^{(d-1)/2} Gamma((sp+1)/2) Gamma(p(1-s)) cos(s pi));
    # (1-2s) and cos(s pi) share a sign, so work with absolute values in log space
    log_mag = (
        math.log(s)
        + math.log(abs(1.0 - 2.0 * s))
        + log_gamma((d + s * p) / 2.0)
        - 0.5 * (d - 1) * math.log(math.pi)
        - log_gamma((s * p + 1.0) / 2.0)
        - log_gamma(p * (1.0 - s))
        - math.log(abs(math.cos(s * math.pi)))
    )
    return math.exp(log_mag)


def c_frac(pd: ExponentDim, s: float) -> float:
    """Fractional normalizing constant C_{d,p,s}, s in (0,1).

    Evaluated via the all-Gamma expression; away from s = 1/2 the cosine
    expression is evaluated too and the two must agree to 1e-9 relative.
    """
    # s within 1e-4 of {0,1} (exclusive, up to float slack) is out of range
    if not (_S_MARGIN - 1e-12 <= s <= 1.0 - _S_MARGIN + 1e-12):
        raise ValueError(f"s must lie in [{_S_MARGIN}, {1 - _S_MARGIN}], got {s}")
    d, p = pd.d, pd.p
    value = _c_frac_gamma(d, p, s)
    if abs(s - 0.5) > _COSINE_EXCLUSION:
        other = _c_frac_cosine(d, p, s)
        if abs(other - value) > _CROSS_CHECK_RTOL * abs(value):
            raise ConsistencyError(
                f"C_({d},{p},{s}) expressions disagree: gamma={value!r} cosine={other!r}"
            )
    return value


def c_tilde(pd: ExponentDim, s: float) -> float:
    """Piecewise constant: C_{d,p,s} if sp >= 1, else C_{d,2,sp/2}."""
    if s * pd.p >= 1.0:
        return c_frac(pd, s)
    return c_frac(ExponentDim(p=2.0, d=pd.d), s * pd.p / 2.0)


def a_scaling(pd: ExponentDim, eps: float) -> float:
    """Fractional-family scaling a_{eps,d,p} = p eps (1-eps) / |S^{d-1}|."""
    if not (0.0 < eps < 1.0):
        raise ValueError(f"eps must lie in (0,1), got {eps}")
    return pd.p * eps * (1.0 - eps) / sphere_area(pd.d)
