"""Scalar p-calculus: psi(t) = |t|^{p-2} t, elementary-inequality constants,
and the checkers the property tests lean on.

The inequality constants follow the degenerate/singular branch split; at the
shared point p = 2 the degenerate branch is used (both are valid there, and
the weaker constant keeps the checkers branch-free at the boundary).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "PConstants",
    "psi",
    "psi_reg",
    "pth_power_reg",
    "check_simons",
    "check_taylor",
    "zeta_profile",
    "InequalityReport",
    "ZetaReport",
]

_DEFAULT_SLACK = 1e-12


@dataclass(frozen=True)
class PConstants:
    """kappa_p, kappa'_p and the derived exponents/constants of the form estimates."""

    p: float
    kappa: float
    kappa_prime: float
    alpha: float  # max(1, p/2) - 1
    beta: float  # min(1, p/2) - 1
    c_degenerate: float  # 2^{p(p-2)/2} kappa^{p/2}
    c_singular: float  # 2^{p(p-2)/2} kappa'^{p/2} (= 2^{p beta} kappa'^{beta+1} for p < 2)

    @staticmethod
    def for_p(p: float) -> "PConstants":
        if not p > 1.0:
            raise ValueError(f"p must exceed 1, got {p}")
        if p >= 2.0:
            kappa = p - 1.0
            kappa_prime = min(0.5, 2.0 ** (2.0 - p))
        else:
            kappa = 2.0 ** (2.0 - p) * (3.0 - p)
            kappa_prime = p - 1.0
        # the singular-branch sandwich constant follows the mixed-exponent
        # variant (2^{p beta_p} kappa'^{beta_p+1}); the standalone display's
        # flipped sign on the exponent is a typo — see the decisions ledger
        return PConstants(
            p=p,
            kappa=kappa,
            kappa_prime=kappa_prime,
            alpha=max(1.0, p / 2.0) - 1.0,
            beta=min(1.0, p / 2.0) - 1.0,
            c_degenerate=2.0 ** (p * (p - 2.0) / 2.0) * kappa ** (p / 2.0),
            c_singular=2.0 ** (p * (p - 2.0) / 2.0) * kappa_prime ** (p / 2.0),
        )


def psi(p: float, t):
    """|t|^{p-2} t computed as sign(t) |t|^{p-1}; psi(0) = 0, odd, monotone."""
    t = np.asarray(t, dtype=float)
    out = np.sign(t) * np.power(np.abs(t), p - 1.0)
    return out if out.ndim else float(out)


def psi_reg(p: float, t, delta: float):
    """Regularized psi_delta(t) = t (t^2 + delta^2)^{(p-2)/2}; equals psi at delta=0."""
    t = np.asarray(t, dtype=float)
    if delta == 0.0:
        return psi(p, t)
    out = t * np.power(t * t + delta * delta, (p - 2.0) / 2.0)
    return out if out.ndim else float(out)


def pth_power_reg(p: float, t, delta: float):
    """Antiderivative pair of p*psi_reg: (t^2+delta^2)^{p/2} - delta^p (0 at t=0)."""
    t = np.asarray(t, dtype=float)
    if delta == 0.0:
        out = np.power(np.abs(t), p)
    else:
        out = np.power(t * t + delta * delta, p / 2.0) - delta**p
    return out if out.ndim else float(out)


def _vec_norm(x: np.ndarray) -> float:
    return float(np.linalg.norm(np.atleast_1d(np.asarray(x, dtype=float))))


def _vec_psi(p: float, x: np.ndarray) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r = np.linalg.norm(x)
    if r == 0.0:
        return np.zeros_like(x)
    return r ** (p - 2.0) * x


@dataclass(frozen=True)
class InequalityReport:
    """Margins (nonnegative iff satisfied, up to slack) for an inequality pair."""

    upper_margin: float
    lower_margin: float
    slack: float

    @property
    def satisfied(self) -> bool:
        return self.upper_margin >= -self.slack and self.lower_margin >= -self.slack


def check_simons(p: float, x, y, slack: float = _DEFAULT_SLACK) -> InequalityReport:
    """Margins of the two elementary inequalities for the applicable p-branch.

    Upper controls |psi(x)-psi(y)|, lower controls (psi(x)-psi(y)).(x-y).
    """
    k = PConstants.for_p(p)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise ValueError("x and y must have matching dimension")
    dx = x - y
    ndx = _vec_norm(dx)
    s = _vec_norm(x) + _vec_norm(y)
    lhs_upper = _vec_norm(_vec_psi(p, x) - _vec_psi(p, y))
    lhs_lower = float(np.dot(_vec_psi(p, x) - _vec_psi(p, y), dx))
    if ndx == 0.0:
        return InequalityReport(0.0, 0.0, slack)
    if p >= 2.0:
        rhs_upper = k.kappa * ndx * s ** (p - 2.0)
        rhs_lower = k.kappa_prime * ndx**p
    else:
        rhs_upper = k.kappa * ndx ** (p - 1.0)
        rhs_lower = k.kappa_prime * ndx**2 * (s ** (p - 2.0) if s > 0.0 else 0.0)
    scale = max(abs(lhs_upper), abs(rhs_upper), abs(lhs_lower), abs(rhs_lower), 1.0)
    return InequalityReport(rhs_upper - lhs_upper, lhs_lower - rhs_lower, slack * scale)


def check_taylor(p: float, x, y, slack: float = _DEFAULT_SLACK) -> InequalityReport:
    """Margins of the two-sided Taylor bound on |x+y|^p - |x|^p - p|x|^{p-2} x.y.

    Upper: p kappa_p |y|^{min(p,2)} (|y|+|x|)^{max(p-2,0)}. Lower: the
    constants the line-integral proof actually delivers — kappa'_p |y|^p for
    p >= 2 and (p/2) kappa'_p |y|^2 (2|x|+|y|)^{p-2} for p < 2 (the published
    display overstates the lower constant; see the decisions ledger).
    """
    k = PConstants.for_p(p)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise ValueError("x and y must have matching dimension")
    nx, ny = _vec_norm(x), _vec_norm(y)
    mid = _vec_norm(x + y) ** p - nx**p - p * float(np.dot(_vec_psi(p, x), y))
    if ny == 0.0:
        return InequalityReport(0.0, 0.0, slack)
    rhs_upper = p * k.kappa * ny ** min(p, 2.0) * ((nx + ny) ** max(p - 2.0, 0.0))
    if p >= 2.0:
        rhs_lower = k.kappa_prime * ny**p
    else:
        rhs_lower = 0.5 * p * k.kappa_prime * ny**2 * (2.0 * nx + ny) ** (p - 2.0)
    scale = max(abs(mid), abs(rhs_upper), abs(rhs_lower), 1.0)
    return InequalityReport(rhs_upper - mid, mid - rhs_lower, slack * scale)


def _binom(p: float, k: int) -> float:
    # Gamma(p+1) / (k! Gamma(p-k+1)); p-k+1 >= 1 whenever k <= floor(p)
    return math.exp(gammaln(p + 1.0) - gammaln(k + 1.0) - gammaln(p - k + 1.0))


@dataclass(frozen=True)
class ZetaReport:
    """Tabulated Taylor-remainder profile zeta(t) with plausibility verdicts."""

    p: float
    t: np.ndarray
    zeta: np.ndarray
    bound: float
    small_t_value: float  # zeta at the smallest |t| sampled
    large_t_value: float  # zeta at the largest positive t sampled
    integer_p: bool

    @property
    def large_t_target(self) -> float:
        # along t -> +infinity: 1 for fractional p, 0 for integer p
        return 0.0 if self.integer_p else 1.0


def zeta_profile(p: float, t_samples) -> ZetaReport:
    """zeta(t) = (|1+t|^p - sum_{k<=floor(p)} C(p,k) t^k) / |t|^p over the samples.

    Bounded with zeta -> 0 as t -> 0 and zeta -> 1 as |t| -> inf for
    non-integer p. For integer p the remainder vanishes identically on
    t > -1; on the negative branch odd p gives zeta -> 2, so only the
    positive-branch limit is meaningful there.
    """
    if p <= 1.0:
        raise ValueError(f"p must exceed 1, got {p}")
    t = np.asarray(t_samples, dtype=float)
    if np.any(t == 0.0):
        raise ValueError("t samples must avoid 0")
    m = int(math.floor(p))
    partial = sum(_binom(p, k) * t**k for k in range(m + 1))
    zeta = (np.abs(1.0 + t) ** p - partial) / np.abs(t) ** p
    pos = t > 0
    i_small = int(np.argmin(np.abs(t)))
    i_large = int(np.argmax(np.where(pos, t, -np.inf))) if np.any(pos) else i_small
    return ZetaReport(
        p=p,
        t=t,
        zeta=zeta,
        bound=float(np.max(np.abs(zeta))),
        small_t_value=float(zeta[i_small]),
        large_t_value=float(zeta[i_large]),
        integer_p=(abs(p - round(p)) < 1e-12),
    )
