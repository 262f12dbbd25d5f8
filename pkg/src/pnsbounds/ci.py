"""Wald margins of error and their propagation through the PNS bound arms."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bounds import ExperimentalDist, ObservationalDist

# Acklam's rational approximation to the standard normal quantile
# (relative error < 1.15e-9 before refinement).
_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)
_P_LOW = 0.02425
_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


class CountError(ValueError):
    """A sample count is not a positive integer."""


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / _SQRT2)


def _acklam(q: float) -> float:
    if q < _P_LOW:
        t = math.sqrt(-2.0 * math.log(q))
        num = ((((_C[0] * t + _C[1]) * t + _C[2]) * t + _C[3]) * t + _C[4]) * t + _C[5]
        den = (((_D[0] * t + _D[1]) * t + _D[2]) * t + _D[3]) * t + 1.0
        return num / den
    if q > 1.0 - _P_LOW:
        t = math.sqrt(-2.0 * math.log1p(-q))
        num = ((((_C[0] * t + _C[1]) * t + _C[2]) * t + _C[3]) * t + _C[4]) * t + _C[5]
        den = (((_D[0] * t + _D[1]) * t + _D[2]) * t + _D[3]) * t + 1.0
        return -num / den
    s = q - 0.5
    r = s * s
    num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * s
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    return num / den


def inverse_normal_cdf(q: float) -> float:
    """Standard normal quantile.

    Acklam's rational approximation followed by one Newton step on
    ``Phi(z) - q``.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {q!r}")
    if q == 0.5:
        return 0.0
    z = _acklam(q)
    density = math.exp(-0.5 * z * z) / _SQRT2PI
    return z - (normal_cdf(z) - q) / density


@dataclass(frozen=True)
class ConfidenceSpec:
    """Significance level and the matching two-sided normal critical value.

    ``rounded=True`` uses the two-decimal z-table value (1.96 at alpha=0.05).
    """

    alpha: float
    z: float
    rounded: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not self.z > 0.0:
            raise ValueError(f"z must be positive, got {self.z!r}")
        exact = inverse_normal_cdf(1.0 - self.alpha / 2.0)
        expected = round(exact, 2) if self.rounded else exact
        if abs(self.z - expected) > 1e-7:
            raise ValueError(f"z={self.z!r} does not match alpha={self.alpha!r} (expected {expected!r})")

    @classmethod
    def from_alpha(cls, alpha: float, rounded: bool = False) -> ConfidenceSpec:
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
        z = inverse_normal_cdf(1.0 - alpha / 2.0)
        return cls(alpha=alpha, z=round(z, 2) if rounded else z, rounded=rounded)


def _check_count(count: int) -> None:
    if isinstance(count, bool) or int(count) != count or count < 1:
        raise CountError(f"sample count must be a positive integer, got {count!r}")


def wald_margin(p_hat: float, count: int, conf: ConfidenceSpec) -> float:
    """z * sqrt(p_hat (1 - p_hat) / count)."""
    _check_count(count)
    if not 0.0 <= p_hat <= 1.0:
        raise ValueError(f"p_hat={p_hat!r} is not a probability")
    return conf.z * math.sqrt(p_hat * (1.0 - p_hat) / count)


def worst_case_term_margin(count: int, conf: ConfidenceSpec) -> float:
    """Supremum of :func:`wald_margin` over p_hat, attained at 1/2."""
    _check_count(count)
    return conf.z / 2.0 * math.sqrt(1.0 / count)


def theorem_margin(m: int, n: int, conf: ConfidenceSpec) -> float:
    """Worst-case margin of every PNS bound arm with m experimental and n
    observational samples: z (sqrt(1/m) + sqrt(1/n))."""
    _check_count(m)
    _check_count(n)
    return conf.z * (math.sqrt(1.0 / m) + math.sqrt(1.0 / n))


@dataclass(frozen=True)
class MarginReport:
    per_arm_margins_lower: tuple[float, float, float, float]
    per_arm_margins_upper: tuple[float, float, float, float]
    worst_case_margin: float
    m: int
    n: int

    def to_dict(self) -> dict:
        return {
            "per_arm_margins_lower": list(self.per_arm_margins_lower),
            "per_arm_margins_upper": list(self.per_arm_margins_upper),
            "worst_case_margin": self.worst_case_margin,
            "m": self.m,
            "n": self.n,
        }


def arm_margins(
    exp_hat: ExperimentalDist,
    obs_hat: ObservationalDist,
    m: int,
    n: int,
    conf: ConfidenceSpec,
) -> MarginReport:
    """Per-arm margins: each arm's margin is the sum of its terms' Wald margins.

    Experimental terms use count ``m``; observational terms, including the
    marginal P(y) taken as one proportion, use count ``n``.
    """
    e1 = wald_margin(exp_hat.p_y_do_x, m, conf)
    e0 = wald_margin(exp_hat.p_y_do_xprime, m, conf)
    o_y = wald_margin(min(1.0, obs_hat.p_y), n, conf)
    o_xy = wald_margin(obs_hat.p_xy, n, conf)
    o_xyp = wald_margin(obs_hat.p_xy_prime, n, conf)
    o_xpy = wald_margin(obs_hat.p_xprime_y, n, conf)
    o_xpyp = wald_margin(obs_hat.p_xprime_yprime, n, conf)
    lower = (0.0, e1 + e0, o_y + e0, e1 + o_y)
    # 1 - P(y_{x'}) has the same Wald margin as P(y_{x'})
    upper = (e1, e0, o_xy + o_xpyp, e1 + e0 + o_xyp + o_xpy)
    return MarginReport(
        per_arm_margins_lower=lower,
        per_arm_margins_upper=upper,
        worst_case_margin=theorem_margin(m, n, conf),
        m=m,
        n=n,
    )
