"""Tight bounds on the probability of necessity and sufficiency (PNS).

PNS = P(y_x, y'_{x'}) is not identified from data in general, but an
experimental distribution (P(y_x), P(y_{x'})) together with an observational
joint P(X, Y) pins it to an interval whose lower end is the max over four
"arms" and whose upper end is the min over four more.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Slack allowed when deciding whether the raw envelope is inverted. Exact
# distributions with an identified PNS make the two envelopes meet, and the
# arms reach that common value through different float operations.
CONSISTENCY_TOL = 1e-12

LOWER_ARM_NAMES = (
    "zero",
    "p_y_do_x - p_y_do_xprime",
    "p_y - p_y_do_xprime",
    "p_y_do_x - p_y",
)
UPPER_ARM_NAMES = (
    "p_y_do_x",
    "1 - p_y_do_xprime",
    "p_xy + p_xprime_yprime",
    "p_y_do_x - p_y_do_xprime + p_xy_prime + p_xprime_y",
)


class DistributionError(ValueError):
    """An input distribution violates its invariants."""


def _check_prob(name: str, value: float) -> None:
    if not math.isfinite(value) or value < 0.0 or value > 1.0:
        raise DistributionError(f"{name}={value!r} is not a probability in [0, 1]")


def _clamp(value: float) -> float:
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class ExperimentalDist:
    """Causal effects P(y_x) and P(y_{x'})."""

    p_y_do_x: float
    p_y_do_xprime: float

    def __post_init__(self) -> None:
        _check_prob("p_y_do_x", self.p_y_do_x)
        _check_prob("p_y_do_xprime", self.p_y_do_xprime)

    def relabeled(self) -> ExperimentalDist:
        """Swap x<->x' and y<->y'."""
        return ExperimentalDist(1.0 - self.p_y_do_xprime, 1.0 - self.p_y_do_x)

    def to_dict(self) -> dict[str, float]:
        return {"p_y_do_x": self.p_y_do_x, "p_y_do_xprime": self.p_y_do_xprime}


@dataclass(frozen=True)
class ObservationalDist:
    """The four cells of the observational joint P(X, Y)."""

    p_xy: float
    p_xy_prime: float
    p_xprime_y: float
    p_xprime_yprime: float

    def __post_init__(self) -> None:
        for name in ("p_xy", "p_xy_prime", "p_xprime_y", "p_xprime_yprime"):
            _check_prob(name, getattr(self, name))
        total = self.p_xy + self.p_xy_prime + self.p_xprime_y + self.p_xprime_yprime
        if abs(total - 1.0) > 1e-9:
            raise DistributionError(f"observational cells sum to {total!r}, not 1")

    @property
    def p_y(self) -> float:
        return self.p_xy + self.p_xprime_y

    def relabeled(self) -> ObservationalDist:
        """Swap x<->x' and y<->y'."""
        return ObservationalDist(
            p_xy=self.p_xprime_yprime,
            p_xy_prime=self.p_xprime_y,
            p_xprime_y=self.p_xy_prime,
            p_xprime_yprime=self.p_xy,
        )

    def to_dict(self) -> dict[str, float]:
        return {
            "p_xy": self.p_xy,
            "p_xy_prime": self.p_xy_prime,
            "p_xprime_y": self.p_xprime_y,
            "p_xprime_yprime": self.p_xprime_yprime,
        }


@dataclass(frozen=True)
class PnsBounds:
    lower: float
    upper: float
    lower_arms: tuple[float, float, float, float]
    upper_arms: tuple[float, float, float, float]
    consistent: bool

    @property
    def raw_lower(self) -> float:
        return max(self.lower_arms)

    @property
    def raw_upper(self) -> float:
        return min(self.upper_arms)

    def contains(self, value: float, tol: float = 1e-12) -> bool:
        return self.lower - tol <= value <= self.upper + tol

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "lower_arms": dict(zip(LOWER_ARM_NAMES, self.lower_arms)),
            "upper_arms": dict(zip(UPPER_ARM_NAMES, self.upper_arms)),
            "consistent": self.consistent,
        }


def lower_arms(exp: ExperimentalDist, obs: ObservationalDist) -> tuple[float, float, float, float]:
    p1, p0, p_y = exp.p_y_do_x, exp.p_y_do_xprime, obs.p_y
    return (0.0, p1 - p0, p_y - p0, p1 - p_y)


def upper_arms(exp: ExperimentalDist, obs: ObservationalDist) -> tuple[float, float, float, float]:
    p1, p0 = exp.p_y_do_x, exp.p_y_do_xprime
    return (
        p1,
        1.0 - p0,
        obs.p_xy + obs.p_xprime_yprime,
        p1 - p0 + obs.p_xy_prime + obs.p_xprime_y,
    )


def pns_bounds(exp: ExperimentalDist, obs: ObservationalDist) -> PnsBounds:
    """Tight PNS bounds from experimental and observational distributions.

    Raw arm values are kept unclamped. When sampling noise pushes the max of
    the lower arms above the min of the upper arms, the result is returned
    with ``consistent=False`` instead of raising.
    """
    lo = lower_arms(exp, obs)
    hi = upper_arms(exp, obs)
    raw_lo, raw_hi = max(lo), min(hi)
    return PnsBounds(
        lower=_clamp(raw_lo),
        upper=_clamp(raw_hi),
        lower_arms=lo,
        upper_arms=hi,
        consistent=raw_lo <= raw_hi + CONSISTENCY_TOL,
    )
