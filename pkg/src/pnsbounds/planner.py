"""Minimal sample sizes for a target margin of error on the PNS bounds."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

from .ci import ConfidenceSpec, theorem_margin, worst_case_term_margin

FULL_BOUNDS = "full-bounds"
K_TERM = "k-term"
SINGLE_TERM = "single-term"


@dataclass(frozen=True)
class SamplePlan:
    m: int
    n: int
    alpha: float
    epsilon: float
    kind: str
    k: int = 4
    z: float = 0.0
    achieved_margin: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def _check_domain(alpha: float, epsilon: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")


def _conf(alpha: float, conf: ConfidenceSpec | None) -> ConfidenceSpec:
    if conf is None:
        return ConfidenceSpec.from_alpha(alpha)
    if conf.alpha != alpha:
        raise ValueError(f"confidence spec alpha {conf.alpha!r} != {alpha!r}")
    return conf


def _minimal(guess: float, margin: Callable[[int], float], epsilon: float) -> int:
    # The closed form can land one off when the exact root is near an integer;
    # settle on the true minimum by checking the margin itself.
    size = max(1, math.ceil(guess))
    while margin(size) > epsilon:
        size += 1
    while size > 1 and margin(size - 1) <= epsilon:
        size -= 1
    return size


def k_term_margin(k: int, count: int, conf: ConfidenceSpec) -> float:
    """Worst-case margin of a sum of k Bernoulli proportions from one pool."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k!r}")
    return k * worst_case_term_margin(count, conf)


def plan_equal(alpha: float, epsilon: float, conf: ConfidenceSpec | None = None) -> SamplePlan:
    """Equal experimental/observational sizes so every bound arm is within epsilon."""
    _check_domain(alpha, epsilon)
    conf = _conf(alpha, conf)
    size = _minimal((2.0 * conf.z / epsilon) ** 2, lambda s: theorem_margin(s, s, conf), epsilon)
    return SamplePlan(
        m=size,
        n=size,
        alpha=alpha,
        epsilon=epsilon,
        kind=FULL_BOUNDS,
        k=4,
        z=conf.z,
        achieved_margin=theorem_margin(size, size, conf),
    )


@dataclass(frozen=True)
class SizeConstraint:
    """Adequacy region sqrt(1/m) + sqrt(1/n) <= threshold."""

    alpha: float
    epsilon: float
    z: float
    threshold: float

    def is_adequate(self, m: int, n: int) -> bool:
        return math.sqrt(1.0 / m) + math.sqrt(1.0 / n) <= self.threshold

    def min_n(self, m: int) -> int:
        """Smallest n that is adequate alongside a fixed m."""
        slack = self.threshold - math.sqrt(1.0 / m)
        if slack <= 0.0:
            raise ValueError(f"m={m} alone exhausts the margin budget; no n is adequate")
        n = max(1, math.ceil(1.0 / slack**2))
        while not self.is_adequate(m, n):
            n += 1
        while n > 1 and self.is_adequate(m, n - 1):
            n -= 1
        return n

    def to_dict(self) -> dict:
        return asdict(self)


def plan_constraint(alpha: float, epsilon: float, conf: ConfidenceSpec | None = None) -> SizeConstraint:
    _check_domain(alpha, epsilon)
    conf = _conf(alpha, conf)
    return SizeConstraint(alpha=alpha, epsilon=epsilon, z=conf.z, threshold=epsilon / conf.z)


def plan_k_term(k: int, alpha: float, epsilon: float, conf: ConfidenceSpec | None = None) -> SamplePlan:
    """Size for an expression of k worst-case terms sharing one sample pool.

    k=1 covers a single distribution such as P(y_x); k=2 a difference such as
    P(y_x) - P(y_{x'}). With k=4 split evenly across the two pools and m=n
    this coincides with :func:`plan_equal`.
    """
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    _check_domain(alpha, epsilon)
    conf = _conf(alpha, conf)
    size = _minimal((k * conf.z / (2.0 * epsilon)) ** 2, lambda s: k_term_margin(k, s, conf), epsilon)
    return SamplePlan(
        m=size,
        n=size,
        alpha=alpha,
        epsilon=epsilon,
        kind=SINGLE_TERM if k == 1 else K_TERM,
        k=k,
        z=conf.z,
        achieved_margin=k_term_margin(k, size, conf),
    )
