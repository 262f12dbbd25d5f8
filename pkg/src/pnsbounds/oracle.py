"""Exact distributions of an SCM by exhaustive enumeration of its exogenous states.

Every one of the 2^22 states (u_z in the low 20 bits of a counter, then u_x,
then u_y) is visited and its probability weight accumulated into whichever
experimental, observational and PNS events it realises. Partial sums are kept
per chunk of 2^20 consecutive states in extended precision and reduced in
chunk order, so the result does not depend on the number of workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .bounds import ExperimentalDist, ObservationalDist, PnsBounds, pns_bounds
from .scm import N_CONFOUNDERS, ScmModel, confounder_tables, f_x_array, f_y_array

FIELDS = ("exp", "obs", "true_pns")

# accumulator order inside a chunk's partial-sum vector
_ACC = (
    "p_y_do_x",
    "p_y_do_xprime",
    "p_xy",
    "p_xy_prime",
    "p_xprime_y",
    "p_xprime_yprime",
    "true_pns",
    "p_y",
    "total",
)
_NEEDS = {
    "exp": ("p_y_do_x", "p_y_do_xprime"),
    "obs": ("p_xy", "p_xy_prime", "p_xprime_y", "p_xprime_yprime", "p_y", "total"),
    "true_pns": ("true_pns",),
}


@dataclass(frozen=True)
class TrueDistributions:
    exp: ExperimentalDist | None
    obs: ObservationalDist | None
    true_pns: float | None
    # P(Y=1) enumerated directly, and total enumerated mass; kept for checks
    p_y: float | None = None
    total_mass: float | None = None

    @property
    def bounds(self) -> PnsBounds:
        if self.exp is None or self.obs is None:
            raise ValueError("bounds need both the experimental and observational parts")
        return pns_bounds(self.exp, self.obs)

    def to_dict(self) -> dict:
        doc: dict = {}
        if self.exp is not None:
            doc["exp"] = self.exp.to_dict()
        if self.obs is not None:
            doc["obs"] = self.obs.to_dict()
        if self.true_pns is not None:
            doc["true_pns"] = self.true_pns
        if self.exp is not None and self.obs is not None:
            b = self.bounds
            doc["bounds"] = {"lower": b.lower, "upper": b.upper}
        return doc


def _chunk_sums(model: ScmModel, chunk: int, wanted: frozenset[str]) -> np.ndarray:
    u_x = chunk & 1
    u_y = (chunk >> 1) & 1
    mx, my, wz = confounder_tables(model)
    w = wz * ((model.theta_x if u_x else 1.0 - model.theta_x) * (model.theta_y if u_y else 1.0 - model.theta_y))
    out = np.zeros(len(_ACC), dtype=np.longdouble)

    def acc(name: str, mask: np.ndarray | None) -> None:
        if name in wanted:
            if mask is None:
                out[_ACC.index(name)] = np.sum(w, dtype=np.longdouble)
            else:
                out[_ACC.index(name)] = np.sum(w, where=mask, dtype=np.longdouble)

    y1 = f_y_array(model.c, 1, my, u_y)
    y0 = f_y_array(model.c, 0, my, u_y)
    acc("p_y_do_x", y1)
    acc("p_y_do_xprime", y0)
    acc("true_pns", y1 & ~y0)
    if wanted & set(_NEEDS["obs"]):
        x = f_x_array(mx, u_x)
        y = np.where(x, y1, y0)
        acc("p_xy", x & y)
        acc("p_xy_prime", x & ~y)
        acc("p_xprime_y", ~x & y)
        acc("p_xprime_yprime", ~x & ~y)
        acc("p_y", y)
        acc("total", None)
    return out


def _enumerate(model: ScmModel, wanted: frozenset[str], workers: int) -> dict[str, float]:
    chunks = range(4)  # (u_x, u_y) = (0,0), (1,0), (0,1), (1,1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=min(workers, 4)) as pool:
            partials = list(pool.map(lambda c: _chunk_sums(model, c, wanted), chunks))
    else:
        partials = [_chunk_sums(model, c, wanted) for c in chunks]
    total = np.zeros(len(_ACC), dtype=np.longdouble)
    for p in partials:
        total += p
    return {name: float(total[i]) for i, name in enumerate(_ACC)}


def informer_sparse(model: ScmModel, restrict: Iterable[str] | None = None, workers: int = 1) -> TrueDistributions:
    """Like :func:`informer` but only accumulates the requested parts
    (any of ``"exp"``, ``"obs"``, ``"true_pns"``)."""
    fields = set(FIELDS if restrict is None else restrict)
    unknown = fields - set(FIELDS)
    if unknown:
        raise ValueError(f"unknown fields {sorted(unknown)}; choose from {FIELDS}")
    wanted = frozenset(name for f in fields for name in _NEEDS[f])
    sums = _enumerate(model, wanted, workers)
    exp = obs = None
    if "exp" in fields:
        exp = ExperimentalDist(_unit(sums["p_y_do_x"]), _unit(sums["p_y_do_xprime"]))
    if "obs" in fields:
        obs = ObservationalDist(
            _unit(sums["p_xy"]),
            _unit(sums["p_xy_prime"]),
            _unit(sums["p_xprime_y"]),
            _unit(sums["p_xprime_yprime"]),
        )
    return TrueDistributions(
        exp=exp,
        obs=obs,
        true_pns=_unit(sums["true_pns"]) if "true_pns" in fields else None,
        p_y=sums["p_y"] if "obs" in fields else None,
        total_mass=sums["total"] if "obs" in fields else None,
    )


def _unit(v: float) -> float:
    # extended-precision sums of weights in [0, 1] can overshoot by an ulp
    return min(1.0, max(0.0, v))


def informer(model: ScmModel, workers: int = 1) -> TrueDistributions:
    """Exact P(y_x), P(y_{x'}), the four observational cells and the true PNS."""
    return informer_sparse(model, None, workers)


assert N_CONFOUNDERS == 20  # chunk layout assumes a 20-bit confounder counter
