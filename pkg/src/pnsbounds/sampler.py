"""Finite experimental and observational samples from an SCM, and the
frequency estimators built on them.

Randomness: every batch owns a PCG64 stream seeded through
``numpy.random.SeedSequence(seed)``. Draws are made in fixed blocks of
``BLOCK`` units; within a block the order is u_z (block x 20 uniforms,
row-major), u_x, u_y, then, for experimental batches only, the treatment
coin. A bit is 1 when its uniform falls below the Bernoulli parameter.
Derived seeds (replication i of a study, etc.) come from
:func:`derive_seed`, so results never depend on execution order.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bounds import ExperimentalDist, ObservationalDist
from .scm import N_CONFOUNDERS, ScmModel, confounder_tables, f_x_array, f_y_array

EXPERIMENTAL = "experimental"
OBSERVATIONAL = "observational"
BLOCK = 1 << 16
_Z_WEIGHTS = (1 << np.arange(N_CONFOUNDERS)).astype(np.int64)


class EmptyArmError(ValueError):
    """An experimental treatment arm has no samples, so P(y_x) or P(y_{x'})
    cannot be estimated."""

    def __init__(self, arm: str):
        super().__init__(f"experimental {arm} arm is empty; cannot estimate its causal effect")
        self.arm = arm


def derive_seed(master_seed: int, *keys: int) -> int:
    """64-bit seed for the substream ``keys`` of ``master_seed``.

    Computed as the first uint64 of ``SeedSequence(master_seed, spawn_key=keys)``.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(keys))
    return int(ss.generate_state(1, np.uint64)[0])


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


@dataclass(frozen=True, eq=False)
class SampleBatch:
    kind: str
    x: np.ndarray
    y: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        if self.kind not in (EXPERIMENTAL, OBSERVATIONAL):
            raise ValueError(f"unknown batch kind {self.kind!r}")
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise ValueError("x and y must be 1-D arrays of equal length")

    def __len__(self) -> int:
        return len(self.x)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SampleBatch):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.seed == other.seed
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
        )

    @property
    def pairs(self) -> np.ndarray:
        return np.column_stack((self.x, self.y))

    def counts(self) -> tuple[int, int, int, int]:
        """Counts of (x, y) = (1,1), (1,0), (0,1), (0,0)."""
        x = self.x.astype(bool)
        y = self.y.astype(bool)
        return (
            int(np.count_nonzero(x & y)),
            int(np.count_nonzero(x & ~y)),
            int(np.count_nonzero(~x & y)),
            int(np.count_nonzero(~x & ~y)),
        )

    @classmethod
    def from_pairs(cls, kind: str, pairs, seed: int = 0) -> SampleBatch:
        arr = np.asarray(pairs, dtype=np.uint8).reshape(-1, 2)
        return cls(kind=kind, x=arr[:, 0].copy(), y=arr[:, 1].copy(), seed=seed)


def _draw(model: ScmModel, size: int, seed: int, kind: str) -> SampleBatch:
    if isinstance(size, bool) or int(size) != size or size < 1:
        raise ValueError(f"sample size must be a positive integer, got {size!r}")
    mx_table, my_table, _ = confounder_tables(model)
    theta_z = np.asarray(model.theta_z)
    rng = _rng(seed)
    xs = np.empty(size, dtype=np.uint8)
    ys = np.empty(size, dtype=np.uint8)
    for start in range(0, size, BLOCK):
        k = min(BLOCK, size - start)
        u_z = rng.random((k, N_CONFOUNDERS)) < theta_z
        u_x = (rng.random(k) < model.theta_x).astype(np.int64)
        u_y = (rng.random(k) < model.theta_y).astype(np.int64)
        z_index = u_z @ _Z_WEIGHTS
        if kind == EXPERIMENTAL:
            x = rng.random(k) < 0.5
        else:
            x = f_x_array(mx_table[z_index], u_x)
        y = f_y_array(model.c, x.astype(np.int64), my_table[z_index], u_y)
        xs[start : start + k] = x
        ys[start : start + k] = y
    return SampleBatch(kind=kind, x=xs, y=ys, seed=seed)


def draw_experimental(model: ScmModel, m: int, seed: int) -> SampleBatch:
    """m units with X assigned by a fair coin and Y = f_Y(X, Z, U_Y)."""
    return _draw(model, m, seed, EXPERIMENTAL)


def draw_observational(model: ScmModel, n: int, seed: int) -> SampleBatch:
    """n units with X = f_X(Z, U_X) and Y = f_Y(X, Z, U_Y)."""
    return _draw(model, n, seed, OBSERVATIONAL)


@dataclass(frozen=True)
class EstimatedDistributions:
    exp_hat: ExperimentalDist
    obs_hat: ObservationalDist
    m: int
    n: int
    n_treated: int

    @property
    def n_control(self) -> int:
        return self.m - self.n_treated


def estimate_from_counts(
    exp_counts: tuple[int, int, int, int], obs_counts: tuple[int, int, int, int]
) -> EstimatedDistributions:
    """Frequency estimates from (x, y) counts ordered (1,1), (1,0), (0,1), (0,0)."""
    for label, counts in (("experimental", exp_counts), ("observational", obs_counts)):
        if len(counts) != 4 or any(int(c) != c or c < 0 for c in counts):
            raise ValueError(f"{label} counts must be four nonnegative integers, got {counts!r}")
    e11, e10, e01, e00 = (int(c) for c in exp_counts)
    o11, o10, o01, o00 = (int(c) for c in obs_counts)
    treated, control = e11 + e10, e01 + e00
    if treated == 0:
        raise EmptyArmError("treated (x=1)")
    if control == 0:
        raise EmptyArmError("control (x=0)")
    n = o11 + o10 + o01 + o00
    if n == 0:
        raise ValueError("observational sample is empty")
    return EstimatedDistributions(
        exp_hat=ExperimentalDist(e11 / treated, e01 / control),
        obs_hat=ObservationalDist(o11 / n, o10 / n, o01 / n, o00 / n),
        m=treated + control,
        n=n,
        n_treated=treated,
    )


def estimate(exp_batch: SampleBatch, obs_batch: SampleBatch) -> EstimatedDistributions:
    """P(y_x) and P(y_{x'}) as within-arm frequencies of y; the observational
    cells as joint frequencies over all n units."""
    if exp_batch.kind != EXPERIMENTAL or obs_batch.kind != OBSERVATIONAL:
        raise ValueError("estimate() takes an experimental batch then an observational batch")
    return estimate_from_counts(exp_batch.counts(), obs_batch.counts())


def write_batch(batch: SampleBatch, path: str | Path) -> Path:
    """Write ``x,y`` CSV rows to ``path`` plus a ``<path>.json`` sidecar."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("x", "y"))
        writer.writerows(zip(batch.x.tolist(), batch.y.tolist()))
    sidecar = path.with_name(path.name + ".json")
    sidecar.write_text(json.dumps({"kind": batch.kind, "seed": batch.seed, "size": len(batch)}) + "\n")
    return sidecar


def read_batch(path: str | Path) -> SampleBatch:
    path = Path(path)
    meta = json.loads(path.with_name(path.name + ".json").read_text())
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        if next(reader) != ["x", "y"]:
            raise ValueError(f"{path}: expected header x,y")
        pairs = [(int(x), int(y)) for x, y in reader]
    batch = SampleBatch.from_pairs(meta["kind"], pairs, seed=meta["seed"])
    if len(batch) != meta["size"]:
        raise ValueError(f"{path}: sidecar size {meta['size']} != {len(batch)} rows")
    return batch
