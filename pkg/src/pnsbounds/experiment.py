"""Monte Carlo replication studies of estimated PNS bounds against exact truth.

Replication ``i`` of a run with master seed ``s`` draws its experimental batch
from ``derive_seed(s, i, 0)`` and its observational batch from
``derive_seed(s, i, 1)``; rows are always folded in replication order.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, field, fields
from pathlib import Path
from typing import Sequence

from .bounds import pns_bounds
from .ci import ConfidenceSpec, wald_margin
from .oracle import TrueDistributions, informer, informer_sparse
from .sampler import EmptyArmError, derive_seed, draw_experimental, draw_observational, estimate
from .scm import ScmModel

CONTAIN_TOL = 1e-12


@dataclass(frozen=True)
class ReplicationResult:
    rep: int
    m: int
    n: int
    est_lower: float
    est_upper: float
    true_lower: float
    true_upper: float
    err_lower: float
    err_upper: float
    consistent: bool
    contains_true_pns: bool

    @property
    def max_err(self) -> float:
        return max(self.err_lower, self.err_upper)


REPLICATION_COLUMNS = tuple(f.name for f in fields(ReplicationResult))


@dataclass(frozen=True)
class ReplicationSet:
    """Successful replications plus the indices of those that could not be
    estimated (an empty experimental arm)."""

    m: int
    n: int
    results: list[ReplicationResult]
    failed: list[int] = field(default_factory=list)

    def __iter__(self):
        return iter(self.results)

    def __len__(self) -> int:
        return len(self.results)


def _one(model: ScmModel, truth: TrueDistributions, m: int, n: int, master_seed: int, rep: int):
    exp_batch = draw_experimental(model, m, derive_seed(master_seed, rep, 0))
    obs_batch = draw_observational(model, n, derive_seed(master_seed, rep, 1))
    try:
        est = estimate(exp_batch, obs_batch)
    except EmptyArmError:
        return None
    b = pns_bounds(est.exp_hat, est.obs_hat)
    tb = truth.bounds
    return ReplicationResult(
        rep=rep,
        m=m,
        n=n,
        est_lower=b.lower,
        est_upper=b.upper,
        true_lower=tb.lower,
        true_upper=tb.upper,
        err_lower=abs(b.lower - tb.lower),
        err_upper=abs(b.upper - tb.upper),
        consistent=b.consistent,
        contains_true_pns=b.lower - CONTAIN_TOL <= truth.true_pns <= b.upper + CONTAIN_TOL,
    )


def run_replications(
    model: ScmModel,
    m: int,
    n: int,
    reps: int,
    master_seed: int,
    truth: TrueDistributions | None = None,
    workers: int = 1,
) -> ReplicationSet:
    """Estimate PNS bounds ``reps`` times from fresh samples of sizes (m, n)."""
    if reps < 1:
        raise ValueError(f"reps must be positive, got {reps!r}")
    if truth is None:
        truth = informer(model, workers=workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda i: _one(model, truth, m, n, master_seed, i), range(reps)))
    else:
        outcomes = [_one(model, truth, m, n, master_seed, i) for i in range(reps)]
    results = [r for r in outcomes if r is not None]
    failed = [i for i, r in enumerate(outcomes) if r is None]
    return ReplicationSet(m=m, n=n, results=results, failed=failed)


@dataclass(frozen=True)
class SweepRow:
    size: int
    reps: int
    mean_err_lower: float
    mean_err_upper: float
    frac_contains: float
    frac_consistent: float
    failed_reps: int


SWEEP_COLUMNS = tuple(f.name for f in fields(SweepRow))


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values) if values else math.nan


def aggregate(size: int, reps: int, results: Sequence[ReplicationResult], failed_reps: int) -> SweepRow:
    return SweepRow(
        size=size,
        reps=reps,
        mean_err_lower=_mean([r.err_lower for r in results]),
        mean_err_upper=_mean([r.err_upper for r in results]),
        frac_contains=_mean([float(r.contains_true_pns) for r in results]),
        frac_consistent=_mean([float(r.consistent) for r in results]),
        failed_reps=failed_reps,
    )


@dataclass(frozen=True)
class ExperimentReport:
    model_name: str
    sizes: list[tuple[int, int]]
    reps: int
    master_seed: int
    rows: list[SweepRow]
    runs: list[ReplicationSet]

    def row(self, size: int) -> SweepRow:
        for r in self.rows:
            if r.size == size:
                return r
        raise KeyError(size)

    def replications_csv(self) -> str:
        return replications_to_csv([r for run in self.runs for r in run.results])

    def sweep_csv(self) -> str:
        return _to_csv(SWEEP_COLUMNS, [astuple(r) for r in self.rows])

    def write(self, out_dir: str | Path, prefix: str | None = None) -> tuple[Path, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        prefix = prefix or self.model_name
        rep_path = out_dir / f"{prefix}_replications.csv"
        sweep_path = out_dir / f"{prefix}_sweep.csv"
        rep_path.write_text(self.replications_csv())
        sweep_path.write_text(self.sweep_csv())
        return rep_path, sweep_path


def error_sweep(
    model: ScmModel,
    size_grid: Sequence[int],
    reps: int,
    master_seed: int,
    truth: TrueDistributions | None = None,
    workers: int = 1,
) -> ExperimentReport:
    """Average bound error at each grid size, with m = n = size."""
    if not size_grid:
        raise ValueError("size grid is empty")
    if truth is None:
        truth = informer(model, workers=workers)
    runs = [run_replications(model, s, s, reps, master_seed, truth=truth, workers=workers) for s in size_grid]
    rows = [aggregate(s, reps, run.results, len(run.failed)) for s, run in zip(size_grid, runs)]
    return ExperimentReport(
        model_name=model.name,
        sizes=[(s, s) for s in size_grid],
        reps=reps,
        master_seed=master_seed,
        rows=rows,
        runs=runs,
    )


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _to_csv(columns: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def replications_to_csv(results: Sequence[ReplicationResult]) -> str:
    return _to_csv(REPLICATION_COLUMNS, [astuple(r) for r in results])


def replications_from_csv(text: str) -> list[ReplicationResult]:
    reader = csv.DictReader(io.StringIO(text))
    out = []
    for row in reader:
        out.append(
            ReplicationResult(
                rep=int(row["rep"]),
                m=int(row["m"]),
                n=int(row["n"]),
                est_lower=float(row["est_lower"]),
                est_upper=float(row["est_upper"]),
                true_lower=float(row["true_lower"]),
                true_upper=float(row["true_upper"]),
                err_lower=float(row["err_lower"]),
                err_upper=float(row["err_upper"]),
                consistent=row["consistent"] == "1",
                contains_true_pns=row["contains_true_pns"] == "1",
            )
        )
    return out


def sweep_from_csv(text: str) -> list[SweepRow]:
    reader = csv.DictReader(io.StringIO(text))
    return [
        SweepRow(
            size=int(r["size"]),
            reps=int(r["reps"]),
            mean_err_lower=float(r["mean_err_lower"]),
            mean_err_upper=float(r["mean_err_upper"]),
            frac_contains=float(r["frac_contains"]),
            frac_consistent=float(r["frac_consistent"]),
            failed_reps=int(r["failed_reps"]),
        )
        for r in reader
    ]


def verify_report(replications_csv: str, sweep_csv: str) -> bool:
    """Recompute the sweep rows from the per-replication rows."""
    reps = replications_from_csv(replications_csv)
    for row in sweep_from_csv(sweep_csv):
        rows = [r for r in reps if r.m == row.size and r.n == row.size]
        if aggregate(row.size, row.reps, rows, row.reps - len(rows)) != row:
            # NaN aggregates never compare equal; treat all-failed rows separately
            if rows or row.failed_reps != row.reps:
                return False
    return True


def wald_coverage(
    model: ScmModel,
    m: int,
    reps: int,
    master_seed: int,
    conf: ConfidenceSpec,
    truth: TrueDistributions | None = None,
) -> float:
    """Fraction of replications whose Wald interval for P(y_x) covers the truth.

    The interval width uses the treated-arm count, the denominator of the
    within-arm estimator.
    """
    if truth is None:
        truth = informer_sparse(model, {"exp"})
    target = truth.exp.p_y_do_x
    hits = 0
    total = 0
    for i in range(reps):
        batch = draw_experimental(model, m, derive_seed(master_seed, i, 0))
        n11, n10, _, _ = batch.counts()
        treated = n11 + n10
        if treated == 0:
            continue
        p_hat = n11 / treated
        total += 1
        hits += abs(p_hat - target) <= wald_margin(p_hat, treated, conf)
    return hits / total if total else math.nan

