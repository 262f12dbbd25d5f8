"""Exit criteria for the package, one test per criterion.

Each test prints a single ``[criterion k] PASS|FAIL`` line before asserting.
Tolerances are fixed here and are not tuned after the fact.
"""

import numpy as np
import pytest

from pnsbounds.bounds import ExperimentalDist, ObservationalDist, pns_bounds
from pnsbounds.ci import ConfidenceSpec, arm_margins, theorem_margin
from pnsbounds.experiment import error_sweep, replications_to_csv, wald_coverage
from pnsbounds.oracle import informer
from pnsbounds.planner import k_term_margin, plan_equal, plan_k_term
from pnsbounds.sampler import draw_experimental, draw_observational, estimate
from pnsbounds.scm import generate_model

CONF = ConfidenceSpec.from_alpha(0.05)
GRID = (385, 1537, 6147)
REPS = 1000
SWEEP_SEED = 7
CONVERGENCE_SEED = 101
CONVERGENCE_SIZE = 10**6


@pytest.fixture
def report(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {k}] {'PASS' if ok else 'FAIL'}: {detail}")

    return emit


def _convergence_csv(model):
    est = estimate(
        draw_experimental(model, CONVERGENCE_SIZE, CONVERGENCE_SEED),
        draw_observational(model, CONVERGENCE_SIZE, CONVERGENCE_SEED + 1),
    )
    values = [est.exp_hat.p_y_do_x, est.exp_hat.p_y_do_xprime, *est.obs_hat.to_dict().values()]
    header = "p_y_do_x,p_y_do_xprime,p_xy,p_xy_prime,p_xprime_y,p_xprime_yprime"
    return values, header + "\n" + ",".join(repr(v) for v in values) + "\n"


@pytest.fixture(scope="module")
def sweeps(model1, model2, truth1, truth2):
    return {
        "model1": error_sweep(model1, GRID, REPS, SWEEP_SEED, truth=truth1),
        "model2": error_sweep(model2, GRID, REPS, SWEEP_SEED, truth=truth2),
    }


def test_criterion_1_planner_anchors(report):
    plans = {
        "equal": (plan_equal(0.05, 0.05), lambda s: theorem_margin(s, s, CONF), 6147),
        "k=1": (plan_k_term(1, 0.05, 0.05), lambda s: k_term_margin(1, s, CONF), 385),
        "k=2": (plan_k_term(2, 0.05, 0.05), lambda s: k_term_margin(2, s, CONF), 1537),
    }
    ok = all(
        plan.m == expected and margin(plan.m) <= 0.05 < margin(plan.m - 1)
        for plan, margin, expected in plans.values()
    )
    report(1, ok, ", ".join(f"{k}: {p.m}" for k, (p, _, _) in plans.items()))
    assert ok


def test_criterion_2_theorem_dominance(report):
    rng = np.random.default_rng(2)
    worst_slack = -np.inf
    for _ in range(10_000):
        p = rng.random(6)
        p[rng.random(6) < 0.05] = rng.choice([0.0, 0.5, 1.0])
        cells = p[2:] / p[2:].sum() if p[2:].sum() > 0 else np.array([1.0, 0, 0, 0])
        m, n = (int(v) for v in rng.integers(1, 10**6, size=2))
        r = arm_margins(ExperimentalDist(p[0], p[1]), ObservationalDist(*cells), m, n, CONF)
        worst = max(r.per_arm_margins_lower + r.per_arm_margins_upper)
        worst_slack = max(worst_slack, worst - theorem_margin(m, n, CONF))
    ok = worst_slack <= 1e-12
    report(2, ok, f"max(per-arm margin - theorem margin) = {worst_slack:.3e} over 10^4 configs")
    assert ok


def test_criterion_3_oracle_validity(report, truth1, truth2):
    truths = [truth1, truth2] + [informer(generate_model(seed)) for seed in range(100)]
    bad = []
    for i, t in enumerate(truths):
        b = pns_bounds(t.exp, t.obs)
        total = t.obs.p_xy + t.obs.p_xy_prime + t.obs.p_xprime_y + t.obs.p_xprime_yprime
        if not (b.lower - 1e-9 <= t.true_pns <= b.upper + 1e-9 and abs(total - 1.0) <= 1e-9):
            bad.append(i)
    report(3, not bad, f"{len(truths) - len(bad)}/{len(truths)} models valid")
    assert not bad


def test_criterion_4_oracle_sampler_agreement(report, model1, model2, truth1, truth2):
    gaps = {}
    for name, model, truth in (("model1", model1, truth1), ("model2", model2, truth2)):
        values, _ = _convergence_csv(model)
        exact = [truth.exp.p_y_do_x, truth.exp.p_y_do_xprime, *truth.obs.to_dict().values()]
        gaps[name] = float(np.max(np.abs(np.array(values) - exact)))
    ok = all(g <= 0.003 for g in gaps.values())
    report(4, ok, ", ".join(f"{k} max gap {v:.5f}" for k, v in gaps.items()) + " (tol 0.003)")
    assert ok


def test_criterion_5_error_decay(report, sweeps):
    details, ok = [], True
    for name, rep in sweeps.items():
        rows = [rep.row(s) for s in GRID]
        for attr in ("mean_err_lower", "mean_err_upper"):
            vals = [getattr(r, attr) for r in rows]
            ok &= all(later < earlier + 1e-3 for earlier, later in zip(vals, vals[1:]))
            ok &= vals[-1] < vals[0]
            ok &= all(v < 0.05 for v in vals)
            details.append(f"{name} {attr[9:]}: " + " > ".join(f"{v:.4f}" for v in vals))
        ok &= all(r.failed_reps == 0 for r in rows)
    report(5, ok, "; ".join(details))
    assert ok


def test_criterion_6_theorem_conformance(report, sweeps):
    details, ok = [], True
    for name, rep in sweeps.items():
        run = rep.runs[GRID.index(6147)]
        within = sum(r.max_err <= 0.05 for r in run.results) / len(run.results)
        contains = sum(r.contains_true_pns for r in run.results) / len(run.results)
        ok &= len(run.results) == REPS and within >= 0.95 and contains >= 0.99
        details.append(f"{name}: within 0.05 {within:.3f}, contains PNS {contains:.3f}")
    report(6, ok, "; ".join(details))
    assert ok


def test_criterion_7_determinism(report, model1, model2, truth1, truth2, sweeps):
    same = True
    for name, model, truth in (("model1", model1, truth1), ("model2", model2, truth2)):
        same &= _convergence_csv(model)[1] == _convergence_csv(model)[1]
        again = error_sweep(model, GRID, REPS, SWEEP_SEED, truth=truth)
        same &= again.sweep_csv() == sweeps[name].sweep_csv()
        same &= again.replications_csv() == sweeps[name].replications_csv()
        full = sweeps[name].runs[GRID.index(6147)].results
        same &= replications_to_csv(again.runs[GRID.index(6147)].results) == replications_to_csv(full)
    report(7, same, "criteria 4-6 CSV outputs byte-identical on rerun" if same else "CSV outputs differ")
    assert same


def test_criterion_8_wald_coverage(report, model1, model2, truth1, truth2):
    cov = {
        "model1": wald_coverage(model1, 1537, REPS, 8, CONF, truth=truth1),
        "model2": wald_coverage(model2, 1537, REPS, 8, CONF, truth=truth2),
    }
    ok = all(c >= 0.93 for c in cov.values())
    report(8, ok, ", ".join(f"{k} coverage {v:.3f}" for k, v in cov.items()) + " (need >= 0.93)")
    assert ok
