"""Print required sample sizes for a few confidence levels and margins."""

from pnsbounds.ci import ConfidenceSpec
from pnsbounds.planner import plan_equal, plan_k_term

ALPHAS = (0.10, 0.05, 0.01)
EPSILONS = (0.10, 0.05, 0.02, 0.01)

print(f"{'alpha':>6} {'eps':>6} {'z':>8} {'1-term':>8} {'2-term':>8} {'full':>8}")
for alpha in ALPHAS:
    conf = ConfidenceSpec.from_alpha(alpha)
    for eps in EPSILONS:
        one = plan_k_term(1, alpha, eps, conf).m
        two = plan_k_term(2, alpha, eps, conf).m
        full = plan_equal(alpha, eps, conf).m
        print(f"{alpha:>6} {eps:>6} {conf.z:>8.4f} {one:>8} {two:>8} {full:>8}")
