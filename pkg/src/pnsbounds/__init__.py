"""Tight PNS bounds, their confidence margins, sample-size planning and
SCM-based validation."""

from .bounds import ExperimentalDist, ObservationalDist, PnsBounds, pns_bounds
from .ci import ConfidenceSpec, MarginReport, arm_margins, inverse_normal_cdf, theorem_margin, wald_margin
from .planner import SamplePlan, plan_constraint, plan_equal, plan_k_term
from .scm import ScmModel, generate_model, preset
from .oracle import TrueDistributions, informer

__version__ = "0.1.0"
