"""
Exhaustive maximum-likelihood detection, the reference every exact search is checked against.
"""

import numpy as np

from src.lattice_model import PSV, DetectionProblem, all_goal_symbols, goal_costs
from .stats import SearchOutcome, VisitStats


def brute_force_ml(p: DetectionProblem) -> SearchOutcome:
    """argmin of g over all |A|^m goals; ties go to the lexicographically smallest symbols."""
    candidates = all_goal_symbols(p)
    costs = goal_costs(p, candidates)
    best = int(np.argmin(costs))
    stats = VisitStats(visited=len(candidates), peak_resident=len(candidates))
    estimate = PSV(tuple(float(s) for s in candidates[best]))
    return SearchOutcome(estimate=estimate, success=True, stats=stats, cost=float(costs[best]))
