"""
Depth-first sphere decoding with Schnorr-Euchner child ordering.

The search starts with the Babai point (successive per-level rounding) as incumbent, so
the squared radius is finite from the first node on; any partial path with g >= radius^2
is pruned and the radius shrinks at every improving leaf.
"""

import numpy as np

from src.lattice_model import PSV, DetectionProblem, path_cost, successor_branch_costs
from src.logging_system import get_logger
from src.tree_search import SearchOutcome, VisitStats, estimate_visit_cost

logger = get_logger(__name__)


def babai_point(p: DetectionProblem) -> PSV:
    """Greedy descent taking the least-branch-cost symbol at every level."""
    psv = PSV.root()
    symbols = p.alphabet.symbols
    for _ in range(p.m):
        costs = successor_branch_costs(p, psv)
        psv = psv.child(symbols[int(np.argmin(costs))])
    return psv


def sphere_decode(p: DetectionProblem) -> SearchOutcome:
    """
    Exact ML estimate by depth-first branch-and-bound on the squared radius.

    Children are visited in increasing branch cost and the radius starts at the
    rounded Babai point's cost.

    Args:
        p: Preprocessed detection problem

    Returns:
        SearchOutcome with the ML goal PSV, its cost and visit statistics
    """
    stats = VisitStats()
    symbols = p.alphabet.symbols
    incumbent = babai_point(p)
    best = {"psv": incumbent, "cost": path_cost(p, incumbent)}

    def search(psv: PSV, g: float) -> None:
        if psv.level == p.m:
            if g < best["cost"]:
                best["psv"], best["cost"] = psv, g
            return
        costs = successor_branch_costs(p, psv)
        stats.expanded += 1
        for idx in np.argsort(costs, kind='stable'):
            child_g = g + float(costs[idx])
            stats.visited += 1
            stats.flop_estimate += estimate_visit_cost(psv.level + 1)
            if child_g >= best["cost"]:
                # later children cost at least as much
                break
            stats.peak_resident = max(stats.peak_resident, psv.level + 1)
            search(psv.child(symbols[idx]), child_g)

    search(PSV.root(), 0.0)
    logger.debug(f"sphere_decode m={p.m} cost={best['cost']:.6g} visited={stats.visited}")
    return SearchOutcome(estimate=best["psv"], success=True, stats=stats, cost=best["cost"])
