"""
A* best-first search with pathmax f-costs.
"""

import heapq
import itertools

from src.lattice_model import DetectionProblem, PSV
from src.logging_system import get_logger
from .heuristics import HeuristicProvider
from .nodes import SuccessorOrder, TreeNode, best_key
from .stats import SearchOutcome, VisitStats, estimate_visit_cost

logger = get_logger(__name__)


def astar(p: DetectionProblem, h: HeuristicProvider,
          order: SuccessorOrder = SuccessorOrder.BRANCH_COST) -> SearchOutcome:
    """
    Expand the least-f node (ties: deeper, then older) until a goal is selected.

    Each successor gets f = max(f(parent), g + h). With an admissible h the returned goal
    minimizes g over all goals.

    Args:
        p: Preprocessed detection problem
        h: Heuristic provider
        order: Order in which successors are generated (affects sequence tie-breaks only)

    Returns:
        SearchOutcome with the goal PSV, its path cost and visit statistics
    """
    stats = VisitStats()
    sequence = itertools.count()
    root = TreeNode(psv=PSV.root(), g=0.0, f=0.0, parent=None, sequence=next(sequence))
    root.f = root.g + h.evaluate(p, root.psv)
    active = [(*best_key(root), root)]
    stats.peak_active = stats.peak_resident = 1
    resident = 1

    while active:
        node: TreeNode = heapq.heappop(active)[-1]
        if p.is_goal(node.psv):
            logger.debug(f"astar[{h.name}] m={p.m} success cost={node.g:.6g} visited={stats.visited} expanded={stats.expanded}")
            return SearchOutcome(estimate=node.psv, success=True, stats=stats, cost=node.g)

        node.prepare_successors(p, order)
        for symbol in node.order:
            child_psv = node.psv.child(symbol)
            g = node.g + node.branch[symbol]
            child = TreeNode(psv=child_psv, g=g, f=0.0, parent=node, sequence=next(sequence), symbol=symbol)
            child.f = max(node.f, g + h.evaluate(p, child_psv))
            node.generated[symbol] = child
            heapq.heappush(active, (*best_key(child), child))
            stats.visited += 1
            stats.flop_estimate += estimate_visit_cost(child.depth, h.layer_sizes)
        stats.expanded += 1
        resident += len(node.order)
        stats.peak_active = max(stats.peak_active, len(active))
        stats.peak_resident = max(stats.peak_resident, resident)

    logger.debug(f"astar[{h.name}] m={p.m} failure: ACTIVE exhausted")
    return SearchOutcome.failure(stats)
