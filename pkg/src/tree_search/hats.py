"""
Memory-bounded best-first search (SMA*-style) driven by a heuristic provider.

ACTIVE holds at most M nodes. Each iteration generates a single successor of the
deepest least-f node; when ACTIVE is full the shallowest highest-f leaf is evicted and
its f-cost is remembered in the parent's forgotten list for later regeneration.
"""

import itertools
import math
from typing import Optional

from src.errors import CapacityTooSmall, NoEvictable
from src.lattice_model import DetectionProblem, PSV
from src.logging_system import get_logger
from .heuristics import HeuristicProvider
from .nodes import ActiveList, SuccessorOrder, TreeNode
from .stats import SearchOutcome, VisitStats, estimate_visit_cost

logger = get_logger(__name__)


class SearchTree:
    """Bookkeeping of one memory-bounded search; owned by a single thread."""

    def __init__(self, p: DetectionProblem, h: HeuristicProvider, capacity: Optional[int] = None,
                 order: SuccessorOrder = SuccessorOrder.BRANCH_COST):
        self.problem = p
        self.heuristic = h
        self.capacity = capacity
        self.order = order
        self.active = ActiveList(capacity)
        self.stats = VisitStats()
        self.resident = 0
        self._sequence = itertools.count()
        self.root = self.new_node(PSV.root(), 0.0, None, None)
        self.root.f = h.evaluate(p, self.root.psv)

    def new_node(self, psv: PSV, g: float, parent: Optional[TreeNode], symbol: Optional[float]) -> TreeNode:
        self.resident += 1
        self.stats.peak_resident = max(self.stats.peak_resident, self.resident)
        return TreeNode(psv=psv, g=g, f=g, parent=parent, sequence=next(self._sequence), symbol=symbol)

    def insert(self, node: TreeNode) -> None:
        self.active.insert(node)
        self.stats.peak_active = max(self.stats.peak_active, len(self.active))


def try_adjust(tree: SearchTree, node: Optional[TreeNode]) -> None:
    """
    Back up the least successor f-cost once every successor of `node` has been generated,
    then continue with the parent while the value changes.
    """
    while node is not None:
        if node.has_ungenerated:
            return
        values = [child.f for child in node.generated.values()] + list(node.forgotten.values())
        least = min(values)
        if not math.isfinite(least) or least == node.f:
            return
        node.f = least
        tree.active.reorder(node)
        node = node.parent


def try_make_space(tree: SearchTree, protected: Optional[TreeNode] = None) -> None:
    """
    Evict shallowest highest-f leaves until ACTIVE has room. The root and `protected`
    (the node being expanded) are never evicted. A parent that had left ACTIVE is put back.
    """
    active = tree.active
    while active.is_full():
        victim = active.worst_leaf(protected=(tree.root, protected))
        if victim is None:
            raise NoEvictable(f"ACTIVE is full ({len(active)}) and holds no evictable leaf")
        active.remove(victim)
        parent = victim.parent
        del parent.generated[victim.symbol]
        parent.forgotten[victim.symbol] = victim.f
        tree.resident -= 1
        if parent.in_active:
            return
        tree.insert(parent)


def hats(p: DetectionProblem, h: HeuristicProvider, capacity: Optional[int] = None,
         order: SuccessorOrder = SuccessorOrder.BRANCH_COST) -> SearchOutcome:
    """
    Memory-bounded heuristic tree search.

    Each iteration selects the deepest least-f node and generates one successor. When
    ACTIVE is full, the shallowest highest-f leaf is forgotten and its f-cost kept in
    its parent.

    Args:
        p: Preprocessed detection problem
        h: Heuristic provider evaluated on every generated node
        capacity: ACTIVE bound M, at least m + 1; None for unbounded
        order: Order in which a node's successors are generated

    Returns:
        SearchOutcome with the selected goal, its cost and the visit statistics;
        success is False only if ACTIVE runs empty

    Raises:
        CapacityTooSmall: capacity cannot hold a root-to-goal path
    """
    if capacity is not None and capacity < p.m + 1:
        raise CapacityTooSmall(f"capacity {capacity} < m + 1 = {p.m + 1}")

    tree = SearchTree(p, h, capacity, order)
    stats = tree.stats
    width = p.alphabet.size
    tree.insert(tree.root)

    while True:
        node = tree.active.best()
        if node is None:
            logger.debug(f"hats[{h.name}] m={p.m} M={capacity} failure: ACTIVE exhausted")
            return SearchOutcome.failure(stats)
        if p.is_goal(node.psv):
            logger.debug(f"hats[{h.name}] m={p.m} M={capacity} success cost={node.g:.6g} "
                         f"visited={stats.visited} expanded={stats.expanded} peak_active={stats.peak_active}")
            return SearchOutcome(estimate=node.psv, success=True, stats=stats, cost=node.g)

        node.prepare_successors(p, tree.order)
        if node.has_ungenerated:
            symbol = node.order[node.cursor]
            node.cursor += 1
            remembered = None
        else:
            symbol = node.best_forgotten()
            remembered = node.forgotten.pop(symbol)

        child = tree.new_node(node.psv.child(symbol), node.g + node.branch[symbol], node, symbol)
        node.generated[symbol] = child
        stats.visited += 1
        stats.flop_estimate += estimate_visit_cost(child.depth, h.layer_sizes)

        if remembered is None:
            if not p.is_goal(child.psv) and child.depth == p.m:
                child.f = math.inf
                stats.dead_ends += 1
            else:
                child.f = max(node.f, child.g + h.evaluate(p, child.psv))
        else:
            child.f = remembered

        try_adjust(tree, node)
        try_make_space(tree, protected=node)
        tree.insert(child)

        if len(node.generated) == width:
            tree.active.remove(node)
            stats.expanded += 1
