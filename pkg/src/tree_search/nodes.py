"""
Tree nodes and the ACTIVE list.

ACTIVE keeps two lazy heaps over the same node set:
  best order:       f ascending, depth descending, sequence ascending
  worst-leaf order: f descending, depth ascending, sequence descending
Entries are invalidated by bumping the node's version; stale entries are dropped on read.
"""

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from src.lattice_model import PSV, DetectionProblem, successor_branch_costs


class SuccessorOrder(str, Enum):
    """Order in which a node generates its successors."""
    BRANCH_COST = "branch-cost"
    ALPHABET = "alphabet"


@dataclass(eq=False)
class TreeNode:
    psv: PSV
    g: float
    f: float
    parent: Optional['TreeNode']
    sequence: int
    symbol: Optional[float] = None
    generated: Dict[float, 'TreeNode'] = field(default_factory=dict)
    forgotten: Dict[float, float] = field(default_factory=dict)
    order: Optional[Tuple[float, ...]] = None
    branch: Optional[Dict[float, float]] = None
    cursor: int = 0
    in_active: bool = False
    version: int = 0

    @property
    def depth(self) -> int:
        return self.psv.level

    @property
    def has_ungenerated(self) -> bool:
        return self.order is None or self.cursor < len(self.order)

    def prepare_successors(self, p: DetectionProblem, mode: SuccessorOrder) -> None:
        """Compute child branch costs and the generation order once."""
        if self.order is not None:
            return
        costs = successor_branch_costs(p, self.psv)
        symbols = p.alphabet.symbols
        if mode == SuccessorOrder.BRANCH_COST:
            ranking = np.argsort(costs, kind='stable')
        else:
            ranking = range(len(symbols))
        self.order = tuple(symbols[i] for i in ranking)
        self.branch = {symbols[i]: float(costs[i]) for i in range(len(symbols))}

    def best_forgotten(self) -> float:
        """Symbol of the least-f forgotten successor; ties follow generation order."""
        return min(self.forgotten, key=lambda s: (self.forgotten[s], self.order.index(s)))


def best_key(node: TreeNode) -> Tuple[float, int, int]:
    return (node.f, -node.depth, node.sequence)


def worst_key(node: TreeNode) -> Tuple[float, int, int]:
    return (-node.f, node.depth, -node.sequence)


class ActiveList:
    """
    Capacity-bounded ordered frontier; capacity None means unbounded.

    Only a bounded list keeps the worst-leaf heap.
    """

    def __init__(self, capacity: Optional[int] = None):
        self.capacity = capacity
        self._best: List[tuple] = []
        self._worst: List[tuple] = []
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def __bool__(self) -> bool:
        return self._size > 0

    def is_full(self) -> bool:
        return self.capacity is not None and self._size >= self.capacity

    def _push(self, node: TreeNode) -> None:
        heapq.heappush(self._best, (*best_key(node), node.version, node))
        if self.capacity is not None:
            heapq.heappush(self._worst, (*worst_key(node), node.version, node))

    @staticmethod
    def _live(entry: tuple) -> bool:
        node = entry[-1]
        return node.in_active and entry[-2] == node.version

    def insert(self, node: TreeNode) -> None:
        if node.in_active:
            raise ValueError(f"node {node.psv.symbols} is already in ACTIVE")
        node.in_active = True
        node.version += 1
        self._size += 1
        self._push(node)

    def remove(self, node: TreeNode) -> None:
        if not node.in_active:
            raise ValueError(f"node {node.psv.symbols} is not in ACTIVE")
        node.in_active = False
        node.version += 1
        self._size -= 1

    def reorder(self, node: TreeNode) -> None:
        """Re-key a node after its f-cost changed; no-op when it is not in ACTIVE."""
        if node.in_active:
            node.version += 1
            self._push(node)

    def best(self) -> Optional[TreeNode]:
        while self._best:
            if self._live(self._best[0]):
                return self._best[0][-1]
            heapq.heappop(self._best)
        return None

    def worst_leaf(self, protected: Iterable[TreeNode] = ()) -> Optional[TreeNode]:
        """Worst node with no resident generated successors, skipping protected nodes."""
        if self.capacity is None:
            raise ValueError("an unbounded ACTIVE list keeps no eviction order")
        protected_ids = {id(n) for n in protected if n is not None}
        skipped = []
        found = None
        while self._worst:
            entry = heapq.heappop(self._worst)
            if not self._live(entry):
                continue
            skipped.append(entry)
            node = entry[-1]
            if not node.generated and id(node) not in protected_ids:
                found = node
                break
        for entry in skipped:
            heapq.heappush(self._worst, entry)
        return found

    def nodes(self) -> List[TreeNode]:
        """Current members in best order."""
        live = {id(e[-1]): e for e in self._best if self._live(e)}
        return [e[-1] for e in sorted(live.values(), key=lambda e: e[:3])]
