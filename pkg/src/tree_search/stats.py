"""
Search outcomes and visit-cost accounting.
"""

from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from src.lattice_model import PSV


@dataclass
class VisitStats:
    """
    Complexity counters of one search.

    visited:  generated nodes (regenerations of forgotten nodes count again)
    expanded: nodes whose successors were all generated
    peak_active / peak_resident: maximum ACTIVE size / maximum retained tree nodes
    flop_estimate: accumulated per-visit cost
    dead_ends: non-goal nodes met at maximum depth (always 0 on a complete tree)
    """
    visited: int = 0
    expanded: int = 0
    peak_active: int = 0
    peak_resident: int = 0
    flop_estimate: int = 0
    dead_ends: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SearchOutcome:
    estimate: Optional[PSV]
    success: bool
    stats: VisitStats = field(default_factory=VisitStats)
    cost: Optional[float] = None

    def __post_init__(self):
        if self.success and self.estimate is None:
            raise ValueError("a successful outcome needs an estimate")

    @classmethod
    def failure(cls, stats: VisitStats) -> 'SearchOutcome':
        return cls(estimate=None, success=False, stats=stats)


def estimate_visit_cost(k: int, layer_sizes: Sequence[int] = ()) -> int:
    """Cost of visiting a level-k node: k for g, plus sum_l (n_l n_{l-1} + n_l) for the network."""
    sizes = list(layer_sizes)
    return k + sum(sizes[l] * sizes[l - 1] + sizes[l] for l in range(1, len(sizes)))
