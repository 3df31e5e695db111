"""
Best-first tree search engines: A*, the memory-bounded heuristic search and the
exhaustive ML reference.
"""

from .astar import astar
from .exhaustive import brute_force_ml
from .hats import SearchTree, hats, try_adjust, try_make_space
from .heuristics import HeuristicProvider, OracleHeuristic, ZeroHeuristic
from .nodes import ActiveList, SuccessorOrder, TreeNode, best_key, worst_key
from .stats import SearchOutcome, VisitStats, estimate_visit_cost

__all__ = [
    'astar',
    'hats',
    'try_adjust',
    'try_make_space',
    'brute_force_ml',
    'SearchTree',
    'HeuristicProvider',
    'ZeroHeuristic',
    'OracleHeuristic',
    'ActiveList',
    'SuccessorOrder',
    'TreeNode',
    'best_key',
    'worst_key',
    'SearchOutcome',
    'VisitStats',
    'estimate_visit_cost',
]
