"""
Exhaustive oracles over the decision tree. Test and verification use only; every
enumeration is guarded so it stays desk-sized.
"""

import itertools
from functools import lru_cache
from typing import Iterator, List, Tuple

import numpy as np

from src.errors import TooLargeToEnumerate
from .model import PSV, Alphabet, DetectionProblem, path_cost

HEURISTIC_ENUMERATION_LIMIT = 2 ** 20
GOAL_ENUMERATION_LIMIT = 2 ** 24


def _check_size(alphabet: Alphabet, depth: int, limit: int) -> None:
    if alphabet.size ** depth > limit:
        raise TooLargeToEnumerate(f"|A|^{depth} = {alphabet.size ** depth} exceeds the limit {limit}")


@lru_cache(maxsize=64)
def _completion_table(symbols: Tuple[float, ...], depth: int) -> np.ndarray:
    """All symbol sequences of the given length in lexicographic order, one per row."""
    table = np.array(list(itertools.product(symbols, repeat=depth)), dtype=np.float64).reshape(-1, depth)
    table.setflags(write=False)
    return table


def goal_costs(p: DetectionProblem, candidates) -> np.ndarray:
    """||z - R x||^2 for each row of `candidates` (goal PSV symbol order, i.e. natural order)."""
    candidates = np.asarray(candidates, dtype=np.float64).reshape(-1, p.m)
    residual = p.z[np.newaxis, :] - candidates[:, ::-1] @ p.R.T
    return np.einsum('ij,ij->i', residual, residual)


def all_goal_symbols(p: DetectionProblem) -> np.ndarray:
    """Every goal candidate, lexicographic order, one per row."""
    _check_size(p.alphabet, p.m, GOAL_ENUMERATION_LIMIT)
    return _completion_table(p.alphabet.symbols, p.m)


def enumerate_goals(p: DetectionProblem) -> Iterator[PSV]:
    """Yield each of the |A|^m goal PSVs exactly once, in lexicographic symbol order."""
    _check_size(p.alphabet, p.m, GOAL_ENUMERATION_LIMIT)
    for symbols in itertools.product(p.alphabet.symbols, repeat=p.m):
        yield PSV(tuple(symbols))


def optimal_heuristic_oracle(p: DetectionProblem, psv: PSV) -> float:
    """h*(x^k): exact minimum remaining cost over all completions of psv."""
    k = psv.level
    free = p.m - k
    if free == 0:
        return 0.0
    _check_size(p.alphabet, free, HEURISTIC_ENUMERATION_LIMIT)
    completions = _completion_table(p.alphabet.symbols, free)
    # level order: x_1..x_k from psv, then x_{k+1}..x_m from the reversed completion rows
    known = np.broadcast_to(psv.level_order(), (completions.shape[0], k))
    x_levels = np.hstack([known, completions[:, ::-1]])
    residual = p.z[np.newaxis, k:] - x_levels @ p.R[k:, :].T
    return float(np.min(np.einsum('ij,ij->i', residual, residual)))


def optimal_cost(p: DetectionProblem, psv: PSV) -> float:
    """f*(x^k) = g(x^k) + h*(x^k)."""
    return path_cost(p, psv) + optimal_heuristic_oracle(p, psv)


def shortest_path(p: DetectionProblem) -> PSV:
    """The ML goal; ties resolved toward the lexicographically smallest symbols."""
    candidates = all_goal_symbols(p)
    best = int(np.argmin(goal_costs(p, candidates)))
    return PSV(tuple(float(s) for s in candidates[best]))


def shortest_path_costs(p: DetectionProblem) -> Tuple[PSV, List[float]]:
    """
    The ML goal and f*(x^j) for j = 0..m along the root-to-goal path.

    With the optimal heuristic every entry equals g of the goal.
    """
    goal = shortest_path(p)
    return goal, [optimal_cost(p, goal.prefix(j)) for j in range(p.m + 1)]
