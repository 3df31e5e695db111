"""
Heuristic providers: h(x^k), an estimate of the cheapest remaining cost below a node.
"""

from abc import ABC, abstractmethod
from typing import Tuple

from src.lattice_model import PSV, DetectionProblem, optimal_heuristic_oracle


class HeuristicProvider(ABC):
    """
    Evaluation contract shared by every search engine.

    Implementations must be deterministic per input and safe for concurrent read-only use.
    `layer_sizes` feeds per-visit cost accounting; it is empty when no network is evaluated.
    """

    layer_sizes: Tuple[int, ...] = ()
    name: str = "heuristic"

    @abstractmethod
    def evaluate(self, p: DetectionProblem, psv: PSV) -> float:
        ...


class ZeroHeuristic(HeuristicProvider):
    """h = 0 everywhere; admissible and consistent."""

    name = "zero"

    def evaluate(self, p: DetectionProblem, psv: PSV) -> float:
        return 0.0


class OracleHeuristic(HeuristicProvider):
    """The exact optimal heuristic h*, by enumeration of the subtree."""

    name = "oracle"

    def evaluate(self, p: DetectionProblem, psv: PSV) -> float:
        return optimal_heuristic_oracle(p, psv)
