"""
The trained network as a search heuristic.
"""

from src.errors import DimensionMismatch
from src.lattice_model import PSV, DetectionProblem
from src.tree_search import HeuristicProvider

from .dataset import residual_input
from .mlp import MlpModel, forward


def heuristic_eval(model: MlpModel, p: DetectionProblem, psv: PSV) -> float:
    """h_theta(x^k); exactly 0 at goal level."""
    if model.input_size != p.m:
        raise DimensionMismatch(f"model expects dimension {model.input_size}, problem has m={p.m}")
    if p.is_goal(psv):
        return 0.0
    return forward(model, residual_input(p, psv))


class NeuralHeuristic(HeuristicProvider):
    name = "neural"

    def __init__(self, model: MlpModel):
        self.model = model
        self.layer_sizes = model.layer_sizes

    def evaluate(self, p: DetectionProblem, psv: PSV) -> float:
        return heuristic_eval(self.model, p, psv)
