"""
One Monte-Carlo trial: widen, preprocess, detect, count bit errors.
"""

from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, Optional

import numpy as np

from src.baseline_detectors import MmseConfig, mmse_detect, sphere_decode
from src.errors import MissingModel
from src.lattice_model import ComplexScene, DetectionProblem, preprocess
from src.neural_heuristic import MlpModel, NeuralHeuristic, load_model
from src.tree_search import (
    HeuristicProvider,
    SearchOutcome,
    SuccessorOrder,
    VisitStats,
    ZeroHeuristic,
    astar,
    brute_force_ml,
    hats,
)

from .config import split_algorithm


@dataclass
class TrialRecord:
    snr_db: float
    algorithm: str
    bit_errors: int
    bits: int
    visited: int = 0
    expanded: int = 0
    peak_active: int = 0
    peak_resident: int = 0
    flop_estimate: int = 0
    success: bool = True
    cost: Optional[float] = None

    def __post_init__(self):
        if not 0 <= self.bit_errors <= self.bits:
            raise ValueError(f"bit_errors {self.bit_errors} outside [0, {self.bits}]")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TrialParams:
    """Per-sweep detector settings shared by all trials."""
    memory: Optional[int] = None
    order: SuccessorOrder = SuccessorOrder.BRANCH_COST
    model: Optional[MlpModel] = field(default=None, compare=False)
    mmse: MmseConfig = MmseConfig()


Detector = Callable[[DetectionProblem, np.ndarray, np.ndarray, TrialParams], SearchOutcome]


def _learned(params: TrialParams) -> HeuristicProvider:
    if params.model is None:
        raise MissingModel("algorithm 'hats' needs a trained model (--model)")
    return NeuralHeuristic(params.model)


def _mmse(p: DetectionProblem, y, H, params: TrialParams) -> SearchOutcome:
    return SearchOutcome(estimate=mmse_detect(y, H, params.mmse, p.alphabet), success=True)


DETECTORS: Dict[str, Detector] = {
    'mmse': _mmse,
    'sd': lambda p, y, H, params: sphere_decode(p),
    'ml': lambda p, y, H, params: brute_force_ml(p),
    'astar-zero': lambda p, y, H, params: astar(p, ZeroHeuristic(), params.order),
    'hats': lambda p, y, H, params: hats(p, _learned(params), params.memory, params.order),
    'hats-zero': lambda p, y, H, params: hats(p, ZeroHeuristic(), params.memory, params.order),
}


def estimate_bits(x: np.ndarray) -> np.ndarray:
    """One bit per real QPSK symbol: 1 for +1, 0 for -1."""
    return (np.asarray(x) > 0).astype(np.int64)


def detect(algorithm: str, y: np.ndarray, H: np.ndarray, params: TrialParams):
    """
    Run one detector on the real-valued pair; returns (problem, outcome).

    A memory-qualified name such as "hats@1024" overrides `params.memory` for that run.
    """
    base, memory = split_algorithm(algorithm, params.memory)
    if memory != params.memory:
        params = replace(params, memory=memory)
    p = preprocess(y, H)
    return p, DETECTORS[base](p, y, H, params)


def run_trial(scene: ComplexScene, algorithm: str, params: TrialParams, snr_db: float = float('nan')) -> TrialRecord:
    """
    Detect one scene and compare bitwise with the transmitted symbols.

    Args:
        scene: Complex transmission to detect
        algorithm: Detector name, optionally memory-qualified ("hats@128")
        params: Detector settings shared by the sweep
        snr_db: SNR recorded on the result

    Returns:
        TrialRecord; a failed search (empty frontier) counts every bit as an error
    """
    y, H = scene.widened()
    p, outcome = detect(algorithm, y, H, params)
    truth = estimate_bits(scene.x)
    stats = outcome.stats or VisitStats()
    if outcome.success:
        errors = int(np.count_nonzero(estimate_bits(p.to_natural(outcome.estimate)) != truth))
    else:
        errors = truth.size
    return TrialRecord(
        snr_db=snr_db, algorithm=algorithm, bit_errors=errors, bits=truth.size,
        visited=stats.visited, expanded=stats.expanded, peak_active=stats.peak_active,
        peak_resident=stats.peak_resident, flop_estimate=stats.flop_estimate,
        success=outcome.success, cost=outcome.cost,
    )


@lru_cache(maxsize=8)
def cached_model(path: str, final_relu: bool = True, expected_inputs: Optional[int] = None) -> MlpModel:
    """Load a model once per process."""
    if not Path(path).is_file():
        raise MissingModel(f"model file {path} not found", num_antennas=None if expected_inputs is None else expected_inputs // 2)
    return load_model(path, final_relu, expected_inputs)
