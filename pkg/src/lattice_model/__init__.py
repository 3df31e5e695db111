"""
Lattice problem model: real widening, QR preprocessing in level order, path costs and
exhaustive oracles.
"""

from .model import (
    PSV,
    Alphabet,
    DetectionProblem,
    PartialSignalVector,
    branch_cost,
    is_descendant,
    path_cost,
    preprocess,
    quantize,
    remaining_cost,
    successor_branch_costs,
    widen_complex,
    widen_vector,
)
from .oracles import (
    GOAL_ENUMERATION_LIMIT,
    HEURISTIC_ENUMERATION_LIMIT,
    all_goal_symbols,
    enumerate_goals,
    goal_costs,
    optimal_cost,
    optimal_heuristic_oracle,
    shortest_path,
    shortest_path_costs,
)
from .scene import SNR_CALIBRATION, ComplexScene, sample_scene, snr_to_rho

__all__ = [
    'Alphabet',
    'ComplexScene',
    'DetectionProblem',
    'PartialSignalVector',
    'PSV',
    'widen_complex',
    'widen_vector',
    'preprocess',
    'branch_cost',
    'successor_branch_costs',
    'path_cost',
    'is_descendant',
    'remaining_cost',
    'quantize',
    'optimal_heuristic_oracle',
    'optimal_cost',
    'enumerate_goals',
    'all_goal_symbols',
    'goal_costs',
    'shortest_path',
    'shortest_path_costs',
    'HEURISTIC_ENUMERATION_LIMIT',
    'GOAL_ENUMERATION_LIMIT',
    'sample_scene',
    'snr_to_rho',
    'SNR_CALIBRATION',
]
