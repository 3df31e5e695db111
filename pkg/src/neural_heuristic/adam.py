"""
Adam optimizer with bias correction, updating an MlpModel in place.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from src.errors import ShapeMismatch

from .mlp import Gradients, MlpModel

REFERENCE_LEARNING_RATE = 1e-6
DESK_LEARNING_RATE = 1e-4


@dataclass
class AdamState:
    first_w: List[np.ndarray]
    first_b: List[np.ndarray]
    second_w: List[np.ndarray]
    second_b: List[np.ndarray]
    learning_rate: float = REFERENCE_LEARNING_RATE
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = field(default=0)

    @classmethod
    def for_model(cls, model: MlpModel, learning_rate: float = REFERENCE_LEARNING_RATE,
                  beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8) -> 'AdamState':
        """Zero moments shaped like the model's parameters."""
        return cls(
            first_w=[np.zeros_like(W) for W in model.weights],
            first_b=[np.zeros_like(b) for b in model.biases],
            second_w=[np.zeros_like(W) for W in model.weights],
            second_b=[np.zeros_like(b) for b in model.biases],
            learning_rate=learning_rate, beta1=beta1, beta2=beta2, epsilon=epsilon,
        )


def _check_shapes(params: List[np.ndarray], grads: List[np.ndarray], moments: List[np.ndarray], what: str) -> None:
    if not (len(params) == len(grads) == len(moments)):
        raise ShapeMismatch(f"{what}: {len(params)} parameters, {len(grads)} gradients, {len(moments)} moments")
    for l, (p, g, m) in enumerate(zip(params, grads, moments), start=1):
        if p.shape != g.shape or p.shape != m.shape:
            raise ShapeMismatch(f"{what} of layer {l}: parameter {p.shape}, gradient {g.shape}, moment {m.shape}")


def _update(param: np.ndarray, grad: np.ndarray, first: np.ndarray, second: np.ndarray,
            state: AdamState, correction1: float, correction2: float) -> None:
    first *= state.beta1
    first += (1.0 - state.beta1) * grad
    second *= state.beta2
    second += (1.0 - state.beta2) * grad * grad
    param -= state.learning_rate * (first / correction1) / (np.sqrt(second / correction2) + state.epsilon)


def adam_step(model: MlpModel, grads: Gradients, state: AdamState) -> None:
    """One Adam update of every weight and bias of `model`."""
    _check_shapes(model.weights, grads.weights, state.first_w, "weights")
    _check_shapes(model.biases, grads.biases, state.first_b, "biases")

    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step
    for l in range(model.num_layers):
        _update(model.weights[l], grads.weights[l], state.first_w[l], state.second_w[l],
                state, correction1, correction2)
        _update(model.biases[l], grads.biases[l], state.first_b[l], state.second_b[l],
                state, correction1, correction2)
