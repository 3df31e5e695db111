"""
Fully-connected rectifier network h_theta and its backpropagation.

Layer l computes p^l = max{0, W^l p^{l-1} + b^l}. The rectifier on the output layer is
applied by default (final_relu) and can be switched off.
"""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from src.core_linalg import RngStream
from src.errors import DimensionMismatch, EmptyBatch


@dataclass(eq=False)
class MlpModel:
    layer_sizes: Tuple[int, ...]
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    final_relu: bool = True

    def __post_init__(self):
        self.layer_sizes = tuple(int(n) for n in self.layer_sizes)
        sizes = self.layer_sizes
        if len(sizes) < 2 or sizes[-1] != 1 or min(sizes) < 1:
            raise DimensionMismatch(f"layer sizes must be [n0, ..., 1] with positive entries, got {sizes}")
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise DimensionMismatch(f"{len(sizes) - 1} layers need as many weight matrices and bias vectors")
        for l, (W, b) in enumerate(zip(self.weights, self.biases), start=1):
            if W.shape != (sizes[l], sizes[l - 1]) or b.shape != (sizes[l],):
                raise DimensionMismatch(f"layer {l}: W {W.shape}, b {b.shape} do not match sizes {sizes}")
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise ValueError(f"layer {l} has non-finite parameters")

    @property
    def num_layers(self) -> int:
        return len(self.layer_sizes) - 1

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    def copy(self) -> 'MlpModel':
        return MlpModel(self.layer_sizes, [W.copy() for W in self.weights],
                        [b.copy() for b in self.biases], self.final_relu)

    def rectified(self, layer: int) -> bool:
        """Whether layer `layer` (1-based) applies the rectifier."""
        return layer < self.num_layers or self.final_relu


@dataclass
class Gradients:
    weights: List[np.ndarray]
    biases: List[np.ndarray]


@dataclass
class TrainingBatch:
    """Packed supervision: network inputs, g(x^k), targets g(label), goal-level mask."""
    inputs: np.ndarray
    g: np.ndarray
    target: np.ndarray
    at_goal: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.at_goal is None:
            self.at_goal = np.zeros(len(self.g), dtype=bool)

    def __len__(self) -> int:
        return len(self.g)

    def subset(self, index) -> 'TrainingBatch':
        return TrainingBatch(self.inputs[index], self.g[index], self.target[index], self.at_goal[index])


def init_model(layer_sizes: Sequence[int], rng: RngStream, final_relu: bool = True) -> MlpModel:
    """Uniform initialization in ±sqrt(6 / (n_{l-1} + n_l)); zero biases."""
    sizes = tuple(int(n) for n in layer_sizes)
    weights, biases = [], []
    for l in range(1, len(sizes)):
        bound = np.sqrt(6.0 / (sizes[l - 1] + sizes[l]))
        weights.append(rng.uniform(-bound, bound, size=(sizes[l], sizes[l - 1])))
        biases.append(np.zeros(sizes[l]))
    return MlpModel(sizes, weights, biases, final_relu)


def forward(model: MlpModel, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.input_size,):
        raise DimensionMismatch(f"network expects {model.input_size} inputs, got shape {x.shape}")
    a = x
    for l, (W, b) in enumerate(zip(model.weights, model.biases), start=1):
        a = W @ a + b
        if model.rectified(l):
            a = np.maximum(a, 0.0)
    return float(a[0])


def forward_batch(model: MlpModel, X: np.ndarray) -> Tuple[np.ndarray, List[np.ndarray], List[np.ndarray]]:
    """Outputs for every row of X plus per-layer activations and pre-activations."""
    if X.ndim != 2 or X.shape[1] != model.input_size:
        raise DimensionMismatch(f"network expects rows of {model.input_size} inputs, got shape {X.shape}")
    activations = [X]
    pre = []
    a = X
    for l, (W, b) in enumerate(zip(model.weights, model.biases), start=1):
        zl = a @ W.T + b
        pre.append(zl)
        a = np.maximum(zl, 0.0) if model.rectified(l) else zl
        activations.append(a)
    return a[:, 0], activations, pre


def l2_loss(pairs: Sequence[Tuple[float, float]]) -> float:
    """Mean of |target - f_pred|^2 over (f_pred, target) pairs."""
    if len(pairs) == 0:
        raise EmptyBatch("l2_loss needs at least one pair")
    arr = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
    return float(np.mean((arr[:, 1] - arr[:, 0]) ** 2))


def predicted_f(model: MlpModel, batch: TrainingBatch) -> np.ndarray:
    """f_theta = g + h_theta, with h_theta = 0 at goal level."""
    out, _, _ = forward_batch(model, batch.inputs)
    return batch.g + np.where(batch.at_goal, 0.0, out)


def loss_and_gradients(model: MlpModel, batch: TrainingBatch) -> Tuple[float, Gradients]:
    """Mean l2 loss of f_theta against the targets and its gradient (subgradient 0 at the kink)."""
    n = len(batch)
    if n == 0:
        raise EmptyBatch("cannot differentiate an empty batch")
    out, activations, pre = forward_batch(model, batch.inputs)
    h = np.where(batch.at_goal, 0.0, out)
    error = batch.target - (batch.g + h)
    loss = float(np.mean(error ** 2))

    delta = np.where(batch.at_goal, 0.0, -2.0 * error / n)[:, np.newaxis]
    grad_w = [None] * model.num_layers
    grad_b = [None] * model.num_layers
    for l in range(model.num_layers, 0, -1):
        if model.rectified(l):
            delta = delta * (pre[l - 1] > 0.0)
        grad_w[l - 1] = delta.T @ activations[l - 1]
        grad_b[l - 1] = delta.sum(axis=0)
        if l > 1:
            delta = delta @ model.weights[l - 1]
    return loss, Gradients(grad_w, grad_b)
