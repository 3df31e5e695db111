"""
Supervision data for the learned heuristic.

Every time slot draws one scene at a uniformly random SNR (in dB), preprocesses it and
emits one sample per supervised level along the transmitted vector, which stands in for
the shortest path. Slot t reads only its own random stream (seed, t), so the dataset does
not depend on how many producers build it.
"""

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core_linalg import RngStream
from src.lattice_model import PSV, DetectionProblem, path_cost, preprocess, sample_scene

from .adam import REFERENCE_LEARNING_RATE
from .mlp import TrainingBatch

DEFAULT_HIDDEN_LAYERS: Tuple[int, ...] = (128, 64, 32, 16)


class TrainConfig(BaseModel):
    """
    Dataset and optimization settings for one training run.

    The defaults give the desk-scale 8x8 run: 105 batches of 128 slots at 15 samples per
    slot is just over 2e5 samples.
    """
    model_config = ConfigDict(frozen=True)

    num_tx: int = Field(default=8, ge=1)
    num_rx: int = Field(default=8, ge=1)
    snr_low: float = Field(default=5.0, allow_inf_nan=False)
    snr_high: float = Field(default=15.0, allow_inf_nan=False)
    minibatch_time_slots: int = Field(default=128, ge=1)
    num_batches: int = Field(default=105, ge=0)
    epochs: int = Field(default=20, ge=1)
    hidden_layers: Tuple[int, ...] = DEFAULT_HIDDEN_LAYERS
    learning_rate: float = Field(default=REFERENCE_LEARNING_RATE, gt=0.0)
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    epsilon: float = Field(default=1e-8, gt=0.0)
    include_goal_level: bool = False
    final_relu: bool = True
    heldout_time_slots: int = Field(default=64, ge=0)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode='after')
    def _check_ranges(self) -> 'TrainConfig':
        if self.num_rx < self.num_tx:
            raise ValueError(f"num_rx ({self.num_rx}) must be >= num_tx ({self.num_tx})")
        if self.snr_low > self.snr_high:
            raise ValueError(f"snr_low ({self.snr_low}) must be <= snr_high ({self.snr_high})")
        if any(n < 1 for n in self.hidden_layers):
            raise ValueError(f"hidden layer sizes must be positive, got {self.hidden_layers}")
        return self

    @property
    def m(self) -> int:
        return 2 * self.num_tx

    @property
    def layer_sizes(self) -> Tuple[int, ...]:
        return (self.m, *self.hidden_layers, 1)

    @property
    def levels(self) -> range:
        return range(1, self.m + 1) if self.include_goal_level else range(1, self.m)

    @property
    def samples_per_slot(self) -> int:
        return len(self.levels)

    @property
    def total_time_slots(self) -> int:
        return self.num_batches * self.minibatch_time_slots


@dataclass(frozen=True, eq=False)
class TrainingSample:
    problem: DetectionProblem
    label_path: PSV
    k: int
    target: float

    @property
    def z(self) -> np.ndarray:
        return self.problem.z

    @property
    def R(self) -> np.ndarray:
        return self.problem.R

    @property
    def node(self) -> PSV:
        """The supervised partial path x^k of the label."""
        return self.label_path.prefix(self.k)


def residual_input(p: DetectionProblem, psv: PSV) -> np.ndarray:
    """z - R [x^k; 0] in level order; equals z at the root and the full residual at a goal."""
    k = psv.level
    if k == 0:
        return p.z.copy()
    return p.z - p.R[:, :k] @ psv.level_order()


def slot_samples(cfg: TrainConfig, seed: int, slot: int) -> Iterator[TrainingSample]:
    """The samples of one time slot, drawn from stream (seed, slot)."""
    rng = RngStream(seed, slot)
    snr_db = float(rng.uniform(cfg.snr_low, cfg.snr_high))
    scene, _ = sample_scene(cfg.num_tx, cfg.num_rx, snr_db, rng)
    y, H = scene.widened()
    p = preprocess(y, H)
    label = p.psv_from_natural(scene.x)
    target = path_cost(p, label)
    for k in cfg.levels:
        yield TrainingSample(problem=p, label_path=label, k=k, target=target)


def generate_dataset(cfg: TrainConfig, rng: Optional[RngStream] = None,
                     first_slot: int = 0, num_slots: Optional[int] = None) -> Iterator[TrainingSample]:
    """Stream of samples for slots first_slot .. first_slot + num_slots - 1 (all B*T slots by default)."""
    seed = cfg.seed if rng is None else rng.seed
    count = cfg.total_time_slots if num_slots is None else num_slots
    for slot in range(first_slot, first_slot + count):
        yield from slot_samples(cfg, seed, slot)


def build_training_set(samples: Iterable[TrainingSample]) -> TrainingBatch:
    """Pack samples into network inputs, g(x^k), targets and the goal-level mask."""
    inputs, g, target, at_goal = [], [], [], []
    for sample in samples:
        node = sample.node
        inputs.append(residual_input(sample.problem, node))
        g.append(path_cost(sample.problem, node))
        target.append(sample.target)
        at_goal.append(sample.problem.is_goal(node))
    if not inputs:
        return TrainingBatch(np.zeros((0, 0)), np.zeros(0), np.zeros(0), np.zeros(0, dtype=bool))
    return TrainingBatch(np.vstack(inputs), np.asarray(g), np.asarray(target), np.asarray(at_goal, dtype=bool))
