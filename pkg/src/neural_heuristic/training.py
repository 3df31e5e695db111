"""
Minibatch training of the learned heuristic.

The whole B*T-slot dataset is packed once; every step draws T*(levels per slot) samples
without replacement and applies one Adam update. `epochs` steps are taken per dataset batch.
"""

from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core_linalg import RngStream
from src.errors import DimensionMismatch, EmptyBatch
from src.logging_system import get_run_logger

from .adam import AdamState, adam_step
from .dataset import TrainConfig, TrainingSample, build_training_set, generate_dataset
from .mlp import Gradients, MlpModel, TrainingBatch, init_model, loss_and_gradients, predicted_f

run_logger = get_run_logger(__name__)

# stream ids above every dataset slot
INIT_STREAM = 1 << 63
MINIBATCH_STREAM = INIT_STREAM + 1
HELDOUT_STREAM_BASE = INIT_STREAM + (1 << 32)

LossTrace = List[Tuple[int, float]]


def backward(model: MlpModel, samples: Union[Sequence[TrainingSample], TrainingBatch]) -> Gradients:
    """Gradient of the mean l2 loss of f_theta over the samples."""
    batch = samples if isinstance(samples, TrainingBatch) else build_training_set(samples)
    if len(batch) == 0:
        raise EmptyBatch("backward needs at least one sample")
    if batch.inputs.shape[1] != model.input_size:
        raise DimensionMismatch(f"samples have {batch.inputs.shape[1]} inputs, model expects {model.input_size}")
    _, grads = loss_and_gradients(model, batch)
    return grads


def mean_abs_error(model: MlpModel, batch: TrainingBatch) -> float:
    """Mean |f_theta - g(label)| over a packed set."""
    if len(batch) == 0:
        raise EmptyBatch("cannot evaluate an empty set")
    return float(np.mean(np.abs(predicted_f(model, batch) - batch.target)))


def heldout_set(cfg: TrainConfig, seed: Optional[int] = None) -> TrainingBatch:
    """Samples from slot streams disjoint from the training slots."""
    samples = generate_dataset(cfg, RngStream(cfg.seed if seed is None else seed),
                               first_slot=HELDOUT_STREAM_BASE, num_slots=cfg.heldout_time_slots)
    return build_training_set(samples)


def train(cfg: TrainConfig, rng: Optional[RngStream] = None, trace: Optional[LossTrace] = None) -> MlpModel:
    """
    Train a heuristic network from scratch.

    Args:
        cfg: Dataset and optimizer settings
        rng: Seed source; defaults to cfg.seed. Dataset slots, initialization and
            minibatch picks each use their own stream of that seed
        trace: List that receives one (step, loss) pair per Adam step

    Returns:
        The trained model, or the freshly initialized one when num_batches is 0
    """
    seed = cfg.seed if rng is None else rng.seed
    run_logger.run_start("train", nt=cfg.num_tx, nr=cfg.num_rx, batches=cfg.num_batches,
                         slots=cfg.minibatch_time_slots, epochs=cfg.epochs, lr=cfg.learning_rate, seed=seed)
    model = init_model(cfg.layer_sizes, RngStream(seed, INIT_STREAM), cfg.final_relu)
    if cfg.num_batches == 0:
        run_logger.run_info("num_batches is 0, returning the initialized model")
        return model

    data = build_training_set(generate_dataset(cfg, RngStream(seed)))
    run_logger.run_info(f"dataset ready: {len(data)} samples after {run_logger.elapsed('train'):.1f}s")

    state = AdamState.for_model(model, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon)
    picker = RngStream(seed, MINIBATCH_STREAM)
    batch_size = min(len(data), cfg.minibatch_time_slots * cfg.samples_per_slot)
    total_steps = cfg.num_batches * cfg.epochs
    report_every = max(1, total_steps // 20)

    for step in range(total_steps):
        loss, grads = loss_and_gradients(model, data.subset(picker.choice(len(data), batch_size)))
        adam_step(model, grads, state)
        if trace is not None:
            trace.append((step, loss))
        if step % report_every == 0 or step == total_steps - 1:
            run_logger.run_progress("train", step + 1, total_steps, loss=loss)

    run_logger.run_success(f"trained {total_steps} steps", "train")
    return model


def save_loss_trace(trace: Iterable[Tuple[int, float]], destination: Union[str, Path]) -> None:
    """One "step,loss" line per entry."""
    path = Path(destination)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8', newline='\n') as f:
        for step, loss in trace:
            f.write(f"{step},{loss!r}\n")
