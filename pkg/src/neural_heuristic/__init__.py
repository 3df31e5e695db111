"""
Learned heuristic: rectifier network, backpropagation, Adam, dataset generation,
training and the model file format.
"""

from .adam import DESK_LEARNING_RATE, REFERENCE_LEARNING_RATE, AdamState, adam_step
from .dataset import (
    DEFAULT_HIDDEN_LAYERS,
    TrainConfig,
    TrainingSample,
    build_training_set,
    generate_dataset,
    residual_input,
)
from .heuristic import NeuralHeuristic, heuristic_eval
from .mlp import (
    Gradients,
    MlpModel,
    TrainingBatch,
    forward,
    forward_batch,
    init_model,
    l2_loss,
    loss_and_gradients,
    predicted_f,
)
from .model_io import MAGIC, decode_model, encode_model, load_model, save_model
from .training import backward, heldout_set, mean_abs_error, save_loss_trace, train

__all__ = [
    'MlpModel',
    'Gradients',
    'TrainingBatch',
    'TrainingSample',
    'TrainConfig',
    'AdamState',
    'NeuralHeuristic',
    'REFERENCE_LEARNING_RATE',
    'DESK_LEARNING_RATE',
    'DEFAULT_HIDDEN_LAYERS',
    'MAGIC',
    'init_model',
    'forward',
    'forward_batch',
    'predicted_f',
    'heuristic_eval',
    'residual_input',
    'l2_loss',
    'loss_and_gradients',
    'backward',
    'adam_step',
    'generate_dataset',
    'build_training_set',
    'heldout_set',
    'mean_abs_error',
    'train',
    'save_model',
    'load_model',
    'encode_model',
    'decode_model',
    'save_loss_trace',
]
