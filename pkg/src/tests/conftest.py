"""
Shared fixtures: seeded problem factories.
"""

from typing import Callable, List

import numpy as np
import pytest

from src.core_linalg import RngStream
from src.lattice_model import Alphabet, ComplexScene, DetectionProblem, preprocess, sample_scene

QPSK = Alphabet.qpsk()


def make_problem(num_tx: int, snr_db: float, seed: int, stream: int = 0) -> DetectionProblem:
    scene, _ = sample_scene(num_tx, num_tx, snr_db, RngStream(seed, stream))
    y, H = scene.widened()
    return preprocess(y, H)


def make_scene(num_tx: int, snr_db: float, seed: int, stream: int = 0) -> ComplexScene:
    scene, _ = sample_scene(num_tx, num_tx, snr_db, RngStream(seed, stream))
    return scene


def scalar_problem(z: float, r: float = 1.0) -> DetectionProblem:
    return DetectionProblem(z=np.array([z]), R=np.array([[r]]), alphabet=QPSK)


@pytest.fixture
def problem_factory() -> Callable[..., DetectionProblem]:
    return make_problem


@pytest.fixture(scope="session")
def m8_problems() -> List[DetectionProblem]:
    """60 random 4x4 QPSK instances (m = 8) spanning 0-15 dB."""
    return [make_problem(4, snr, seed=11, stream=i) for i, snr in enumerate(np.linspace(0.0, 15.0, 60))]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)
