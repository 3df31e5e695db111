"""
Minimal dense real linear algebra and seeded random streams.
"""

from .linalg import Matrix, Vector, back_substitute, mat_vec, qr_thin, solve_regularized
from .rng import RngStream, sample_gaussian, trial_stream

__all__ = [
    'Matrix',
    'Vector',
    'qr_thin',
    'mat_vec',
    'back_substitute',
    'solve_regularized',
    'RngStream',
    'sample_gaussian',
    'trial_stream',
]
