"""
Linear MMSE detection followed by per-component quantization.
"""

from pydantic import BaseModel, ConfigDict, Field

from src.core_linalg import solve_regularized
from src.lattice_model import PSV, Alphabet, quantize


class MmseConfig(BaseModel):
    """Noise variance per real component (1.0 under the unit-variance model)."""
    model_config = ConfigDict(frozen=True)

    sigma2: float = Field(default=1.0, gt=0.0, allow_inf_nan=False)


def mmse_detect(y, H, cfg: MmseConfig = MmseConfig(), alphabet: Alphabet = Alphabet.qpsk()) -> PSV:
    """quantize((H^T H + sigma2 I)^{-1} H^T y); returns a goal PSV in natural order."""
    return quantize(alphabet, solve_regularized(H, y, cfg.sigma2))
