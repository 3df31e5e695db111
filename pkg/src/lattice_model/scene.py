"""
Complex Rayleigh-fading QPSK scenes with SNR calibration.

SNR is E||H_c x_c||^2 / E||w_c||^2 per receive antenna. With unit-variance real noise
components (N0 = 2 per complex entry) and QPSK symbols of energy 2 this gives
rho = 10^(snr_db/10) / Nt for the channel tap variance.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.core_linalg import RngStream, sample_gaussian
from src.errors import ConfigError

from .model import widen_complex, widen_vector

SNR_CALIBRATION = "rho = 10^(snr_db/10)/Nt; SNR = E||Hc xc||^2/E||wc||^2 per receive antenna; unit-variance real noise; QPSK Es = 2"


@dataclass(frozen=True, eq=False)
class ComplexScene:
    Hc: np.ndarray
    xc: np.ndarray
    wc: np.ndarray
    yc: np.ndarray
    rho: float

    @property
    def num_tx(self) -> int:
        return self.Hc.shape[1]

    @property
    def num_rx(self) -> int:
        return self.Hc.shape[0]

    @property
    def x(self) -> np.ndarray:
        """Transmitted symbols in the widened real order [Re(x_c); Im(x_c)]."""
        return widen_vector(self.xc)

    def widened(self) -> Tuple[np.ndarray, np.ndarray]:
        """The real-valued pair (y, H)."""
        return widen_complex(self.yc, self.Hc)


def snr_to_rho(snr_db: float, num_tx: int) -> float:
    return 10.0 ** (snr_db / 10.0) / num_tx


def sample_scene(num_tx: int, num_rx: int, snr_db: float, rng: RngStream) -> Tuple[ComplexScene, np.ndarray]:
    """
    Draw one QPSK transmission over an i.i.d. CN(0, rho) channel.

    Returns the scene and the 2*Nt transmitted bits in widened order [Re(x_c); Im(x_c)],
    one bit per real symbol (1 for +1, 0 for -1).
    """
    if num_rx < num_tx or num_tx < 1:
        raise ConfigError(f"need Nr >= Nt >= 1, got Nt={num_tx}, Nr={num_rx}")
    rho = snr_to_rho(snr_db, num_tx)
    gen = rng.generator

    bits = gen.integers(0, 2, size=2 * num_tx)
    real_symbols = 2.0 * bits - 1.0
    xc = real_symbols[:num_tx] + 1j * real_symbols[num_tx:]

    taps = gen.standard_normal((num_rx, 2 * num_tx))
    Hc = np.sqrt(rho / 2.0) * (taps[:, :num_tx] + 1j * taps[:, num_tx:])

    noise = sample_gaussian(rng, 2 * num_rx)
    wc = noise[:num_rx] + 1j * noise[num_rx:]

    yc = Hc @ xc + wc
    return ComplexScene(Hc=Hc, xc=xc, wc=wc, yc=yc, rho=rho), bits.astype(np.int64)
