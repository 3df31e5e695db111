"""
Validated configuration for sweeps and oracle checks, plus environment settings.
"""

import json
import math
import os
from pathlib import Path
from typing import Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.errors import ConfigError
from src.lattice_model import SNR_CALIBRATION
from src.tree_search import SuccessorOrder

ALGORITHMS: Tuple[str, ...] = ('mmse', 'sd', 'ml', 'astar-zero', 'hats', 'hats-zero')
LEARNED_ALGORITHMS = frozenset({'hats'})
BOUNDED_ALGORITHMS = frozenset({'hats', 'hats-zero'})

DEFAULT_MODEL_DIR = "models"


def model_filename(num_tx: int, num_rx: int) -> str:
    return f"hats_{num_tx}x{num_rx}.bin"


def split_algorithm(name: str, default_memory: Optional[int] = None) -> Tuple[str, Optional[int]]:
    """
    Split a possibly memory-qualified algorithm name into detector and ACTIVE bound.

    Args:
        name: A name from ALGORITHMS, optionally suffixed with `@M` or `@inf`
            for the bounded searches (e.g. "hats@128")
        default_memory: Bound used when the name carries no suffix

    Returns:
        (detector name, ACTIVE bound or None for unbounded)
    """
    base, sep, suffix = name.partition('@')
    if not sep:
        return base, default_memory
    if base not in BOUNDED_ALGORITHMS:
        raise ConfigError(f"only {sorted(BOUNDED_ALGORITHMS)} take a memory bound, got {name!r}")
    return base, parse_memory(suffix)


def _check_algorithms(names: Tuple[str, ...]) -> Tuple[str, ...]:
    if not names:
        raise ValueError("at least one algorithm is required")
    try:
        bases = [split_algorithm(a)[0] for a in names]
    except ConfigError as e:
        raise ValueError(str(e))
    unknown = [a for a, base in zip(names, bases) if base not in ALGORITHMS]
    if unknown:
        raise ValueError(f"unknown algorithm(s) {unknown}; choose from {list(ALGORITHMS)}")
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate algorithm in {list(names)}")
    return names


class SweepConfig(BaseModel):
    """
    One Monte-Carlo sweep over SNR points.

    Every trial draws one scene and runs every configured algorithm on it. With
    target_errors or max_bits set, a point stops at the first block of `block_trials`
    trials after which every algorithm has target_errors bit errors, or max_bits bits
    were simulated per algorithm.
    """
    model_config = ConfigDict(frozen=True)

    num_tx: int = Field(default=4, ge=1)
    num_rx: int = Field(default=4, ge=1)
    snr_list: Tuple[float, ...] = (5.0, 7.5, 10.0, 12.5, 15.0)
    trials: int = Field(default=1000, ge=1)
    algorithms: Tuple[str, ...] = ('sd', 'astar-zero')
    memory: Optional[int] = Field(default=None, ge=1)
    model_path: Optional[str] = None
    final_relu: bool = True
    order: SuccessorOrder = SuccessorOrder.BRANCH_COST
    seed: int = Field(default=0, ge=0)
    target_errors: Optional[int] = Field(default=None, ge=1)
    max_bits: Optional[int] = Field(default=None, ge=1)
    block_trials: int = Field(default=250, ge=1)
    out: Optional[str] = None

    @field_validator('algorithms')
    @classmethod
    def _valid_algorithms(cls, value: Tuple[str, ...]) -> Tuple[str, ...]:
        return _check_algorithms(value)

    @field_validator('snr_list')
    @classmethod
    def _valid_snr(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if not value:
            raise ValueError("snr_list must not be empty")
        if not all(math.isfinite(v) for v in value):
            raise ValueError(f"snr values must be finite, got {value}")
        return value

    @model_validator(mode='after')
    def _check_antennas(self) -> 'SweepConfig':
        if self.num_rx < self.num_tx:
            raise ValueError(f"num_rx ({self.num_rx}) must be >= num_tx ({self.num_tx})")
        for algorithm in self.algorithms:
            _, memory = split_algorithm(algorithm, self.memory)
            if memory is not None and memory < self.m + 1:
                raise ValueError(f"memory {memory} for {algorithm} cannot hold a root-to-goal path of {self.m + 1} nodes")
        return self

    @property
    def m(self) -> int:
        return 2 * self.num_tx

    @property
    def needs_model(self) -> bool:
        return any(split_algorithm(a)[0] in LEARNED_ALGORITHMS for a in self.algorithms)

    def header(self) -> str:
        return config_header(self)


class ScalingConfig(BaseModel):
    """Visited-node scaling over square antenna configurations at one SNR."""
    model_config = ConfigDict(frozen=True)

    sizes: Tuple[int, ...] = (4, 6, 8)
    snr_db: float = Field(default=15.0, allow_inf_nan=False)
    trials: int = Field(default=500, ge=1)
    algorithms: Tuple[str, ...] = ('astar-zero', 'hats')
    memory: Optional[int] = Field(default=None, ge=1)
    model_dir: str = DEFAULT_MODEL_DIR
    final_relu: bool = True
    order: SuccessorOrder = SuccessorOrder.BRANCH_COST
    seed: int = Field(default=0, ge=0)
    out: Optional[str] = None

    @field_validator('algorithms')
    @classmethod
    def _valid_algorithms(cls, value: Tuple[str, ...]) -> Tuple[str, ...]:
        return _check_algorithms(value)

    @field_validator('sizes')
    @classmethod
    def _valid_sizes(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if not value or any(n < 1 for n in value):
            raise ValueError(f"antenna sizes must be a nonempty list of positive counts, got {value}")
        return value

    def model_path(self, n: int) -> Path:
        return Path(self.model_dir) / model_filename(n, n)

    def point(self, n: int) -> SweepConfig:
        """The single-SNR sweep for an n x n system."""
        needs_model = any(split_algorithm(a)[0] in LEARNED_ALGORITHMS for a in self.algorithms)
        return SweepConfig(
            num_tx=n, num_rx=n, snr_list=(self.snr_db,), trials=self.trials,
            algorithms=self.algorithms, memory=self.memory,
            model_path=str(self.model_path(n)) if needs_model else None,
            final_relu=self.final_relu, order=self.order, seed=self.seed,
        )

    def header(self) -> str:
        return config_header(self)


class OracleCheckConfig(BaseModel):
    """Invariant suites on random QPSK instances of real dimension `size`."""
    model_config = ConfigDict(frozen=True)

    size: int = Field(default=8, ge=2, le=20)
    instances: int = Field(default=200, ge=1)
    seed: int = Field(default=0, ge=0)
    snr_low: float = Field(default=0.0, allow_inf_nan=False)
    snr_high: float = Field(default=15.0, allow_inf_nan=False)
    memory_slack: int = Field(default=1, ge=0)
    consistency_depth: int = Field(default=8, ge=0)
    expansion_tolerance: int = Field(default=1, ge=0)

    @model_validator(mode='after')
    def _check(self) -> 'OracleCheckConfig':
        if self.size % 2:
            raise ValueError(f"size is the real dimension 2*Nt and must be even, got {self.size}")
        if self.snr_low > self.snr_high:
            raise ValueError(f"snr_low ({self.snr_low}) must be <= snr_high ({self.snr_high})")
        return self

    @property
    def num_tx(self) -> int:
        return self.size // 2

    @property
    def memory(self) -> int:
        """Bounded ACTIVE capacity, m + 1 + memory_slack."""
        return self.size + 1 + self.memory_slack


def config_header(cfg: BaseModel) -> str:
    """
    Sorted-key JSON of the configuration with the SNR calibration.

    The output path is left out and model locations are reduced to their file names,
    so the header depends only on what was simulated.
    """
    payload = cfg.model_dump(mode='json', exclude={'out'})
    for key in ('model_path', 'model_dir'):
        if payload.get(key) is not None:
            payload[key] = Path(payload[key]).name
    payload['snr_calibration'] = SNR_CALIBRATION
    return json.dumps(payload, sort_keys=True)


def worker_count() -> int:
    """Worker cap from HATS_THREADS (.env honoured), defaulting to the machine's parallelism."""
    load_dotenv()
    raw = os.getenv("HATS_THREADS")
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"HATS_THREADS must be a positive integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"HATS_THREADS must be a positive integer, got {raw!r}")
    return value


def parse_snr_range(text: str) -> Tuple[float, ...]:
    """
    Parse "lo:hi:step" (hi included up to rounding) or a single value.

    >>> parse_snr_range("5:15:2.5")
    (5.0, 7.5, 10.0, 12.5, 15.0)
    """
    parts = text.strip().split(':')
    try:
        values = [float(v) for v in parts]
    except ValueError:
        raise ConfigError(f"bad SNR range {text!r}; expected lo:hi:step or a number")
    if not all(math.isfinite(v) for v in values):
        raise ConfigError(f"SNR range {text!r} must be finite")
    if len(values) == 1:
        return (values[0],)
    if len(values) != 3:
        raise ConfigError(f"bad SNR range {text!r}; expected lo:hi:step or a number")
    lo, hi, step = values
    if step <= 0 or lo > hi:
        raise ConfigError(f"SNR range {text!r} needs lo <= hi and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(round(lo + i * step, 10) for i in range(count))


def parse_int_list(text: str, what: str) -> Tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(',') if v.strip())
    except ValueError:
        raise ConfigError(f"bad {what} list {text!r}; expected comma-separated integers")
    if not values:
        raise ConfigError(f"{what} list must not be empty")
    return values


def parse_memory(text: str) -> Optional[int]:
    """An ACTIVE bound, or None for "inf"/"unbounded"."""
    if text.strip().lower() in ('inf', 'unbounded', 'none'):
        return None
    try:
        value = int(text)
    except ValueError:
        raise ConfigError(f"bad memory bound {text!r}; expected an integer or 'inf'")
    if value < 1:
        raise ConfigError(f"memory bound must be positive, got {value}")
    return value
