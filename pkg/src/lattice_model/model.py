"""
Problem model for tree-search detection.

After preprocessing, z and R are stored in level order: index k-1 holds level k, the k-th
processed decision, so z[k-1] = z_k and R[k-1, j-1] = r_{k,j} with r_{k,j} = 0 for j > k.
Level 1 is the last row of the natural upper-triangular system, level m the first.
A goal-level PSV lists its symbols [x_m, ..., x_1], which is the natural order of x.
"""

from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np

from src.core_linalg import Matrix, Vector, qr_thin
from src.errors import DimensionMismatch, LevelOutOfRange, NotDescendant


@dataclass(frozen=True)
class Alphabet:
    """Strictly ascending finite symbol set."""
    symbols: Tuple[float, ...]

    def __post_init__(self):
        symbols = tuple(float(s) for s in self.symbols)
        if not symbols:
            raise ValueError("alphabet must be nonempty")
        if any(b <= a for a, b in zip(symbols, symbols[1:])):
            raise ValueError(f"alphabet must be strictly ascending, got {symbols}")
        object.__setattr__(self, 'symbols', symbols)

    @classmethod
    def qpsk(cls) -> 'Alphabet':
        """Real decomposition of 4-QAM."""
        return cls((-1.0, 1.0))

    @property
    def size(self) -> int:
        return len(self.symbols)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.symbols, dtype=np.float64)

    def nearest(self, v) -> np.ndarray:
        """Per-component nearest symbol; ties go to the smaller symbol."""
        v = np.asarray(v, dtype=np.float64)
        table = self.as_array()
        idx = np.argmin(np.abs(v[:, np.newaxis] - table[np.newaxis, :]), axis=1)
        return table[idx]


@dataclass(frozen=True, slots=True)
class PartialSignalVector:
    """A path of k decisions stored deepest-first: (x_k, ..., x_1). Level 0 is the root."""
    symbols: Tuple[float, ...] = ()

    @property
    def level(self) -> int:
        return len(self.symbols)

    @classmethod
    def root(cls) -> 'PartialSignalVector':
        return cls(())

    def child(self, symbol: float) -> 'PartialSignalVector':
        return PartialSignalVector((float(symbol),) + self.symbols)

    def prefix(self, level: int) -> 'PartialSignalVector':
        """The ancestor at the given level."""
        if not 0 <= level <= self.level:
            raise LevelOutOfRange(f"level {level} outside [0, {self.level}]")
        return PartialSignalVector(self.symbols[self.level - level:])

    def level_order(self) -> np.ndarray:
        """Symbols as (x_1, ..., x_k)."""
        return np.asarray(self.symbols[::-1], dtype=np.float64)


PSV = PartialSignalVector


@dataclass(frozen=True, eq=False)
class DetectionProblem:
    """Preprocessed instance; immutable after construction."""
    z: Vector
    R: Matrix
    alphabet: Alphabet
    const_offset: float = 0.0
    m: int = field(init=False)

    def __post_init__(self):
        z = np.array(self.z, dtype=np.float64)
        R = np.array(self.R, dtype=np.float64)
        if z.ndim != 1 or R.shape != (z.shape[0], z.shape[0]):
            raise DimensionMismatch(f"z has shape {z.shape}, R has shape {R.shape}")
        if np.any(np.triu(R, 1) != 0.0):
            raise ValueError("R must be lower triangular in level order (r_kj = 0 for j > k)")
        z.setflags(write=False)
        R.setflags(write=False)
        object.__setattr__(self, 'z', z)
        object.__setattr__(self, 'R', R)
        object.__setattr__(self, 'm', int(z.shape[0]))

    def is_goal(self, psv: PSV) -> bool:
        return psv.level == self.m

    def to_natural(self, psv: PSV) -> np.ndarray:
        """Goal PSV as the natural-order signal vector."""
        if psv.level != self.m:
            raise LevelOutOfRange(f"expected a goal-level PSV (level {self.m}), got level {psv.level}")
        return np.asarray(psv.symbols, dtype=np.float64)

    def psv_from_natural(self, x) -> PSV:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.m,):
            raise DimensionMismatch(f"expected {self.m} symbols, got shape {x.shape}")
        return PSV(tuple(float(v) for v in x))


def widen_complex(yc, Hc) -> Tuple[Vector, Matrix]:
    """Real-valued equivalent of y_c = H_c x_c + w_c."""
    yc = np.asarray(yc, dtype=np.complex128)
    Hc = np.asarray(Hc, dtype=np.complex128)
    if yc.ndim != 1 or Hc.ndim != 2 or Hc.shape[0] != yc.shape[0]:
        raise DimensionMismatch(f"yc shape {yc.shape} incompatible with Hc shape {Hc.shape}")
    y = np.concatenate([yc.real, yc.imag])
    H = np.block([[Hc.real, -Hc.imag], [Hc.imag, Hc.real]])
    return y, H


def widen_vector(xc) -> Vector:
    xc = np.asarray(xc, dtype=np.complex128)
    return np.concatenate([xc.real, xc.imag])


def preprocess(y, H, alphabet: Alphabet = Alphabet.qpsk()) -> DetectionProblem:
    """QR-reduce (y, H) and store z = Q1^T y and R in level order."""
    y = np.asarray(y, dtype=np.float64)
    H = np.asarray(H, dtype=np.float64)
    if H.ndim != 2 or y.shape != (H.shape[0],):
        raise DimensionMismatch(f"y shape {y.shape} incompatible with H shape {H.shape}")
    Q1, R = qr_thin(H)
    z_natural = Q1.T @ y
    offset = float(y @ y - z_natural @ z_natural)
    return DetectionProblem(z=z_natural[::-1], R=R[::-1, ::-1], alphabet=alphabet, const_offset=offset)


def branch_cost(p: DetectionProblem, psv: PSV) -> float:
    """b(x^k) = (z_k - sum_{j<=k} r_{k,j} x_j)^2."""
    k = psv.level
    if not 1 <= k <= p.m:
        raise LevelOutOfRange(f"branch cost needs level in [1, {p.m}], got {k}")
    residual = p.z[k - 1] - p.R[k - 1, :k] @ psv.level_order()
    return float(residual * residual)


def successor_branch_costs(p: DetectionProblem, psv: PSV) -> np.ndarray:
    """Branch costs of every child of psv, indexed like p.alphabet.symbols."""
    k = psv.level
    if not 0 <= k < p.m:
        raise LevelOutOfRange(f"node at level {k} has no successors (m = {p.m})")
    centre = p.z[k] - p.R[k, :k] @ psv.level_order()
    return (centre - p.R[k, k] * p.alphabet.as_array()) ** 2


def path_cost(p: DetectionProblem, psv: PSV) -> float:
    """g(x^k), the cumulative branch cost from the root."""
    k = psv.level
    if not 0 <= k <= p.m:
        raise LevelOutOfRange(f"path cost needs level in [0, {p.m}], got {k}")
    if k == 0:
        return 0.0
    residual = p.z[:k] - p.R[:k, :k] @ psv.level_order()
    return float(residual @ residual)


def is_descendant(descendant: PSV, ancestor: PSV) -> bool:
    k = ancestor.level
    return descendant.level >= k and descendant.symbols[descendant.level - k:] == ancestor.symbols


def remaining_cost(p: DetectionProblem, psv_k: PSV, psv_m: PSV) -> float:
    """g(x^m) - g(x^k) for a goal descendant x^m of x^k."""
    if psv_m.level != p.m:
        raise LevelOutOfRange(f"expected a goal-level PSV (level {p.m}), got level {psv_m.level}")
    if not is_descendant(psv_m, psv_k):
        raise NotDescendant(f"{psv_m.symbols} does not extend {psv_k.symbols}")
    k = psv_k.level
    residual = p.z[k:] - p.R[k:, :] @ psv_m.level_order()
    return float(residual @ residual)


def quantize(p: Union[DetectionProblem, Alphabet], v: Sequence[float]) -> PSV:
    """Round a natural-order vector to the alphabet and return it as a goal PSV."""
    alphabet = p.alphabet if isinstance(p, DetectionProblem) else p
    v = np.asarray(v, dtype=np.float64)
    if isinstance(p, DetectionProblem) and v.shape != (p.m,):
        raise DimensionMismatch(f"expected {p.m} entries, got shape {v.shape}")
    return PSV(tuple(float(s) for s in alphabet.nearest(v)))
