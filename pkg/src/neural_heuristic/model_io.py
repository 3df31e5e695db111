"""
Binary model file.

Layout (little-endian, no padding): magic "HATSMLP1"; u32 count = L+1; count u32 layer
sizes; then for every layer W as float64 row-major followed by b as float64.
"""

import math
import struct
from pathlib import Path
from typing import BinaryIO, Optional, Union

import numpy as np

from src.errors import FormatViolation, SizeMismatch

from .mlp import MlpModel

MAGIC = b"HATSMLP1"
_U32 = struct.Struct('<I')
_F64 = np.dtype('<f8')

Destination = Union[str, Path, BinaryIO]


def encode_model(model: MlpModel) -> bytes:
    parts = [MAGIC, _U32.pack(len(model.layer_sizes))]
    parts.extend(_U32.pack(n) for n in model.layer_sizes)
    for W, b in zip(model.weights, model.biases):
        parts.append(np.ascontiguousarray(W, dtype=_F64).tobytes())
        parts.append(np.ascontiguousarray(b, dtype=_F64).tobytes())
    return b"".join(parts)


def decode_model(data: bytes, final_relu: bool = True, expected_inputs: Optional[int] = None) -> MlpModel:
    if data[:len(MAGIC)] != MAGIC:
        raise FormatViolation("bad magic, not a model file", 0)
    offset = len(MAGIC)

    def read_u32() -> int:
        nonlocal offset
        if offset + _U32.size > len(data):
            raise FormatViolation("truncated header", offset)
        value = _U32.unpack_from(data, offset)[0]
        offset += _U32.size
        return value

    count = read_u32()
    if count < 2:
        raise FormatViolation(f"need at least 2 layer sizes, found {count}", offset - _U32.size)
    sizes = []
    for _ in range(count):
        n = read_u32()
        if n == 0:
            raise FormatViolation("zero layer size", offset - _U32.size)
        sizes.append(n)
    if sizes[-1] != 1:
        raise SizeMismatch(f"output layer must have size 1, found {sizes[-1]}")
    if expected_inputs is not None and sizes[0] != expected_inputs:
        raise SizeMismatch(f"model has {sizes[0]} inputs, problem dimension is {expected_inputs}")

    def read_f64(shape) -> np.ndarray:
        nonlocal offset
        # python ints: header sizes can overflow int64 products
        n_values = math.prod(shape)
        nbytes = n_values * _F64.itemsize
        if nbytes > len(data) - offset:
            raise FormatViolation(f"truncated parameters, needed {nbytes} bytes", len(data))
        values = np.frombuffer(data, dtype=_F64, count=n_values, offset=offset)
        offset += nbytes
        return values.astype(np.float64).reshape(shape)

    weights, biases = [], []
    for l in range(1, count):
        weights.append(read_f64((sizes[l], sizes[l - 1])))
        biases.append(read_f64((sizes[l],)))
    if offset != len(data):
        raise SizeMismatch(f"{len(data) - offset} trailing bytes after the last layer")
    return MlpModel(tuple(sizes), weights, biases, final_relu)


def save_model(model: MlpModel, destination: Destination) -> None:
    payload = encode_model(model)
    if hasattr(destination, 'write'):
        destination.write(payload)
        return
    path = Path(destination)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(payload)


def load_model(source: Destination, final_relu: bool = True, expected_inputs: Optional[int] = None) -> MlpModel:
    """Read a model file; `final_relu` is not stored and is chosen at load time."""
    data = source.read() if hasattr(source, 'read') else Path(source).read_bytes()
    return decode_model(data, final_relu, expected_inputs)
