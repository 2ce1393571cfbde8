"""Encode/decode GridTensors as GRDT blobs."""

import struct
from pathlib import Path
from typing import Union

import numpy as np

from gridseg.exceptions import ModelFormatError

TENSOR_MAGIC = b'GRDT'
_HEADER = struct.Struct('<4sIII')
_WIRE_DTYPE = np.dtype('<f4')


def encode_tensor(tensor) -> bytes:
    """Serialize to magic, u32 rows, cols, channels and row-major little-endian float32."""
    header = _HEADER.pack(TENSOR_MAGIC, tensor.rows, tensor.cols, tensor.channels)
    return header + np.ascontiguousarray(tensor.data, dtype=_WIRE_DTYPE).tobytes()


def decode_tensor(blob: bytes):
    from gridseg.services.encoding_service import GridTensor
    if len(blob) < _HEADER.size:
        raise ModelFormatError("Tensor blob is truncated")
    magic, rows, cols, channels = _HEADER.unpack_from(blob)
    if magic != TENSOR_MAGIC:
        raise ModelFormatError(f"Bad tensor magic {magic!r}")
    expected = _HEADER.size + rows * cols * channels * _WIRE_DTYPE.itemsize
    if len(blob) != expected:
        raise ModelFormatError(f"Tensor blob has {len(blob)} bytes, expected {expected}")
    data = np.frombuffer(blob, dtype=_WIRE_DTYPE, offset=_HEADER.size).reshape(rows, cols, channels)
    return GridTensor(data.astype(np.float32))


def write_tensor(tensor, path: Union[str, Path]) -> None:
    Path(path).write_bytes(encode_tensor(tensor))


def read_tensor(path: Union[str, Path]):
    return decode_tensor(Path(path).read_bytes())
