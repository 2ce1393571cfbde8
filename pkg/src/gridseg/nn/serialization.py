"""GSEG model files.

Layout: magic ``GSEG``, u32 format version, u32 filters, u32 residual blocks,
u32 input channels, every parameter in layout order as little-endian float32
(running statistics included), then a u32 CRC32 of everything before it.
"""

import logging
import struct
import zlib
from pathlib import Path
from typing import Union

import numpy as np

from gridseg.exceptions import ModelFormatError
from gridseg.nn.network import GridsNet, parameter_count

logger = logging.getLogger(__name__)

MODEL_MAGIC = b'GSEG'
FORMAT_VERSION = 1
_HEADER = struct.Struct('<4sIIII')
_CHECKSUM = struct.Struct('<I')
_WIRE_DTYPE = np.dtype('<f4')


def encode_model(model: GridsNet) -> bytes:
    parts = [_HEADER.pack(MODEL_MAGIC, FORMAT_VERSION, model.filters, model.blocks, model.in_channels)]
    for value in model.params.values():
        parts.append(np.ascontiguousarray(value, dtype=_WIRE_DTYPE).tobytes())
    body = b''.join(parts)
    return body + _CHECKSUM.pack(zlib.crc32(body))


def decode_model(blob: bytes) -> GridsNet:
    if len(blob) < _HEADER.size + _CHECKSUM.size:
        raise ModelFormatError("Model file is truncated")
    magic, version, filters, blocks, in_channels = _HEADER.unpack_from(blob)
    if magic != MODEL_MAGIC:
        raise ModelFormatError(f"Not a model file (magic {magic!r})")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"Unsupported model format version {version} (expected {FORMAT_VERSION})")
    if filters < 1 or in_channels < 1:
        raise ModelFormatError(f"Invalid architecture in header: filters={filters} in_channels={in_channels}")

    expected = _HEADER.size + parameter_count(filters, blocks, in_channels) * _WIRE_DTYPE.itemsize + _CHECKSUM.size
    if len(blob) != expected:
        raise ModelFormatError(f"Model file has {len(blob)} bytes, expected {expected}")
    body, (stored,) = blob[:-_CHECKSUM.size], _CHECKSUM.unpack_from(blob, len(blob) - _CHECKSUM.size)
    if zlib.crc32(body) != stored:
        raise ModelFormatError("Model checksum mismatch")

    model = GridsNet(filters, blocks, in_channels)
    offset = _HEADER.size
    state = {}
    for name, value in model.params.items():
        count = value.size
        state[name] = np.frombuffer(body, dtype=_WIRE_DTYPE, count=count, offset=offset).reshape(value.shape)
        offset += count * _WIRE_DTYPE.itemsize
    model.load_state_dict(state)
    return model


def save_model(model: GridsNet, path: Union[str, Path]) -> None:
    blob = encode_model(model)
    Path(path).write_bytes(blob)
    logger.debug("Saved model (%d parameters, %d bytes) to %s", model.count_parameters(), len(blob), path)


def load_model(path: Union[str, Path]) -> GridsNet:
    try:
        blob = Path(path).read_bytes()
    except OSError as e:
        raise ModelFormatError(f"Cannot read model file {path}: {e}") from e
    return decode_model(blob)
