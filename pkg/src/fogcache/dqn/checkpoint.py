"""Flat binary checkpoint format for network parameters.

Layout (all integers little-endian uint32, floats little-endian float64):

    bytes 0..7   magic  b"FOGCKPT\\0"
    uint32       format version (currently 1)
    uint32       number of arrays
    per array:   uint32 ndim, then ndim uint32 dims
    then the arrays' data back to back, row-major

Round-trips are bit-exact.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"FOGCKPT\x00"
VERSION = 1


def save_params(path, arrays) -> None:
    """Write a parameter list to ``path`` in the flat binary format."""
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<II", VERSION, len(arrays)))
        for a in arrays:
            a = np.asarray(a)
            f.write(struct.pack("<I", a.ndim))
            f.write(struct.pack(f"<{a.ndim}I", *a.shape))
        for a in arrays:
            f.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load_params(path):
    """Read a parameter list written by :func:`save_params`."""
    with open(path, "rb") as f:
        data = f.read()
    if data[:8] != MAGIC:
        raise ValueError(f"{path}: not a fogcache checkpoint (bad magic)")
    version, n_arrays = struct.unpack_from("<II", data, 8)
    if version != VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    offset = 16
    shapes = []
    for _ in range(n_arrays):
        (ndim,) = struct.unpack_from("<I", data, offset)
        offset += 4
        shape = struct.unpack_from(f"<{ndim}I", data, offset)
        offset += 4 * ndim
        shapes.append(shape)
    arrays = []
    for shape in shapes:
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        nbytes = 8 * count
        if offset + nbytes > len(data):
            raise ValueError(f"{path}: truncated checkpoint")
        arr = np.frombuffer(data, dtype="<f8", count=count, offset=offset)
        arrays.append(arr.astype(np.float64).reshape(shape))
        offset += nbytes
    if offset != len(data):
        raise ValueError(f"{path}: trailing bytes in checkpoint")
    return arrays
