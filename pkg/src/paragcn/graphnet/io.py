"""Binary model files.

Layout (little endian)::

    b"PGCNMODL"  magic
    u32          format version
    u32 + bytes  config as UTF-8 JSON
    u32          tensor count
    per tensor:  u16 name length, name, u8 dtype code, u8 ndim, u32 dims..., raw values
    u32          CRC32 of everything above
"""
from __future__ import annotations

import json
import struct
import zlib
from pathlib import Path

import numpy as np

from .model import GcnConfig, GcnModel, param_shapes

MAGIC = b"PGCNMODL"
VERSION = 1
_DTYPES = {1: np.dtype("<f4"), 2: np.dtype("<f8")}
_CODES = {v: k for k, v in _DTYPES.items()}


class ModelFormatError(ValueError):
    """Unreadable or mismatched model file; ``field`` names the culprit."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def model_to_bytes(model: GcnModel) -> bytes:
    cfg = json.dumps(model.config.to_dict(), sort_keys=True).encode()
    out = [MAGIC, struct.pack("<II", VERSION, len(cfg)), cfg, struct.pack("<I", len(model.params))]
    for name in sorted(model.params):
        w = model.params[name]
        dt = w.dtype.newbyteorder("<")
        if dt not in _CODES:
            raise ValueError(f"{name}: unsupported dtype {w.dtype}")
        raw = name.encode()
        out.append(struct.pack("<H", len(raw)) + raw)
        out.append(struct.pack("<BB", _CODES[dt], w.ndim) + struct.pack(f"<{w.ndim}I", *w.shape))
        out.append(np.ascontiguousarray(w, dtype=dt).tobytes())
    body = b"".join(out)
    return body + struct.pack("<I", zlib.crc32(body))


def model_from_bytes(data: bytes, expect: GcnConfig | dict | None = None) -> GcnModel:
    if len(data) < len(MAGIC) + 16 or data[:len(MAGIC)] != MAGIC:
        raise ModelFormatError("magic", "not a model file")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != crc:
        raise ModelFormatError("checksum", "CRC32 mismatch; file is corrupted")
    pos = len(MAGIC)
    version, n = struct.unpack_from("<II", body, pos)
    if version != VERSION:
        raise ModelFormatError("version", f"format version {version}, expected {VERSION}")
    pos += 8
    config = GcnConfig(**json.loads(body[pos:pos + n]))
    pos += n
    if expect is not None:
        want = expect.to_dict() if isinstance(expect, GcnConfig) else dict(expect)
        for key, val in want.items():
            if getattr(config, key) != val:
                raise ModelFormatError(f"config.{key}", f"file has {getattr(config, key)!r}, expected {val!r}")
    (count,) = struct.unpack_from("<I", body, pos)
    pos += 4
    params = {}
    for _ in range(count):
        (ln,) = struct.unpack_from("<H", body, pos)
        name = body[pos + 2:pos + 2 + ln].decode()
        pos += 2 + ln
        code, ndim = struct.unpack_from("<BB", body, pos)
        pos += 2
        shape = struct.unpack_from(f"<{ndim}I", body, pos)
        pos += 4 * ndim
        dt = _DTYPES.get(code)
        if dt is None:
            raise ModelFormatError(f"tensor.{name}", f"unknown dtype code {code}")
        size = int(np.prod(shape)) * dt.itemsize
        params[name] = np.frombuffer(body, dtype=dt, count=int(np.prod(shape)), offset=pos).reshape(shape).copy()
        pos += size
    if pos != len(body):
        raise ModelFormatError("length", f"{len(body) - pos} trailing bytes")
    shapes = param_shapes(config)
    if set(shapes) != set(params):
        raise ModelFormatError("tensors", "tensor names do not match the config")
    for k, s in shapes.items():
        if params[k].shape != s:
            raise ModelFormatError(f"tensor.{k}", f"shape {params[k].shape}, expected {s}")
    return GcnModel(config, params)


def save_model(model: GcnModel, path) -> int:
    data = model_to_bytes(model)
    Path(path).write_bytes(data)
    return len(data)


def load_model(path, expect: GcnConfig | dict | None = None) -> GcnModel:
    """Load a model; ``expect`` (e.g. ``{"head_type": "edge_binary"}``)
    is checked field by field against the stored config."""
    return model_from_bytes(Path(path).read_bytes(), expect)
