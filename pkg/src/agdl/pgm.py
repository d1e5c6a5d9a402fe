"""Binary PGM (P5) reading and writing for 8-bit single-channel images."""
from __future__ import annotations

import os
import re

import numpy as np

from .errors import InvalidParameterError, MalformedPayloadError

_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*([^\s#]+)")


def to_uint8(img) -> np.ndarray:
    """Round half away from zero and clamp to [0, 255]."""
    a = np.asarray(img, dtype=np.float64)
    r = np.sign(a) * np.floor(np.abs(a) + 0.5)
    return np.clip(r, 0, 255).astype(np.uint8)


def parse_pgm(data: bytes) -> np.ndarray:
    pos = 0
    fields = []
    for _ in range(4):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise MalformedPayloadError("truncated PGM header", pos)
        fields.append(m.group(1))
        pos = m.end()
    if fields[0] != b"P5":
        raise MalformedPayloadError("not a binary PGM (P5) file", 0)
    try:
        width, height, maxval = (int(f) for f in fields[1:])
    except ValueError:
        raise MalformedPayloadError("non-numeric PGM header field", pos) from None
    if not (0 < maxval < 256):
        raise MalformedPayloadError(f"unsupported maxval {maxval}", pos)
    # exactly one whitespace byte separates the header from the raster
    pos += 1
    n = width * height
    raster = data[pos:pos + n]
    if len(raster) != n:
        raise MalformedPayloadError("truncated PGM raster", pos + len(raster))
    img = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    if maxval != 255:
        img = to_uint8(img.astype(np.float64) * (255.0 / maxval))
    return img.copy()


def format_pgm(img) -> bytes:
    a = np.asarray(img)
    if a.ndim != 2:
        raise InvalidParameterError("PGM images must be 2-D")
    if a.dtype != np.uint8:
        a = to_uint8(a)
    h, w = a.shape
    return b"P5\n%d %d\n255\n" % (w, h) + a.tobytes()


def read_pgm(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as f:
        return parse_pgm(f.read())


def write_pgm(path: str | os.PathLike, img) -> None:
    with open(path, "wb") as f:
        f.write(format_pgm(img))
