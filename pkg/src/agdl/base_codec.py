"""JPEG-like block-DCT base layer.

Images are 2-D numpy arrays (row-major, ``shape == (height, width)``).  The
coded grid always covers the image padded by edge replication to multiples
of 8.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn

from .entropy import entropy_decode, entropy_encode
from .errors import InvalidParameterError, MalformedPayloadError
from .pgm import to_uint8

BLOCK = 8

# Annex K luminance table, row-major
STD_LUMINANCE = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.int64)


def _zigzag_order(n=BLOCK):
    # raster index of the k-th zigzag position
    cells = sorted(((i, j) for i in range(n) for j in range(n)),
                   key=lambda p: (p[0] + p[1], p[1] if (p[0] + p[1]) % 2 == 0 else p[0]))
    return np.array([i * n + j for i, j in cells], dtype=np.int64)


ZIGZAG = _zigzag_order()
UNZIGZAG = np.argsort(ZIGZAG)

_PAYLOAD_HEAD = struct.Struct(">BHH")


def round_half_away(x):
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def scale_quant_table(quality: int) -> np.ndarray:
    """Quality-scaled 8x8 quantization table (row-major, int64)."""
    if not isinstance(quality, (int, np.integer)) or not 1 <= quality <= 100:
        raise InvalidParameterError(f"quality must be an integer in [1, 100], got {quality!r}")
    quality = int(quality)
    if quality < 50:
        # scale 5000/quality kept exact in integer arithmetic
        return np.clip((STD_LUMINANCE * 5000 + 50 * quality) // (100 * quality), 1, 255)
    s = 200 - 2 * quality
    return np.clip((STD_LUMINANCE * s + 50) // 100, 1, 255)


@dataclass(frozen=True)
class DctGrid:
    """Quantized coefficient indices for every 8x8 block.

    ``coeffs`` has shape ``(rows, cols, 8, 8)`` in natural (not zigzag) order.
    ``width``/``height`` are the unpadded image dimensions.
    """
    coeffs: np.ndarray
    width: int
    height: int

    @property
    def block_shape(self):
        return self.coeffs.shape[:2]

    @property
    def padded_shape(self):
        r, c = self.block_shape
        return r * BLOCK, c * BLOCK

    def dequantize(self, table) -> np.ndarray:
        return self.coeffs * np.asarray(table, dtype=np.float64)

    def __eq__(self, other):
        if not isinstance(other, DctGrid):
            return NotImplemented
        return (self.width, self.height) == (other.width, other.height) and np.array_equal(
            self.coeffs, other.coeffs)


@dataclass(frozen=True)
class BaseLayerPayload:
    quality: int
    width: int
    height: int
    data: bytes

    def to_bytes(self) -> bytes:
        return _PAYLOAD_HEAD.pack(self.quality, self.width, self.height) + self.data

    @classmethod
    def from_bytes(cls, raw: bytes) -> "BaseLayerPayload":
        if len(raw) < _PAYLOAD_HEAD.size:
            raise MalformedPayloadError("base payload shorter than its header", len(raw))
        q, w, h = _PAYLOAD_HEAD.unpack_from(raw)
        if not 1 <= q <= 100 or w == 0 or h == 0:
            raise MalformedPayloadError("invalid base payload header", 0)
        return cls(q, w, h, bytes(raw[_PAYLOAD_HEAD.size:]))


def pad_to_blocks(img) -> np.ndarray:
    a = np.asarray(img, dtype=np.float64)
    h, w = a.shape
    return np.pad(a, ((0, -h % BLOCK), (0, -w % BLOCK)), mode="edge")


def to_blocks(canvas: np.ndarray) -> np.ndarray:
    H, W = canvas.shape
    return canvas.reshape(H // BLOCK, BLOCK, W // BLOCK, BLOCK).swapaxes(1, 2)


def from_blocks(blocks: np.ndarray) -> np.ndarray:
    r, c = blocks.shape[:2]
    return blocks.swapaxes(1, 2).reshape(r * BLOCK, c * BLOCK)


def block_dct(canvas) -> np.ndarray:
    """Orthonormal 2-D DCT-II of every 8x8 block; returns (rows, cols, 8, 8)."""
    return dctn(to_blocks(np.asarray(canvas, dtype=np.float64)), type=2, norm="ortho", axes=(-2, -1))


def block_idct(coeffs) -> np.ndarray:
    return from_blocks(idctn(np.asarray(coeffs, dtype=np.float64), type=2, norm="ortho", axes=(-2, -1)))


def _check_image(img) -> np.ndarray:
    a = np.asarray(img)
    if a.ndim != 2 or a.size == 0:
        raise InvalidParameterError(f"expected a non-empty 2-D image, got shape {a.shape}")
    if a.shape[0] > 0xFFFF or a.shape[1] > 0xFFFF:
        raise InvalidParameterError("image dimensions must fit in 16 bits")
    return a


def quantize_image(img, quality: int) -> tuple[DctGrid, np.ndarray]:
    img = _check_image(img)
    table = scale_quant_table(quality)
    coeffs = block_dct(pad_to_blocks(img) - 128.0)
    k = round_half_away(coeffs / table).astype(np.int64)
    return DctGrid(k, img.shape[1], img.shape[0]), table


def encode_base(img, quality: int) -> tuple[BaseLayerPayload, DctGrid]:
    grid, _ = quantize_image(img, quality)
    zz = grid.coeffs.reshape(-1, 64)[:, ZIGZAG]
    payload = BaseLayerPayload(int(quality), grid.width, grid.height, entropy_encode(zz))
    return payload, grid


def reconstruct(grid: DctGrid, table) -> np.ndarray:
    """Real-valued pixels of the dequantized grid, cropped to image size."""
    canvas = block_idct(grid.dequantize(table)) + 128.0
    return canvas[:grid.height, :grid.width]


def decode_base(payload) -> tuple[np.ndarray, DctGrid, np.ndarray]:
    """Decode a base layer into ``(uint8 image, grid, table)``."""
    if isinstance(payload, (bytes, bytearray, memoryview)):
        payload = BaseLayerPayload.from_bytes(bytes(payload))
    table = scale_quant_table(payload.quality)
    rows = -(-payload.height // BLOCK)
    cols = -(-payload.width // BLOCK)
    zz = entropy_decode(payload.data, rows * cols)
    coeffs = zz[:, UNZIGZAG].reshape(rows, cols, BLOCK, BLOCK)
    grid = DctGrid(coeffs, payload.width, payload.height)
    return to_uint8(reconstruct(grid, table)), grid, table
