"""Artifact removal for the base layer by projections onto convex sets.

Each iteration smooths in the pixel domain with a bilateral filter and then
projects back onto the set of images whose block-DCT coefficients fall
inside the quantization bins signalled by the base layer.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base_codec import BLOCK, DctGrid, block_dct, block_idct, pad_to_blocks
from .errors import InvalidParameterError


@dataclass(frozen=True)
class PocsParams:
    iterations: int = 8
    sigma_spatial: float = 2.0
    sigma_range: float = 20.0
    window: int = 5

    def __post_init__(self):
        if self.iterations < 1:
            raise InvalidParameterError("iterations must be >= 1")
        if not (self.sigma_spatial > 0 and self.sigma_range > 0):
            raise InvalidParameterError("bilateral sigmas must be positive")
        if self.window < 1 or self.window % 2 == 0:
            raise InvalidParameterError("window must be a positive odd size")


def smooth_pixels(img, params: PocsParams = PocsParams()) -> np.ndarray:
    """Bilateral filter with edge replication; returns float64."""
    a = np.asarray(img, dtype=np.float64)
    r = params.window // 2
    padded = np.pad(a, r, mode="edge")
    h, w = a.shape
    num = np.zeros_like(a)
    den = np.zeros_like(a)
    inv_s = 1.0 / (2.0 * params.sigma_spatial ** 2)
    inv_r = 1.0 / (2.0 * params.sigma_range ** 2)
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            shifted = padded[r + dy:r + dy + h, r + dx:r + dx + w]
            wgt = np.exp(-(dy * dy + dx * dx) * inv_s - (shifted - a) ** 2 * inv_r)
            num += wgt * shifted
            den += wgt
    return num / den


def project_dct_bins(img, grid: DctGrid, table, clamp: bool = True) -> np.ndarray:
    """Clamp every block-DCT coefficient into its quantization bin.

    ``img`` may be either the image size recorded in ``grid`` (it is padded
    by edge replication and cropped back) or the padded canvas size.  With
    ``clamp`` the result is also clipped to [0, 255], which can push
    coefficients back out of their bins.
    """
    a = np.asarray(img, dtype=np.float64)
    if a.shape == grid.padded_shape:
        canvas, crop = a, False
    elif a.shape == (grid.height, grid.width):
        canvas, crop = pad_to_blocks(a), True
    else:
        raise InvalidParameterError(
            f"image shape {a.shape} matches neither {(grid.height, grid.width)} "
            f"nor padded {grid.padded_shape}")
    q = np.asarray(table, dtype=np.float64)
    k = grid.coeffs
    coeffs = block_dct(canvas - 128.0)
    coeffs = np.clip(coeffs, (k - 0.5) * q, (k + 0.5) * q)
    out = block_idct(coeffs) + 128.0
    if clamp:
        out = np.clip(out, 0.0, 255.0)
    if crop:
        out = out[:grid.height, :grid.width]
    return out


def soft_decode(base, grid: DctGrid, table, params: PocsParams = PocsParams()) -> np.ndarray:
    """Restore a decoded base layer; returns a real-valued image.

    The iteration runs on the padded block canvas.  The final projection is
    left unclamped so that every coefficient of the output lies in its bin.
    """
    x = pad_to_blocks(base)
    if x.shape != grid.padded_shape:
        raise InvalidParameterError("base image does not match the DCT grid")
    for i in range(params.iterations):
        x = smooth_pixels(x, params)
        x = project_dct_bins(x, grid, table, clamp=i < params.iterations - 1)
    return x[:grid.height, :grid.width]


def bin_violation(img, grid: DctGrid, table) -> float:
    """Largest distance of any block coefficient outside its bin (0 when consistent)."""
    a = np.asarray(img, dtype=np.float64)
    canvas = a if a.shape == grid.padded_shape else pad_to_blocks(a)
    q = np.asarray(table, dtype=np.float64)
    c = block_dct(canvas - 128.0)
    lo = (grid.coeffs - 0.5) * q
    hi = (grid.coeffs + 0.5) * q
    return float(np.max(np.maximum(lo - c, 0) + np.maximum(c - hi, 0), initial=0.0))
