"""Decoder-reproducible detection of critical pixels.

The critical mask is the intersection of an edge skeleton (Canny), a
region of interest (spectral-residual saliency) and a set of pixels where
the soft decoder had to move the base layer a lot.  Everything is computed
from the decoded base layer and its soft decode, so the encoder and the
decoder arrive at the same pixel list without any side information.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import InvalidParameterError


@dataclass(frozen=True)
class MaskParams:
    canny_sigma: float = 1.4
    canny_low: float = 0.1
    canny_high: float = 0.3
    saliency_threshold: float = 0.25
    saliency_dilation: int = 2
    tau_e: float = 4.0
    rho: float = 0.02

    def __post_init__(self):
        if not 0 < self.canny_low < self.canny_high <= 1:
            raise InvalidParameterError("need 0 < canny_low < canny_high <= 1")
        if not 0 < self.rho <= 1:
            raise InvalidParameterError("rho must lie in (0, 1]")
        if self.canny_sigma <= 0 or self.tau_e < 0 or self.saliency_dilation < 0:
            raise InvalidParameterError("invalid mask parameters")

    def budget(self, width: int, height: int) -> int:
        return int(np.ceil(self.rho * width * height))


@dataclass(frozen=True)
class CriticalSet:
    """Critical pixel coordinates in rank order, with values read from an image."""
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.rows)

    @property
    def coords(self) -> list[tuple[int, int]]:
        return list(zip(self.rows.tolist(), self.cols.tolist()))

    def mask(self, shape) -> np.ndarray:
        m = np.zeros(shape, dtype=bool)
        m[self.rows, self.cols] = True
        return m

    def read(self, img) -> np.ndarray:
        return np.asarray(img, dtype=np.float64)[self.rows, self.cols]


def _gaussian_kernel(sigma, radius):
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-x * x / (2.0 * sigma * sigma))
    return k / k.sum()


def _separable(img, k):
    out = ndimage.correlate1d(img, k, axis=0, mode="nearest")
    return ndimage.correlate1d(out, k, axis=1, mode="nearest")


def sobel_gradients(img, sigma: float = 1.4):
    """Gaussian-blur (5x5) then Sobel; returns (gx, gy) with x along columns."""
    a = _separable(np.asarray(img, dtype=np.float64), _gaussian_kernel(sigma, 2))
    gx = ndimage.correlate(a, np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], float), mode="nearest")
    gy = ndimage.correlate(a, np.array([[-1, -2, -1], [0, 0, 0], [1, 2, 1]], float), mode="nearest")
    return gx, gy


def gradient_magnitude(img, sigma: float = 1.4) -> np.ndarray:
    gx, gy = sobel_gradients(img, sigma)
    return np.hypot(gx, gy)


def _non_max_suppression(mag, gx, gy):
    h, w = mag.shape
    # direction bins: 0 -> horizontal gradient, 1 -> 45 deg, 2 -> vertical, 3 -> 135 deg
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    sector = (np.floor((angle + 22.5) / 45.0).astype(int)) % 4
    offsets = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}
    p = np.pad(mag, 1, mode="constant")
    keep = np.zeros_like(mag, dtype=bool)
    for s, (dy, dx) in offsets.items():
        ahead = p[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]
        behind = p[1 - dy:1 - dy + h, 1 - dx:1 - dx + w]
        # strict on one side only, so plateaus of width two thin to one pixel
        keep |= (sector == s) & (mag > behind) & (mag >= ahead)
    return keep & (mag > 0)


def canny_edges(img, params: MaskParams = MaskParams(), return_magnitude: bool = False):
    """Binary Canny edge map with thresholds relative to the max gradient."""
    gx, gy = sobel_gradients(img, params.canny_sigma)
    mag = np.hypot(gx, gy)
    peak = mag.max()
    if peak <= 0:
        edges = np.zeros(mag.shape, dtype=bool)
        return (edges, mag) if return_magnitude else edges
    thin = _non_max_suppression(mag, gx, gy)
    strong = thin & (mag >= params.canny_high * peak)
    weak = thin & (mag >= params.canny_low * peak)
    labels, n = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    if n:
        hit = np.zeros(n + 1, dtype=bool)
        hit[np.unique(labels[strong])] = True
        hit[0] = False
        edges = hit[labels]
    else:
        edges = weak
    return (edges, mag) if return_magnitude else edges


def resize_bilinear(img, shape) -> np.ndarray:
    """Bilinear resampling with pixel-center alignment and edge clamping."""
    a = np.asarray(img, dtype=np.float64)
    out = a
    for axis, n_out in enumerate(shape):
        n_in = out.shape[axis]
        pos = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
        pos = np.clip(pos, 0, n_in - 1)
        lo = np.floor(pos).astype(int)
        hi = np.minimum(lo + 1, n_in - 1)
        t = pos - lo
        shape_t = [1, 1]
        shape_t[axis] = n_out
        t = t.reshape(shape_t)
        out = np.take(out, lo, axis=axis) * (1 - t) + np.take(out, hi, axis=axis) * t
    return out


def _disk(radius):
    y, x = np.mgrid[-radius:radius + 1, -radius:radius + 1]
    return x * x + y * y <= radius * radius


def spectral_saliency(img, params: MaskParams = MaskParams(), size: int = 64):
    """Spectral-residual saliency; returns (score map, ROI mask)."""
    a = np.asarray(img, dtype=np.float64)
    small = resize_bilinear(a, (size, size))
    small = small - small.mean()
    spec = np.fft.fft2(small)
    amp = np.abs(spec)
    nonzero = amp > 1e-9 * max(amp.max(), 1.0)
    if not nonzero.any():
        score = np.zeros(a.shape)
        return score, np.zeros(a.shape, dtype=bool)
    log_amp = np.log1p(amp)
    residual = log_amp - ndimage.uniform_filter(log_amp, size=3, mode="wrap")
    # bins with no energy carry no phase; they stay empty
    recon = np.where(nonzero, np.exp(residual) * np.exp(1j * np.angle(spec)), 0)
    sal = np.abs(np.fft.ifft2(recon)) ** 2
    sal = ndimage.gaussian_filter(sal, 2.5, mode="nearest")
    score = np.maximum(resize_bilinear(sal, a.shape), 0.0)
    peak = score.max()
    if peak <= 0:
        return score, np.zeros(a.shape, dtype=bool)
    roi = score >= params.saliency_threshold * peak
    if params.saliency_dilation > 0:
        roi = ndimage.binary_dilation(roi, structure=_disk(params.saliency_dilation))
    return score, roi


def change_map(base, soft) -> np.ndarray:
    b = np.asarray(base, dtype=np.float64)
    s = np.asarray(soft, dtype=np.float64)
    if b.shape != s.shape:
        raise InvalidParameterError(f"shape mismatch: {b.shape} vs {s.shape}")
    return np.abs(s - b)


@dataclass(frozen=True)
class Detection:
    """Intermediate maps behind a CriticalSet, kept for inspection and metrics."""
    edges: np.ndarray
    roi: np.ndarray
    error: np.ndarray
    candidates: np.ndarray
    critical: CriticalSet


def detect(base, soft, params: MaskParams = MaskParams()) -> Detection:
    base = np.asarray(base, dtype=np.float64)
    soft = np.asarray(soft, dtype=np.float64)
    change = change_map(base, soft)
    edges, mag = canny_edges(base, params, return_magnitude=True)
    sal, roi = spectral_saliency(base, params)
    err = change >= params.tau_e
    cand = edges & roi & err
    idx = np.flatnonzero(cand)
    score = np.ones(idx.size)
    for factor in (mag, sal, change):
        v = factor.ravel()[idx]
        top = v.max(initial=0.0)
        if top > 0:
            score = score * (v / top)
    n_c = min(params.budget(base.shape[1], base.shape[0]), idx.size)
    order = np.lexsort((idx, -score))[:n_c]
    chosen = idx[order]
    rows, cols = np.divmod(chosen, base.shape[1])
    crit = CriticalSet(rows.astype(np.int64), cols.astype(np.int64), soft[rows, cols])
    return Detection(edges, roi, err, cand, crit)


def detect_critical(base, soft, params: MaskParams = MaskParams()) -> CriticalSet:
    """Top-ranked pixels of edges & ROI & (|soft - base| >= tau_e).

    Ranked by the product of gradient magnitude, saliency and change, each
    divided by its maximum over the candidates; ties go to the lower raster
    index.  Values are read from ``soft``.
    """
    return detect(base, soft, params).critical
