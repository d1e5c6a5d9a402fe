"""Deterministic synthetic rasters for tests, demos and benchmarks."""
from __future__ import annotations

import numpy as np


def _grid(n):
    y, x = np.mgrid[0:n, 0:n].astype(np.float64)
    return y, x


def disk(n=128):
    y, x = _grid(n)
    r = np.hypot(x - n * 0.55, y - n * 0.45)
    return np.where(r < n * 0.25, 200.0, 40.0) + 0.15 * x


def square(n=128):
    img = np.full((n, n), 30.0)
    a, b = n * 3 // 8, n * 5 // 8
    img[a:b, a + 4:b + 4] = 220.0
    return img


def step(n=128):
    img = np.zeros((n, n))
    img[:, n // 2:] = 255.0
    return img


def rings(n=128):
    y, x = _grid(n)
    r = np.hypot(x - n / 2, y - n / 2)
    return 128 + 90 * np.cos(r / 3.0) * np.exp(-r / n)


def checker(n=128, cell=12):
    y, x = _grid(n)
    return np.where(((x // cell) + (y // cell)) % 2 == 0, 60.0, 190.0)


def shapes(n=128):
    y, x = _grid(n)
    img = 50 + 60 * x / n
    img[np.hypot(x - 35, y - 40) < 18] = 230
    img[(abs(x - 90) < 14) & (abs(y - 85) < 22)] = 15
    tri = (y > 70) & (y < 115) & (abs(x - 35) < (y - 70) * 0.6)
    img[tri] = 170
    return img


def stripes(n=128):
    y, x = _grid(n)
    img = np.full((n, n), 110.0)
    band = (x > n * 0.2) & (x < n * 0.8) & (y > n * 0.3) & (y < n * 0.7)
    img[band] = 128 + 100 * np.sign(np.sin(x[band] * 2 * np.pi / 7 + y[band] * 0.3))
    return img


def texture(n=128, seed=3):
    rng = np.random.default_rng(seed)
    y, x = _grid(n)
    img = 120 + 40 * np.sin(x / 9.0) * np.cos(y / 13.0) + rng.normal(0, 6, (n, n))
    img[np.hypot(x - n / 2, y - n / 2) < n / 5] += 70
    return img


SYNTHETIC = {
    "disk": disk, "square": square, "step": step, "rings": rings,
    "checker": checker, "shapes": shapes, "stripes": stripes, "texture": texture,
}


def synthetic_corpus(n=128) -> dict[str, np.ndarray]:
    """The eight synthetic rasters as uint8 arrays."""
    return {k: np.clip(np.rint(f(n)), 0, 255).astype(np.uint8) for k, f in SYNTHETIC.items()}
