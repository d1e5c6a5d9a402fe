"""Rate-distortion harness: bpp against PSNR, ROI-PSNR and critical-pixel PSNR."""
from __future__ import annotations

import csv
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .container import AgdlConfig, decode_detailed, encode
from .errors import AgdlError, InvalidParameterError
from .pgm import read_pgm, to_uint8

log = logging.getLogger(__name__)

PSNR_CAP = 99.0
CSV_FIELDS = ("image", "quality", "variant", "bpp", "psnr", "roi_psnr", "crit_psnr", "n_c", "m")
VARIANTS = ("base", "soft", "full")
QUALITY_LADDER = tuple(range(10, 101, 10))


def psnr(a, b, mask=None) -> float:
    """PSNR in dB for 8-bit data, capped at 99 dB."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidParameterError(f"shape mismatch: {a.shape} vs {b.shape}")
    d = a - b
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != a.shape:
            raise InvalidParameterError("mask shape does not match the images")
        if not mask.any():
            raise InvalidParameterError("PSNR over an empty mask")
        d = d[mask]
    mse = float(np.mean(d * d))
    if mse == 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 20.0 * math.log10(255.0 / math.sqrt(mse)))


def _psnr_or_nan(a, b, mask):
    return psnr(a, b, mask) if mask.any() else math.nan


@dataclass(frozen=True)
class RdPoint:
    image: str
    quality: int
    variant: str
    bpp: float
    psnr: float
    roi_psnr: float
    crit_psnr: float
    n_c: int
    m: int
    bits: int = 0

    def row(self) -> list[str]:
        def f(x, digits):
            return "nan" if math.isnan(x) else f"{x:.{digits}f}"
        return [self.image, str(self.quality), self.variant, f(self.bpp, 6), f(self.psnr, 4),
                f(self.roi_psnr, 4), f(self.crit_psnr, 4), str(self.n_c), str(self.m)]


def evaluate(img, name: str, quality: int, config: AgdlConfig = AgdlConfig()) -> list[RdPoint]:
    """Encode once at ``quality`` and score the base, soft and full decodes."""
    img = np.asarray(img)
    b = encode(img, replace(config, quality=quality))
    res = decode_detailed(b)
    layers = res.layers
    n_pix = img.size
    roi = layers.detection.roi
    crit = layers.critical.mask(img.shape)
    base_bits = 8 * b.base_layer_bytes()
    full_bits = 8 * b.size_bytes()
    outputs = {
        "base": (layers.base, base_bits),
        "soft": (to_uint8(layers.soft), base_bits),
        "full": (to_uint8(res.refined), full_bits),
    }
    points = []
    for variant in VARIANTS:
        out, bits = outputs[variant]
        points.append(RdPoint(name, quality, variant, bits / n_pix, psnr(img, out),
                              _psnr_or_nan(img, out, roi), _psnr_or_nan(img, out, crit),
                              len(layers.critical), b.m, bits))
    return points


def _evaluate_file(args):
    path, quality, config = args
    name = Path(path).name
    try:
        img = read_pgm(path)
        return evaluate(img, name, quality, config), None
    except (OSError, AgdlError) as exc:
        return [], f"{name} q={quality}: {exc}"


def parse_ladder(spec: str) -> list[int]:
    """Parse ``start:stop:step`` (inclusive) or a comma list of qualities."""
    try:
        if ":" in spec:
            start, stop, step = (int(p) for p in spec.split(":"))
            if step <= 0:
                raise ValueError
            out = list(range(start, stop + 1, step))
        else:
            out = [int(p) for p in spec.split(",") if p.strip()]
    except ValueError:
        raise InvalidParameterError(f"bad quality ladder {spec!r}") from None
    if not out or any(not 1 <= q <= 100 for q in out):
        raise InvalidParameterError(f"qualities must lie in [1, 100]: {spec!r}")
    return out


def run_rd(image_dir, qualities=QUALITY_LADDER, config: AgdlConfig = AgdlConfig(),
           workers: int = 1) -> tuple[list[RdPoint], list[str]]:
    """Benchmark every ``*.pgm`` in ``image_dir``; returns (points, errors).

    Points are ordered by image name, then quality, then variant regardless
    of ``workers``.  Images that fail to load or code are reported in the
    error list and skipped.
    """
    paths = sorted(Path(image_dir).glob("*.pgm"), key=lambda p: p.name)
    jobs = [(str(p), int(q), config) for p in paths for q in sorted(qualities)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_evaluate_file, jobs))
    else:
        results = [_evaluate_file(j) for j in jobs]
    points, errors = [], []
    for pts, err in results:
        points.extend(pts)
        if err:
            log.warning("skipped %s", err)
            errors.append(err)
    order = {v: i for i, v in enumerate(VARIANTS)}
    points.sort(key=lambda p: (p.image, p.quality, order[p.variant]))
    return points, errors


def format_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for p in points:
        w.writerow(p.row())
    return buf.getvalue()


def write_csv(path: str | os.PathLike, points) -> None:
    with open(path, "w", newline="") as f:
        f.write(format_csv(points))
