"""Compressive sampling of critical pixels and least-norm refinement."""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, LinAlgError

from .errors import InvalidParameterError, MalformedPayloadError, RankFailureError

MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

PIVOT_TOL = 1e-9
MAX_SEED_ATTEMPTS = 16
CODE_LEVELS = 65535
MIN_STEP = 1e-6


def splitmix64(seed: int, count: int) -> np.ndarray:
    """First ``count`` outputs of SplitMix64 seeded with ``seed``."""
    with np.errstate(over="ignore"):
        k = np.arange(1, count + 1, dtype=np.uint64)
        z = np.uint64(seed & MASK64) + k * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class CsMatrix:
    matrix: np.ndarray
    seed: int
    requested_seed: int
    chol: np.ndarray  # lower Cholesky factor of H H^T

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def m(self):
        return self.matrix.shape[0]

    @property
    def n(self):
        return self.matrix.shape[1]


def _sign_matrix(seed, m, n):
    bits = splitmix64(seed, m * n) & np.uint64(1)
    return np.where(bits.reshape(m, n) == 1, 1.0, -1.0) / np.sqrt(m)


def gram_cholesky(h: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of H H^T; raises RankFailureError on a tiny pivot."""
    gram = h @ h.T
    if gram.size == 0:
        return gram
    try:
        low = cholesky(gram, lower=True, check_finite=False)
    except LinAlgError:
        raise RankFailureError("H H^T is not positive definite") from None
    scale = max(float(np.max(np.diag(gram))), 1.0)
    if np.min(np.diag(low)) ** 2 <= PIVOT_TOL * scale:
        raise RankFailureError("H H^T has a pivot below tolerance")
    return low


def build_matrix(seed: int, m: int, n: int) -> CsMatrix:
    """Seeded +-1/sqrt(m) Bernoulli matrix, reseeding until it has full row rank."""
    if not 0 <= m <= n:
        raise InvalidParameterError(f"need 0 <= m <= n, got m={m}, n={n}")
    seed &= MASK64
    if m == 0:
        return CsMatrix(np.zeros((0, n)), seed, seed, np.zeros((0, 0)))
    for attempt in range(MAX_SEED_ATTEMPTS):
        s = (seed + attempt) & MASK64
        h = _sign_matrix(s, m, n)
        try:
            low = gram_cholesky(h)
        except RankFailureError:
            continue
        return CsMatrix(h, s, seed, low)
    raise RankFailureError(f"no full-rank matrix after {MAX_SEED_ATTEMPTS} seeds from {seed}")


def _as_matrix(h):
    return h.matrix if isinstance(h, CsMatrix) else np.asarray(h, dtype=np.float64)


def sample(h, c) -> np.ndarray:
    hm = _as_matrix(h)
    c = np.asarray(c, dtype=np.float64)
    if c.ndim != 1 or c.shape[0] != hm.shape[1]:
        raise InvalidParameterError(f"vector of length {c.shape} does not match {hm.shape[1]} columns")
    return hm @ c


@dataclass(frozen=True)
class Measurements:
    codes: np.ndarray  # uint16
    offset: float
    step: float

    def __len__(self):
        return len(self.codes)

    def values(self) -> np.ndarray:
        return self.offset + self.codes.astype(np.float64) * self.step

    def to_bytes(self) -> bytes:
        head = struct.pack(">Idd", len(self.codes), self.offset, self.step)
        return head + np.asarray(self.codes, dtype=">u2").tobytes()

    @classmethod
    def from_bytes(cls, raw: bytes, start: int = 0) -> tuple["Measurements", int]:
        """Parse from ``raw[start:]``; returns the measurements and the end offset."""
        if len(raw) - start < 20:
            raise MalformedPayloadError("truncated measurement header", start)
        m, offset, step = struct.unpack_from(">Idd", raw, start)
        pos = start + 20
        end = pos + 2 * m
        if end > len(raw):
            raise MalformedPayloadError("truncated measurement codes", len(raw))
        if m and not (np.isfinite(offset) and np.isfinite(step) and step > 0):
            raise MalformedPayloadError("invalid measurement offset/step", start + 4)
        codes = np.frombuffer(raw, dtype=">u2", count=m, offset=pos).astype(np.uint16)
        return cls(codes, offset, step), end

    def __eq__(self, other):
        if not isinstance(other, Measurements):
            return NotImplemented
        return (np.array_equal(self.codes, other.codes)
                and struct.pack(">dd", self.offset, self.step) == struct.pack(">dd", other.offset, other.step))


def quantize(raw) -> Measurements:
    """Uniform 16-bit quantization between the vector's min and max."""
    v = np.asarray(raw, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise InvalidParameterError("measurements must be finite")
    if v.size == 0:
        return Measurements(np.zeros(0, dtype=np.uint16), 0.0, 0.0)
    lo = float(v.min())
    step = max((float(v.max()) - lo) / CODE_LEVELS, MIN_STEP)
    t = (v - lo) / step
    codes = np.clip(np.floor(t + 0.5), 0, CODE_LEVELS).astype(np.uint16)
    return Measurements(codes, lo, step)


def dequantize(meas: Measurements) -> np.ndarray:
    return meas.values()


def least_norm_adjust(h, y, c_g) -> np.ndarray:
    """Smallest-norm delta with H (c_g + delta) = y, via Cholesky of H H^T."""
    if isinstance(h, CsMatrix):
        hm, low = h.matrix, h.chol
    else:
        hm = np.asarray(h, dtype=np.float64)
        low = gram_cholesky(hm)
    y = np.asarray(y, dtype=np.float64)
    c_g = np.asarray(c_g, dtype=np.float64)
    if y.shape != (hm.shape[0],) or c_g.shape != (hm.shape[1],):
        raise InvalidParameterError(
            f"H is {hm.shape}, got y of shape {y.shape} and c_g of shape {c_g.shape}")
    if hm.shape[0] == 0:
        return np.zeros(hm.shape[1])
    residual = y - hm @ c_g
    return hm.T @ cho_solve((low, True), residual, check_finite=False)


def apply_adjustment(img, crit, delta) -> np.ndarray:
    """Add ``delta`` at the critical coordinates of a float copy of ``img``."""
    out = np.array(img, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    if delta.shape != (len(crit),):
        raise InvalidParameterError(f"{delta.shape[0] if delta.ndim else 0} adjustments for {len(crit)} pixels")
    out[crit.rows, crit.cols] += delta
    return out
