"""The .agdl bitstream and the end-to-end encode/decode pipeline.

Layout (big-endian)::

    magic "AGDL" | version u8 | width u16 | height u16 | quality u8 |
    seed u64 | rho u16 (1e-4 units) | m_ratio u16 (1e-4 units) |
    tau_e*16 u16 | pocs iterations u8 |
    base length u32 | base payload |
    M u32 | offset f64 | step f64 | M x u16 codes
"""
from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field

import numpy as np

from .base_codec import BaseLayerPayload, decode_base, encode_base
from .critical_mask import CriticalSet, Detection, MaskParams, detect
from .cs_refine import CsMatrix, Measurements, apply_adjustment, build_matrix, least_norm_adjust, quantize, sample
from .errors import IntegrityError, InvalidParameterError, MalformedPayloadError
from .pgm import to_uint8
from .soft_decoder import PocsParams, soft_decode

log = logging.getLogger(__name__)

MAGIC = b"AGDL"
VERSION = 1
RATIO_UNIT = 10_000
_HEADER = struct.Struct(">4sBHHBQHHHB")
_LEN = struct.Struct(">I")
MODES = ("base", "soft", "full")


@dataclass(frozen=True)
class AgdlHeader:
    width: int
    height: int
    quality: int
    seed: int
    rho_num: int
    m_ratio_num: int
    tau16: int
    pocs_iterations: int
    version: int = VERSION

    @property
    def rho(self):
        return self.rho_num / RATIO_UNIT

    @property
    def m_ratio(self):
        return self.m_ratio_num / RATIO_UNIT

    @property
    def tau_e(self):
        return self.tau16 / 16

    def n_critical_budget(self) -> int:
        return -(-self.rho_num * self.width * self.height // RATIO_UNIT)

    def n_measurements(self, n_c: int) -> int:
        return -(-self.m_ratio_num * n_c // RATIO_UNIT)

    def mask_params(self) -> MaskParams:
        return MaskParams(tau_e=self.tau_e, rho=self.rho)

    def pocs_params(self) -> PocsParams:
        return PocsParams(iterations=self.pocs_iterations)

    def pack(self) -> bytes:
        return _HEADER.pack(MAGIC, self.version, self.width, self.height, self.quality, self.seed,
                            self.rho_num, self.m_ratio_num, self.tau16, self.pocs_iterations)


@dataclass(frozen=True)
class AgdlConfig:
    """Encoder settings.  Ratios are rounded to 1e-4 and tau_e to 1/16."""
    quality: int = 50
    rho: float = 0.02
    m_ratio: float = 0.5
    seed: int = 0
    tau_e: float = 4.0
    pocs_iterations: int = 8

    def header(self, width, height, seed=None) -> AgdlHeader:
        rho_num = int(round(self.rho * RATIO_UNIT))
        m_num = int(round(self.m_ratio * RATIO_UNIT))
        tau16 = int(round(self.tau_e * 16))
        if not 1 <= rho_num <= RATIO_UNIT:
            raise InvalidParameterError(f"rho must be in [1e-4, 1], got {self.rho}")
        if not 0 <= m_num <= RATIO_UNIT:
            raise InvalidParameterError(f"m_ratio must be in [0, 1], got {self.m_ratio}")
        if not 0 <= tau16 <= 0xFFFF:
            raise InvalidParameterError(f"tau_e out of range: {self.tau_e}")
        if not 1 <= self.pocs_iterations <= 255:
            raise InvalidParameterError("pocs_iterations must be in [1, 255]")
        if not 1 <= self.quality <= 100:
            raise InvalidParameterError("quality must be in [1, 100]")
        s = self.seed if seed is None else seed
        return AgdlHeader(width, height, self.quality, s & 0xFFFFFFFFFFFFFFFF,
                          rho_num, m_num, tau16, self.pocs_iterations)


@dataclass(frozen=True)
class AgdlBitstream:
    header: AgdlHeader
    base: bytes
    measurements: Measurements

    @property
    def m(self):
        return len(self.measurements)

    def size_bytes(self) -> int:
        return _HEADER.size + _LEN.size + len(self.base) + 20 + 2 * self.m

    def base_layer_bytes(self) -> int:
        """Bytes needed for a base-only stream: header plus base payload."""
        return _HEADER.size + _LEN.size + len(self.base)

    def bpp(self) -> float:
        return 8.0 * self.size_bytes() / (self.header.width * self.header.height)


def serialize(b: AgdlBitstream) -> bytes:
    return b.header.pack() + _LEN.pack(len(b.base)) + b.base + b.measurements.to_bytes()


def parse(raw: bytes) -> AgdlBitstream:
    raw = bytes(raw)
    if len(raw) < _HEADER.size:
        raise MalformedPayloadError("truncated header", len(raw))
    magic, version, w, h, q, seed, rho, mr, tau16, iters = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise MalformedPayloadError("bad magic", 0)
    if version != VERSION:
        raise MalformedPayloadError(f"unsupported version {version}", 4)
    if w == 0 or h == 0:
        raise MalformedPayloadError("zero image dimension", 5)
    if not 1 <= q <= 100:
        raise MalformedPayloadError(f"quality {q} out of range", 9)
    if not 1 <= rho <= RATIO_UNIT:
        raise MalformedPayloadError("rho out of range", 18)
    if mr > RATIO_UNIT:
        raise MalformedPayloadError("m_ratio out of range", 20)
    if iters == 0:
        raise MalformedPayloadError("zero POCS iterations", 24)
    header = AgdlHeader(w, h, q, seed, rho, mr, tau16, iters, version)
    pos = _HEADER.size
    if len(raw) < pos + _LEN.size:
        raise MalformedPayloadError("truncated base length", len(raw))
    (n_base,) = _LEN.unpack_from(raw, pos)
    pos += _LEN.size
    if len(raw) < pos + n_base:
        raise MalformedPayloadError("truncated base payload", len(raw))
    base = raw[pos:pos + n_base]
    payload = BaseLayerPayload.from_bytes(base)
    if (payload.width, payload.height, payload.quality) != (w, h, q):
        raise MalformedPayloadError("base payload disagrees with header", pos)
    pos += n_base
    meas, pos = Measurements.from_bytes(raw, pos)
    if pos != len(raw):
        raise MalformedPayloadError("trailing bytes after measurements", pos)
    return AgdlBitstream(header, base, meas)


@dataclass
class Layers:
    """Everything both sides derive from the base layer alone."""
    base: np.ndarray
    soft: np.ndarray
    grid: object
    table: np.ndarray
    detection: Detection

    @property
    def critical(self) -> CriticalSet:
        return self.detection.critical


def derive_layers(base_bytes: bytes, header: AgdlHeader) -> Layers:
    base, grid, table = decode_base(base_bytes)
    soft = soft_decode(base, grid, table, header.pocs_params())
    det = detect(base, soft, header.mask_params())
    return Layers(base, soft, grid, table, det)


@dataclass
class EncodeResult:
    bitstream: AgdlBitstream
    layers: Layers
    matrix: CsMatrix
    raw_measurements: np.ndarray = field(repr=False)


def encode_detailed(img, config: AgdlConfig = AgdlConfig()) -> EncodeResult:
    img = np.asarray(img)
    if img.ndim != 2:
        raise InvalidParameterError("expected a 2-D luminance image")
    h, w = img.shape
    header = config.header(w, h)
    payload, _ = encode_base(img, config.quality)
    base_bytes = payload.to_bytes()
    layers = derive_layers(base_bytes, header)
    crit = layers.critical
    n_c = len(crit)
    m = header.n_measurements(n_c)
    mat = build_matrix(header.seed, m, n_c)
    if mat.seed != header.seed:
        log.info("seed %d gave a rank-deficient matrix, using %d", header.seed, mat.seed)
        header = config.header(w, h, seed=mat.seed)
    # measurements sample the original image at the critical coordinates
    raw = sample(mat, crit.read(img))
    meas = quantize(raw)
    log.info("encoded %dx%d q=%d: N_c=%d M=%d", w, h, config.quality, n_c, m)
    return EncodeResult(AgdlBitstream(header, base_bytes, meas), layers, mat, raw)


def encode(img, config: AgdlConfig = AgdlConfig()) -> AgdlBitstream:
    return encode_detailed(img, config).bitstream


@dataclass
class DecodeResult:
    layers: Layers
    matrix: CsMatrix
    measurements: np.ndarray
    delta: np.ndarray
    refined: np.ndarray  # real-valued, before export rounding

    @property
    def critical(self) -> CriticalSet:
        return self.layers.critical

    def refined_critical(self) -> np.ndarray:
        return self.critical.read(self.refined)


def decode_detailed(b: AgdlBitstream | bytes) -> DecodeResult:
    if not isinstance(b, AgdlBitstream):
        b = parse(b)
    header = b.header
    layers = derive_layers(b.base, header)
    crit = layers.critical
    m_expected = header.n_measurements(len(crit))
    if m_expected != b.m:
        raise IntegrityError(
            f"decoder found {len(crit)} critical pixels implying M={m_expected}, stream has M={b.m}")
    mat = build_matrix(header.seed, b.m, len(crit))
    if mat.seed != header.seed:
        raise IntegrityError("header seed does not give a full-rank matrix")
    y = b.measurements.values()
    delta = least_norm_adjust(mat, y, crit.values)
    refined = apply_adjustment(layers.soft, crit, delta)
    return DecodeResult(layers, mat, y, delta, refined)


def decode(b: AgdlBitstream | bytes, mode: str = "full") -> np.ndarray:
    """Decode to an 8-bit image.  ``mode`` is one of base, soft, full."""
    if mode not in MODES:
        raise InvalidParameterError(f"mode must be one of {MODES}, got {mode!r}")
    if not isinstance(b, AgdlBitstream):
        b = parse(b)
    if mode == "base":
        return decode_base(b.base)[0]
    if mode == "soft":
        base, grid, table = decode_base(b.base)
        return to_uint8(soft_decode(base, grid, table, b.header.pocs_params()))
    return to_uint8(decode_detailed(b).refined)
