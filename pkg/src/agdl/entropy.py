"""Zero-run-length + Exp-Golomb coding of zigzag-scanned coefficient blocks.

Each block is coded as a sequence of ``(run, level)`` pairs followed by an
end-of-block marker.  The run symbol is ``run + 1`` written as unsigned
Exp-Golomb, so the marker is the unsigned code for 0 (the single bit ``1``).
Levels are nonzero and use the signed mapping n -> 2n-1 (n > 0), n -> -2n
(n <= 0).  Bits are packed most-significant first and the stream is padded
with zero bits to a byte boundary.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import MalformedPayloadError

EOB = 0


def ue_bits(v: int) -> str:
    """Unsigned Exp-Golomb codeword of ``v`` as a string of '0'/'1'."""
    if v < 0:
        raise ValueError("unsigned Exp-Golomb needs v >= 0")
    b = bin(v + 1)[2:]
    return "0" * (len(b) - 1) + b


def signed_to_unsigned(n: int) -> int:
    return 2 * n - 1 if n > 0 else -2 * n


def unsigned_to_signed(u: int) -> int:
    return (u + 1) // 2 if u & 1 else -(u // 2)


def se_bits(n: int) -> str:
    return ue_bits(signed_to_unsigned(n))


def block_to_runs(zz: Sequence[int]) -> list[tuple[int, int]]:
    """Split a zigzag-ordered block into (zero run, nonzero level) pairs."""
    runs = []
    run = 0
    for v in zz:
        v = int(v)
        if v == 0:
            run += 1
        else:
            runs.append((run, v))
            run = 0
    return runs


def runs_to_block(runs: Iterable[tuple[int, int]], size: int = 64) -> list[int]:
    out = [0] * size
    pos = 0
    for run, level in runs:
        pos += run
        if pos >= size:
            raise MalformedPayloadError("run-length overflows block")
        out[pos] = level
        pos += 1
    return out


def pack_bits(bits: str) -> bytes:
    if not bits:
        return b""
    pad = (-len(bits)) % 8
    bits += "0" * pad
    return int(bits, 2).to_bytes(len(bits) // 8, "big")


class BitReader:
    """Reads Exp-Golomb codewords from an MSB-first byte string."""

    def __init__(self, data: bytes):
        self._bits = "".join(format(b, "08b") for b in data) if data else ""
        self.pos = 0

    def read_ue(self) -> int:
        s = self._bits
        one = s.find("1", self.pos)
        if one < 0:
            raise MalformedPayloadError("Exp-Golomb prefix runs past end of stream", self.pos // 8)
        zeros = one - self.pos
        end = one + zeros + 1
        if end > len(s):
            raise MalformedPayloadError("Exp-Golomb codeword overruns buffer", self.pos // 8)
        value = int(s[one:end], 2) - 1
        self.pos = end
        return value

    def read_se(self) -> int:
        return unsigned_to_signed(self.read_ue())


def encode_runs(blocks: Iterable[Sequence[tuple[int, int]]]) -> bytes:
    """Entropy-code a sequence of blocks given as (run, level) lists."""
    parts = []
    for runs in blocks:
        for run, level in runs:
            if level == 0:
                raise ValueError("levels in run pairs must be nonzero")
            parts.append(ue_bits(run + 1))
            parts.append(se_bits(level))
        parts.append("1")  # end of block
    return pack_bits("".join(parts))


def decode_runs(data: bytes, n_blocks: int) -> list[list[tuple[int, int]]]:
    reader = BitReader(data)
    blocks = []
    for _ in range(n_blocks):
        runs = []
        while True:
            sym = reader.read_ue()
            if sym == EOB:
                break
            level = reader.read_se()
            if level == 0:
                raise MalformedPayloadError("zero level in run pair", reader.pos // 8)
            runs.append((sym - 1, level))
            if len(runs) > 64:
                raise MalformedPayloadError("block has more than 64 coefficients", reader.pos // 8)
        blocks.append(runs)
    tail = reader._bits[reader.pos:]
    if len(tail) >= 8 or "1" in tail:
        raise MalformedPayloadError("trailing data after last block", reader.pos // 8)
    return blocks


def entropy_encode(zz_blocks) -> bytes:
    """Code an (n, 64) array of zigzag-ordered integer blocks."""
    return encode_runs(block_to_runs(b) for b in np.asarray(zz_blocks).tolist())


def entropy_decode(data: bytes, n_blocks: int) -> np.ndarray:
    blocks = decode_runs(data, n_blocks)
    out = np.zeros((n_blocks, 64), dtype=np.int64)
    for i, runs in enumerate(blocks):
        out[i] = runs_to_block(runs)
    return out
