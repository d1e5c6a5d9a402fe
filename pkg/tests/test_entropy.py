import numpy as np
import pytest
from hypothesis import given, strategies as st

from agdl.entropy import (BitReader, entropy_decode, entropy_encode, pack_bits, se_bits, signed_to_unsigned,
                          ue_bits, unsigned_to_signed)
from agdl.errors import MalformedPayloadError


@pytest.mark.parametrize("v, bits", [(0, "1"), (1, "010"), (2, "011"), (3, "00100"), (6, "00111"), (7, "0001000")])
def test_unsigned_exp_golomb(v, bits):
    assert ue_bits(v) == bits


def test_signed_mapping():
    assert [signed_to_unsigned(n) for n in (0, 1, -1, 2, -2, 3)] == [0, 1, 2, 3, 4, 5]
    assert se_bits(-1) == "011"


@given(st.integers(-10**6, 10**6))
def test_signed_mapping_inverts(n):
    assert unsigned_to_signed(signed_to_unsigned(n)) == n


@given(st.lists(st.integers(0, 10**5), max_size=40))
def test_reader_reads_back_codewords(values):
    reader = BitReader(pack_bits("".join(ue_bits(v) for v in values)))
    assert [reader.read_ue() for _ in values] == values


def _random_blocks(rng, n):
    blocks = np.zeros((n, 64), dtype=np.int64)
    density = rng.uniform(0, 1, n)
    for i in range(n):
        nz = rng.random(64) < density[i]
        blocks[i, nz] = rng.integers(-1024, 1025, nz.sum())
    return blocks


def test_round_trip_random_blocks(rng):
    blocks = _random_blocks(rng, 10_000)
    blocks[0] = 0
    blocks[1, 63] = -7  # nonzero final coefficient
    out = entropy_decode(entropy_encode(blocks), len(blocks))
    np.testing.assert_array_equal(out, blocks)


def test_all_zero_block_is_single_bit():
    data = entropy_encode(np.zeros((8, 64), dtype=int))
    assert data == bytes([0xFF])


def test_truncated_stream_raises(rng):
    blocks = _random_blocks(rng, 20)
    data = entropy_encode(blocks)
    with pytest.raises(MalformedPayloadError):
        entropy_decode(data[: len(data) // 2], len(blocks))


def test_run_overflow_raises():
    # run of 70 zeros then a level: cannot fit in a 64-coefficient block
    data = pack_bits(ue_bits(71) + se_bits(1) + "1")
    with pytest.raises(MalformedPayloadError):
        entropy_decode(data, 1)


def test_trailing_garbage_raises():
    with pytest.raises(MalformedPayloadError):
        entropy_decode(bytes([0xFF, 0x80]), 8)
