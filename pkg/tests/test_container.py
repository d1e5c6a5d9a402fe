import struct

import numpy as np
import pytest

from agdl.container import (AgdlBitstream, AgdlConfig, decode, decode_detailed, encode, encode_detailed, parse,
                            serialize)
from agdl.cs_refine import Measurements
from agdl.errors import IntegrityError, InvalidParameterError, MalformedPayloadError
from agdl.pgm import to_uint8


@pytest.fixture(scope="module")
def stream(camera):
    return encode_detailed(camera, AgdlConfig(quality=30, seed=42))


def test_header_fields(stream, camera):
    h = stream.bitstream.header
    assert (h.width, h.height, h.quality, h.seed) == (camera.shape[1], camera.shape[0], 30, 42)
    assert (h.rho_num, h.m_ratio_num, h.tau16, h.pocs_iterations) == (200, 5000, 64, 8)
    raw = serialize(stream.bitstream)
    assert raw[:4] == b"AGDL" and raw[4] == 1
    assert struct.unpack(">HH", raw[5:9]) == (128, 128)


def test_serialize_parse_identity(stream):
    raw = serialize(stream.bitstream)
    back = parse(raw)
    assert back == stream.bitstream
    assert serialize(back) == raw
    assert len(raw) == stream.bitstream.size_bytes()


def test_measurement_count_follows_ratio(stream):
    n_c = len(stream.layers.critical)
    assert n_c > 0
    assert stream.bitstream.m == -(-n_c // 2)


def test_bpp_is_total_bits_over_pixels(stream, camera):
    assert stream.bitstream.bpp() == 8 * len(serialize(stream.bitstream)) / camera.size


def test_constant_image_has_empty_refinement():
    img = np.full((24, 40), 77, dtype=np.uint8)
    b = encode(img, AgdlConfig(quality=50))
    assert b.m == 0
    raw = serialize(b)
    assert parse(raw).m == 0
    np.testing.assert_array_equal(decode(raw, "full"), decode(raw, "soft"))


def test_decoder_recomputes_encoder_set(stream):
    res = decode_detailed(serialize(stream.bitstream))
    assert res.critical.coords == stream.layers.critical.coords


def test_full_decode_satisfies_measurements(stream):
    res = decode_detailed(stream.bitstream)
    y = res.measurements
    err = np.abs(res.matrix.matrix @ res.refined_critical() - y).max()
    assert err <= 1e-6 * max(1.0, np.abs(y).max())


def test_decode_modes(stream, camera):
    raw = serialize(stream.bitstream)
    base = decode(raw, "base")
    soft = decode(raw, "soft")
    full = decode(raw, "full")
    res = decode_detailed(raw)
    np.testing.assert_array_equal(base, res.layers.base)
    np.testing.assert_array_equal(soft, to_uint8(res.layers.soft))
    assert full.dtype == np.uint8 and full.shape == camera.shape
    # only critical pixels can differ between soft and full
    crit = res.critical.mask(camera.shape)
    assert not (full != soft)[~crit].any()
    assert decode(raw).tobytes() == decode(raw).tobytes()
    with pytest.raises(InvalidParameterError):
        decode(raw, "fancy")


def test_parse_rejects_garbage(stream):
    raw = serialize(stream.bitstream)
    with pytest.raises(MalformedPayloadError):
        parse(b"JPEG" + raw[4:])
    with pytest.raises(MalformedPayloadError):
        parse(raw[:4] + b"\x02" + raw[5:])
    for cut in (3, 20, 30, len(raw) - 1):
        with pytest.raises(MalformedPayloadError):
            parse(raw[:cut])
    with pytest.raises(MalformedPayloadError):
        parse(raw + b"\x00")


def test_header_fuzz(stream):
    raw = serialize(stream.bitstream)
    rng = np.random.default_rng(0)
    for pos in range(29):
        for _ in range(3):
            bad = bytearray(raw)
            bad[pos] ^= int(rng.integers(1, 256))
            try:
                b = parse(bytes(bad))
            except MalformedPayloadError:
                continue
            assert b != stream.bitstream
            assert serialize(b) == bytes(bad)


def test_tampered_measurement_count_is_detected(stream):
    b = stream.bitstream
    meas = b.measurements
    short = Measurements(meas.codes[:-1], meas.offset, meas.step)
    with pytest.raises(IntegrityError):
        decode_detailed(AgdlBitstream(b.header, b.base, short))


@pytest.mark.parametrize("kw", [{"rho": 0}, {"rho": 1.5}, {"m_ratio": 1.2}, {"quality": 0}, {"pocs_iterations": 0}])
def test_config_validation(camera, kw):
    with pytest.raises(InvalidParameterError):
        encode(camera, AgdlConfig(**kw))


def test_odd_sized_image_round_trip(rng):
    img = np.clip(rng.normal(128, 40, (37, 53)), 0, 255).astype(np.uint8)
    img[10:25, 15:40] = 240
    r = encode_detailed(img, AgdlConfig(quality=25, rho=0.05))
    res = decode_detailed(serialize(r.bitstream))
    assert res.critical.coords == r.layers.critical.coords
    assert decode(r.bitstream).shape == img.shape
