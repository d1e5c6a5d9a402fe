import numpy as np
import pytest

from agdl.errors import MalformedPayloadError
from agdl.pgm import format_pgm, parse_pgm, read_pgm, to_uint8, write_pgm


def test_round_trip(tmp_path, rng):
    img = rng.integers(0, 256, (13, 21), dtype=np.uint8)
    write_pgm(tmp_path / "a.pgm", img)
    np.testing.assert_array_equal(read_pgm(tmp_path / "a.pgm"), img)


def test_header_comments_and_layout():
    raw = b"P5\n# made by hand\n3 2\n255\n" + bytes([0, 1, 2, 3, 4, 255])
    img = parse_pgm(raw)
    assert img.shape == (2, 3)
    assert img[1, 2] == 255
    assert format_pgm(img).startswith(b"P5\n3 2\n255\n")


@pytest.mark.parametrize("raw", [b"P2\n1 1\n255\n0", b"P5\n4 4\n255\n" + bytes(3), b"P5\n4"])
def test_rejects_bad_files(raw):
    with pytest.raises(MalformedPayloadError):
        parse_pgm(raw)


def test_to_uint8_rounds_half_away_and_clamps():
    np.testing.assert_array_equal(to_uint8([[-3.0, 0.5, 1.49, 2.5, 254.5, 300.0]]),
                                  [[0, 1, 1, 3, 255, 255]])
