import math

import numpy as np
import pytest

from agdl.bench import CSV_FIELDS, evaluate, format_csv, parse_ladder, psnr, run_rd
from agdl.container import AgdlConfig
from agdl.errors import InvalidParameterError
from agdl.pgm import write_pgm


def test_psnr_values():
    a = np.full((4, 4), 100.0)
    assert psnr(a, a) == 99.0
    assert psnr(a, a + 5) == pytest.approx(20 * math.log10(51), abs=1e-12)
    assert psnr(a, a + 5) == pytest.approx(34.151, abs=5e-4)
    b = a.copy()
    b[0, 0] = 90
    assert psnr(a, b, np.ones_like(a, bool)) == psnr(a, b)
    m = np.zeros_like(a, bool)
    m[1, 1] = True
    assert psnr(a, b, m) == 99.0
    with pytest.raises(InvalidParameterError):
        psnr(a, b, np.zeros_like(a, bool))


def test_parse_ladder():
    assert parse_ladder("10:100:10") == list(range(10, 101, 10))
    assert parse_ladder("5,50") == [5, 50]
    for bad in ("0:10:5", "10:20:0", "x", ""):
        with pytest.raises(InvalidParameterError):
            parse_ladder(bad)


def test_evaluate_accounting(camera):
    pts = evaluate(camera, "camera", 40)
    assert [p.variant for p in pts] == ["base", "soft", "full"]
    base, soft, full = pts
    assert base.bpp == soft.bpp > 0
    meas_bits = full.bits - base.bits
    assert meas_bits == 8 * (20 + 2 * full.m)
    assert full.bpp == pytest.approx(base.bpp + meas_bits / camera.size, rel=0, abs=1e-12)
    assert full.crit_psnr > soft.crit_psnr


def test_empty_dir(tmp_path):
    pts, errs = run_rd(tmp_path, [10, 20])
    assert pts == [] and errs == []
    assert format_csv(pts) == ",".join(CSV_FIELDS) + "\n"


@pytest.fixture
def bench_dir(tmp_path, camera):
    write_pgm(tmp_path / "b.pgm", camera[:64, :64])
    write_pgm(tmp_path / "a.pgm", camera[64:, 64:])
    (tmp_path / "broken.pgm").write_bytes(b"P5\n10 10\n255\n")
    return tmp_path


def test_run_rd_rows_and_order(bench_dir):
    pts, errs = run_rd(bench_dir, range(10, 101, 10))
    assert len(pts) == 2 * 30
    assert len(errs) == 10 and all("broken.pgm" in e for e in errs)
    keys = [(p.image, p.quality) for p in pts]
    assert keys == sorted(keys)
    assert [p.variant for p in pts[:3]] == ["base", "soft", "full"]
    for p in pts:
        assert p.bpp > 0 and math.isfinite(p.psnr) and p.psnr <= 99


def test_csv_deterministic_and_parallel_safe(bench_dir):
    cfg = AgdlConfig(seed=3)
    a = format_csv(run_rd(bench_dir, [20, 60], cfg)[0])
    b = format_csv(run_rd(bench_dir, [20, 60], cfg)[0])
    c = format_csv(run_rd(bench_dir, [60, 20], cfg, workers=2)[0])
    assert a == b == c
    assert a.splitlines()[0] == "image,quality,variant,bpp,psnr,roi_psnr,crit_psnr,n_c,m"
