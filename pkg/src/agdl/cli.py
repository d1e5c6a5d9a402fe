"""``agdl`` command line: encode, decode, inspect, bench.

Exit status is 0 on success, 1 on usage errors and 2 on data errors.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .bench import parse_ladder, run_rd, write_csv
from .container import AgdlConfig, decode, decode_detailed, encode_detailed, parse, serialize
from .errors import AgdlError
from .pgm import format_pgm, read_pgm, write_pgm

log = logging.getLogger("agdl")

EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="agdl", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("encode", help="encode a PGM image into an .agdl stream")
    e.add_argument("--input", required=True)
    e.add_argument("--output", required=True)
    e.add_argument("--quality", type=int, required=True)
    e.add_argument("--ncrit", type=float, default=0.02, help="critical fraction rho of all pixels")
    e.add_argument("--mrate", type=float, default=0.5, help="measurements per critical pixel")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--tau", type=float, default=4.0, help="change threshold for the error proxy")
    e.add_argument("--iterations", type=int, default=8, help="POCS iterations")

    d = sub.add_parser("decode", help="decode an .agdl stream to PGM")
    d.add_argument("file")
    d.add_argument("--mode", choices=("base", "soft", "full"), default="full")
    d.add_argument("--output", required=True)

    i = sub.add_parser("inspect", help="print header fields and the rate breakdown")
    i.add_argument("file")
    i.add_argument("--mask-out", help="write the recomputed critical mask as PGM")

    b = sub.add_parser("bench", help="rate-distortion sweep over a directory of PGM images")
    b.add_argument("--dir", required=True)
    b.add_argument("--qualities", default="10:100:10")
    b.add_argument("--csv", required=True)
    b.add_argument("--ncrit", type=float, default=0.02)
    b.add_argument("--mrate", type=float, default=0.5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--workers", type=int, default=1)
    return p


def _encode(args):
    img = read_pgm(args.input)
    cfg = AgdlConfig(quality=args.quality, rho=args.ncrit, m_ratio=args.mrate, seed=args.seed,
                     tau_e=args.tau, pocs_iterations=args.iterations)
    res = encode_detailed(img, cfg)
    raw = serialize(res.bitstream)
    with open(args.output, "wb") as f:
        f.write(raw)
    print(f"N_c={len(res.layers.critical)} M={res.bitstream.m} bytes={len(raw)} "
          f"bpp={res.bitstream.bpp():.6f}", file=sys.stderr)


def _read_stream(path):
    with open(path, "rb") as f:
        return parse(f.read())


def _decode(args):
    write_pgm(args.output, decode(_read_stream(args.file), args.mode))


def _inspect(args):
    b = _read_stream(args.file)
    h = b.header
    pixels = h.width * h.height
    res = decode_detailed(b)
    header_bytes = b.base_layer_bytes() - len(b.base)
    meas_bytes = b.size_bytes() - b.base_layer_bytes()
    lines = [
        f"version      {h.version}",
        f"size         {h.width}x{h.height}",
        f"quality      {h.quality}",
        f"seed         {h.seed}",
        f"rho          {h.rho:.4f}",
        f"m_ratio      {h.m_ratio:.4f}",
        f"tau_e        {h.tau_e:g}",
        f"iterations   {h.pocs_iterations}",
        f"N_c          {len(res.critical)}",
        f"M            {b.m}",
        f"step         {b.measurements.step:.6g}",
        f"header+len   {header_bytes} B  {8 * header_bytes / pixels:.6f} bpp",
        f"base         {len(b.base)} B  {8 * len(b.base) / pixels:.6f} bpp",
        f"measurements {meas_bytes} B  {8 * meas_bytes / pixels:.6f} bpp",
        f"total        {b.size_bytes()} B  {b.bpp():.6f} bpp",
    ]
    print("\n".join(lines))
    if args.mask_out:
        mask = res.critical.mask((h.height, h.width))
        with open(args.mask_out, "wb") as f:
            f.write(format_pgm(mask.astype("uint8") * 255))


def _bench(args):
    cfg = AgdlConfig(rho=args.ncrit, m_ratio=args.mrate, seed=args.seed)
    points, errors = run_rd(args.dir, parse_ladder(args.qualities), cfg, workers=args.workers)
    write_csv(args.csv, points)
    for err in errors:
        print(f"error: {err}", file=sys.stderr)


COMMANDS = {"encode": _encode, "decode": _decode, "inspect": _inspect, "bench": _bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (AgdlError, OSError) as exc:
        print(f"agdl: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
