"""Command-line interface.

Exit codes: 0 success, 1 codec error (bad data, failed round trip),
2 usage error (argparse failures and missing input paths).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .container import (
    DEFAULT_BLOCK_SIZE,
    compress_cloud,
    decompress_cloud,
    inspect_container,
)
from .entropy import Backend
from .errors import LizipError
from .harness import (
    CodecConfig,
    aggregate,
    run_ablation,
    run_bench,
    write_report,
)
from .ingest import (
    FORMAT_RAW_F32X4,
    FORMATS,
    SYNTH_KINDS,
    FrameSpec,
    read_frame,
    synth_cloud,
    write_frame,
)
from .predictor import linear_model, read_lizm

_BACKENDS = {"deflate": Backend.DEFLATE, "lzma": Backend.LZMA}


def _frame_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format", choices=FORMATS, default=FORMAT_RAW_F32X4,
        help="frame file layout (default: %(default)s)",
    )
    parser.add_argument(
        "--has-intensity", action="store_true",
        help="frames carry a per-point intensity column",
    )


def _codec_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--scale", type=float, default=1e5,
        help="grid lines per meter (default: %(default)s)",
    )
    parser.add_argument(
        "--block-size", type=int, default=DEFAULT_BLOCK_SIZE,
        help="points per block (default: %(default)s)",
    )
    parser.add_argument(
        "--model", type=Path, default=None,
        help="LIZM weight file; omitted means the linear fallback",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lizip",
        description="Near-lossless zero-drift LiDAR point cloud codec",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    cmd = commands.add_parser("compress", help="encode a frame file to .lizip")
    cmd.add_argument("input", type=Path)
    cmd.add_argument("output", type=Path)
    _frame_options(cmd)
    _codec_options(cmd)
    cmd.add_argument(
        "--backend", choices=sorted(_BACKENDS), default="lzma",
        help="entropy coder (default: %(default)s)",
    )
    cmd.add_argument(
        "--level", type=int, default=None,
        help="entropy coder level/preset (default: backend default)",
    )

    cmd = commands.add_parser("decompress", help="decode a .lizip file to a frame file")
    cmd.add_argument("input", type=Path)
    cmd.add_argument("output", type=Path)
    _frame_options(cmd)
    cmd.add_argument(
        "--model", type=Path, default=None,
        help="LIZM weight file the stream was encoded with",
    )

    cmd = commands.add_parser("inspect", help="print a container's header and block table")
    cmd.add_argument("input", type=Path)

    cmd = commands.add_parser("bench", help="benchmark every frame in a directory")
    cmd.add_argument("directory", type=Path)
    _frame_options(cmd)
    _codec_options(cmd)
    cmd.add_argument("--report", type=Path, default=None, help="write JSONL records here")
    cmd.add_argument(
        "--parallel", action="store_true",
        help="run frames on a thread pool (timings become less trustworthy)",
    )

    cmd = commands.add_parser("ablate", help="per-stage compressed sizes for one frame")
    cmd.add_argument("input", type=Path)
    _frame_options(cmd)
    _codec_options(cmd)
    cmd.add_argument(
        "--backend", choices=sorted(_BACKENDS), default="lzma",
        help="entropy coder (default: %(default)s)",
    )

    cmd = commands.add_parser("synth", help="write a synthetic frame file")
    cmd.add_argument("output", type=Path)
    cmd.add_argument("--kind", choices=SYNTH_KINDS, required=True)
    cmd.add_argument("--count", type=int, required=True, help="number of points")
    cmd.add_argument("--noise", type=float, default=0.0, help="Gaussian jitter sigma, meters")
    cmd.add_argument("--seed", type=int, default=0)
    _frame_options(cmd)

    return parser


def _load_model(path: Optional[Path]):
    if path is None:
        return linear_model()
    return read_lizm(path)


def _require(path: Path) -> None:
    if not path.exists():
        raise FileNotFoundError(path)


def _cmd_compress(args) -> int:
    _require(args.input)
    cloud = read_frame(FrameSpec(args.input, args.format, args.has_intensity))
    blob = compress_cloud(
        cloud,
        scale=args.scale,
        backend=_BACKENDS[args.backend],
        model=_load_model(args.model),
        block_size=args.block_size,
        level=args.level,
    )
    args.output.write_bytes(blob)
    print(f"{args.input} -> {args.output}: {len(cloud)} points, {len(blob)} bytes")
    return 0


def _cmd_decompress(args) -> int:
    _require(args.input)
    cloud = decompress_cloud(args.input.read_bytes(), _load_model(args.model))
    write_frame(cloud, FrameSpec(args.output, args.format, args.has_intensity))
    print(f"{args.input} -> {args.output}: {len(cloud)} points")
    return 0


def _cmd_inspect(args) -> int:
    _require(args.input)
    info = inspect_container(args.input.read_bytes())
    header = info.header
    print(f"magic:      LIZP")
    print(f"backend:    {info.backend_name}")
    print(f"points:     {header.total_point_count}")
    print(f"blocks:     {header.block_count}")
    print(f"scale:      {header.scale}")
    print(f"intensity:  {'yes' if header.has_intensity else 'no'}")
    for index, block in enumerate(info.blocks):
        print(
            f"  block {index}: {block.point_count} points, "
            f"{block.compressed_length} bytes"
        )
    return 0


def _cmd_bench(args) -> int:
    _require(args.directory)
    paths = sorted(p for p in args.directory.iterdir() if p.is_file())
    if not paths:
        raise FileNotFoundError(f"no frame files in {args.directory}")
    frames = [FrameSpec(p, args.format, args.has_intensity) for p in paths]
    config = CodecConfig(
        scale=args.scale, block_size=args.block_size, model=_load_model(args.model)
    )
    records = run_bench(frames, config, parallel=args.parallel)
    if args.parallel:
        print("note: parallel run, per-frame timings overlap")
    for method, stats in aggregate(records).items():
        print(
            f"{method}: {stats['frames']} frames, "
            f"mean {stats['mean_compressed_bytes']:.0f} B, "
            f"ratio {stats['mean_ratio']:.2f}x, "
            f"encode {stats['mean_encode_ms']:.1f} ms, "
            f"decode {stats['mean_decode_ms']:.1f} ms, "
            f"max err {stats['max_error_mm']:.4f} mm"
        )
    if args.report is not None:
        write_report(records, args.report)
        print(f"report: {args.report}")
    return 0


def _cmd_ablate(args) -> int:
    _require(args.input)
    cloud = read_frame(FrameSpec(args.input, args.format, args.has_intensity))
    config = CodecConfig(
        scale=args.scale,
        block_size=args.block_size,
        model=_load_model(args.model),
        backend=_BACKENDS[args.backend],
    )
    report = run_ablation(cloud, config)
    print(f"raw float bytes + entropy:  {report.raw_entropy}")
    print(f"+ quantize + morton sort:   {report.quantized}")
    print(f"+ prediction:               {report.predicted}")
    print(f"+ byte-plane shuffle:       {report.shuffled}")
    return 0


def _cmd_synth(args) -> int:
    cloud = synth_cloud(
        args.kind, args.count, noise_sigma=args.noise, seed=args.seed,
        with_intensity=args.has_intensity,
    )
    write_frame(cloud, FrameSpec(args.output, args.format, args.has_intensity))
    print(f"{args.output}: {len(cloud)} {args.kind} points")
    return 0


_COMMANDS = {
    "compress": _cmd_compress,
    "decompress": _cmd_decompress,
    "inspect": _cmd_inspect,
    "bench": _cmd_bench,
    "ablate": _cmd_ablate,
    "synth": _cmd_synth,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc}", file=sys.stderr)
        return 2
    except LizipError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
