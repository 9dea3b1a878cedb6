"""Command-line interface.

One command: ``train`` reads a config file, builds the training set
from frame files, runs the training loop, and writes the weight file.

Exit codes: 0 success, 1 training or data error (divergence, malformed
frames), 2 usage error (argparse failures and missing paths).
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from . import __version__
from .config import load_config
from .dataset import build_training_set
from .errors import TrainerError
from .export import export_lizm
from .frames import FORMAT_RAW_F32X4, FORMATS, discover_frames


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liztrain",
        description="Train the codec's offset predictor and export LIZM weights",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    train_cmd = commands.add_parser(
        "train", help="train on a frame corpus and write a weight file"
    )
    train_cmd.add_argument(
        "--config", required=True, metavar="FILE",
        help="JSON file of training hyperparameters",
    )
    train_cmd.add_argument(
        "--frames", required=True, nargs="+", metavar="PATH",
        help="frame files or directories of frame files",
    )
    train_cmd.add_argument(
        "--format", choices=FORMATS, default=FORMAT_RAW_F32X4,
        help="frame file layout (default: %(default)s)",
    )
    train_cmd.add_argument(
        "--scale", type=float, default=1e3,
        help="grid lines per meter (default: %(default)s)",
    )
    train_cmd.add_argument(
        "--output", required=True, metavar="FILE",
        help="where to write the LIZM weight file",
    )
    train_cmd.add_argument(
        "--verbose", action="store_true",
        help="log per-epoch validation MSE to stderr",
    )
    return parser


def _cmd_train(args) -> int:
    config = load_config(args.config)
    handler = None
    if args.verbose:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(message)s"))
        package_log = logging.getLogger("liztrain")
        package_log.addHandler(handler)
        package_log.setLevel(logging.INFO)
    try:
        sources = []
        for path in args.frames:
            sources.extend(discover_frames(path, args.format))
        dataset = build_training_set(sources, config.context_size, args.scale)
        # Import lazily so config or frame mistakes fail fast without
        # paying for torch startup.
        from .training import train

        result = train(config, dataset)
        size = export_lizm(result.layers, config.context_size, args.output)
        print(
            f"trained on {len(dataset[0])} examples from {len(sources)} frames; "
            f"final val_mse {result.final_val_mse:.6g}; "
            f"wrote {args.output} ({size} bytes)"
        )
        return 0
    finally:
        if handler is not None:
            logging.getLogger("liztrain").removeHandler(handler)


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _cmd_train(args)
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc}", file=sys.stderr)
        return 2
    except TrainerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
