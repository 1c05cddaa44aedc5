"""Command line for training and serving."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields

from .train import TrainConfig, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sanskrit-trainer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fine-tune on a sample TSV")
    p.add_argument("--train", dest="train_path", required=True)
    p.add_argument("--dev", dest="dev_path", default="")
    p.add_argument("--checkpoint-dir", default="checkpoint")
    p.add_argument("--preset", default="tiny", choices=["tiny", "small"])
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--lr", type=float, default=3e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-source-len", type=int, default=512)
    p.add_argument("--max-target-len", type=int, default=512)
    p.add_argument("--eval-interval", type=int, default=0)

    p = sub.add_parser("serve", help="serve a checkpoint over HTTP")
    p.add_argument("--checkpoint-dir", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8700)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "train":
        config_fields = {f.name for f in fields(TrainConfig)}
        config = TrainConfig(
            **{k: v for k, v in vars(args).items() if k in config_fields}
        )
        result = train(config)
        print(f"checkpoint: {result.checkpoint_dir}")
        if result.dev_pm:
            print(f"final dev PM: {result.final_pm:.2f}")
        return 0
    from .serve import serve

    serve(args.checkpoint_dir, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
