"""Training loop: teacher-forced cross entropy over sample files.

Dev perfect-match is computed by invoking the corpus toolkit's `evaluate`
command on decoded outputs, keeping the two packages coupled only through
the sample-file format and the CLI.
"""

from __future__ import annotations

import json
import logging
import random
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import torch
from torch import nn

from .data import batch_iterator, load_pairs, longest_lengths
from .model import ByteSeq2Seq, save_checkpoint
from .vocab import PAD, decode, encode

log = logging.getLogger("trainer")

EVALUATOR = [sys.executable, "-m", "sanskritkit.cli"]


@dataclass
class TrainConfig:
    train_path: str
    dev_path: str = ""
    checkpoint_dir: str = "checkpoint"
    preset: str = "tiny"
    max_source_len: int = 512
    max_target_len: int = 512
    steps: int = 1000
    batch_size: int = 32
    lr: float = 3e-4
    seed: int = 0
    eval_interval: int = 0  # 0: evaluate only after the final step
    log_interval: int = 50


@dataclass
class TrainResult:
    checkpoint_dir: Path
    losses: list[tuple[int, float]] = field(default_factory=list)
    dev_pm: list[tuple[int, float]] = field(default_factory=list)

    @property
    def final_pm(self) -> float:
        return self.dev_pm[-1][1] if self.dev_pm else float("nan")


def evaluate_pm(pred_pairs, gold_pairs, workdir: str | Path | None = None) -> float:
    """Perfect match via the toolkit's `evaluate --json` command."""
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        pred_path = Path(tmp) / "pred.tsv"
        gold_path = Path(tmp) / "gold.tsv"
        for path, pairs in ((pred_path, pred_pairs), (gold_path, gold_pairs)):
            with open(path, "w", encoding="utf-8") as fh:
                for source, target in pairs:
                    fh.write(f"{source}\t{target}\n")
        proc = subprocess.run(
            EVALUATOR + ["evaluate", "--pred", str(pred_path),
                         "--gold", str(gold_path), "--json"],
            capture_output=True, text=True,
        )
        if proc.returncode != 0:
            raise RuntimeError(f"evaluate failed: {proc.stderr.strip()}")
        return json.loads(proc.stdout)["PM"]["value"]


def decode_sources(
    model: ByteSeq2Seq, sources: list[str], max_source_len: int,
    max_target_len: int, batch_size: int = 64,
) -> list[str]:
    outputs = []
    for start in range(0, len(sources), batch_size):
        chunk = sources[start : start + batch_size]
        rows = [encode(s, max_source_len) for s in chunk]
        width = max(len(r) for r in rows)
        src = torch.full((len(rows), width), PAD, dtype=torch.long)
        for i, row in enumerate(rows):
            src[i, : len(row)] = torch.tensor(row, dtype=torch.long)
        outputs.extend(decode(ids) for ids in model.greedy_decode(src, max_target_len))
    return outputs


def _dev_perfect_match(model: ByteSeq2Seq, dev_pairs, config: TrainConfig) -> float:
    predictions = decode_sources(
        model, [s for s, _ in dev_pairs], config.max_source_len,
        config.max_target_len,
    )
    pred_pairs = [(s, p) for (s, _), p in zip(dev_pairs, predictions)]
    return evaluate_pm(pred_pairs, dev_pairs)


def train(config: TrainConfig) -> TrainResult:
    torch.manual_seed(config.seed)
    random.seed(config.seed)

    train_pairs = load_pairs(config.train_path)
    if not train_pairs:
        raise ValueError(f"no samples in {config.train_path}")
    dev_pairs = load_pairs(config.dev_path) if config.dev_path else []
    if dev_pairs:
        longest_src, longest_tgt = longest_lengths(dev_pairs)
        if longest_src > config.max_source_len or longest_tgt > config.max_target_len:
            log.warning(
                "dev samples exceed configured lengths (%d/%d > %d/%d); "
                "they will be truncated",
                longest_src, longest_tgt,
                config.max_source_len, config.max_target_len,
            )

    model = ByteSeq2Seq(preset=config.preset)
    log.info("preset %s: %.2fM parameters", config.preset,
             model.parameter_count() / 1e6)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.lr)
    criterion = nn.CrossEntropyLoss(ignore_index=PAD)
    batches = batch_iterator(
        train_pairs, config.batch_size, config.seed,
        config.max_source_len, config.max_target_len,
    )

    checkpoint_dir = Path(config.checkpoint_dir)
    checkpoint_dir.mkdir(parents=True, exist_ok=True)
    metrics_log = open(checkpoint_dir / "metrics.log", "w", encoding="utf-8")
    result = TrainResult(checkpoint_dir=checkpoint_dir)

    model.train()
    for step in range(1, config.steps + 1):
        src, tgt = next(batches)
        logits = model(src, tgt[:, :-1])
        loss = criterion(
            logits.reshape(-1, logits.size(-1)), tgt[:, 1:].reshape(-1)
        )
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()

        if step % config.log_interval == 0 or step == 1 or step == config.steps:
            value = float(loss.item())
            result.losses.append((step, value))
            metrics_log.write(json.dumps({"step": step, "loss": value}) + "\n")
            metrics_log.flush()
            log.info("step %d loss %.4f", step, value)

        at_interval = config.eval_interval and step % config.eval_interval == 0
        if dev_pairs and (at_interval or step == config.steps):
            pm = _dev_perfect_match(model, dev_pairs, config)
            result.dev_pm.append((step, pm))
            metrics_log.write(json.dumps({"step": step, "dev_pm": pm}) + "\n")
            metrics_log.flush()
            log.info("step %d dev PM %.2f", step, pm)
            model.train()

    metrics_log.close()
    save_checkpoint(
        model, checkpoint_dir,
        extra={
            "max_source_len": config.max_source_len,
            "max_target_len": config.max_target_len,
            "seed": config.seed,
            "steps": config.steps,
        },
    )
    return result
