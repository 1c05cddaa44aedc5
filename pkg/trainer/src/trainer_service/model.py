"""Byte-level transformer encoder-decoder with size presets.

Presets stay small on purpose: the service exists to verify the pipeline
end to end on a CPU, not to chase benchmark scores.
"""

from __future__ import annotations

import json
from pathlib import Path

import torch
from torch import nn

from .vocab import BOS, EOS, PAD, VOCAB_SIZE

MAX_POSITIONS = 516

PRESETS = {
    "tiny": dict(d_model=96, nhead=4, num_encoder_layers=2,
                 num_decoder_layers=2, dim_feedforward=192, dropout=0.1),
    "small": dict(d_model=192, nhead=4, num_encoder_layers=3,
                  num_decoder_layers=3, dim_feedforward=384, dropout=0.1),
}


class ByteSeq2Seq(nn.Module):
    def __init__(self, preset: str = "tiny"):
        super().__init__()
        if preset not in PRESETS:
            raise ValueError(f"unknown preset {preset!r}; have {sorted(PRESETS)}")
        self.preset = preset
        hp = PRESETS[preset]
        self.d_model = hp["d_model"]
        self.embed = nn.Embedding(VOCAB_SIZE, self.d_model, padding_idx=PAD)
        self.positions = nn.Embedding(MAX_POSITIONS, self.d_model)
        self.transformer = nn.Transformer(batch_first=True, **hp)
        # the nested-tensor fast path is a torch prototype; keep decode paths
        # on the ordinary implementation
        self.transformer.encoder.enable_nested_tensor = False
        self.transformer.encoder.use_nested_tensor = False
        self.project = nn.Linear(self.d_model, VOCAB_SIZE)

    def _embed(self, ids: torch.Tensor) -> torch.Tensor:
        pos = torch.arange(ids.size(1), device=ids.device).unsqueeze(0)
        return self.embed(ids) + self.positions(pos)

    @staticmethod
    def _causal_mask(length: int, device) -> torch.Tensor:
        # bool mask, matching the dtype of the key-padding masks
        return torch.triu(
            torch.ones(length, length, dtype=torch.bool, device=device), diagonal=1
        )

    def forward(self, src: torch.Tensor, tgt_in: torch.Tensor) -> torch.Tensor:
        src_pad = src.eq(PAD)
        tgt_pad = tgt_in.eq(PAD)
        causal = self._causal_mask(tgt_in.size(1), src.device)
        hidden = self.transformer(
            self._embed(src),
            self._embed(tgt_in),
            tgt_mask=causal,
            src_key_padding_mask=src_pad,
            tgt_key_padding_mask=tgt_pad,
            memory_key_padding_mask=src_pad,
        )
        return self.project(hidden)

    @torch.no_grad()
    def greedy_decode(self, src: torch.Tensor, max_len: int) -> list[list[int]]:
        """Batch greedy decoding until EOS or max_len output bytes."""
        self.eval()
        batch = src.size(0)
        src_pad = src.eq(PAD)
        memory = self.transformer.encoder(
            self._embed(src), src_key_padding_mask=src_pad
        )
        ys = torch.full((batch, 1), BOS, dtype=torch.long, device=src.device)
        finished = torch.zeros(batch, dtype=torch.bool, device=src.device)
        for _ in range(max_len):
            causal = self._causal_mask(ys.size(1), src.device)
            hidden = self.transformer.decoder(
                self._embed(ys),
                memory,
                tgt_mask=causal,
                memory_key_padding_mask=src_pad,
            )
            step = self.project(hidden[:, -1, :]).argmax(-1)
            step = torch.where(finished, torch.full_like(step, EOS), step)
            ys = torch.cat([ys, step.unsqueeze(1)], dim=1)
            finished |= step.eq(EOS)
            if bool(finished.all()):
                break
        return [row[1:].tolist() for row in ys]

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())


def save_checkpoint(model: ByteSeq2Seq, directory: str | Path,
                    extra: dict | None = None) -> Path:
    """Checkpoint layout: model.pt (state dict) + config.json (metadata)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    torch.save(model.state_dict(), directory / "model.pt")
    payload = {"preset": model.preset, "vocab_size": VOCAB_SIZE}
    payload.update(extra or {})
    (directory / "config.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8"
    )
    return directory


def load_checkpoint(directory: str | Path) -> tuple[ByteSeq2Seq, dict]:
    directory = Path(directory)
    config_path = directory / "config.json"
    weights_path = directory / "model.pt"
    if not config_path.exists() or not weights_path.exists():
        raise FileNotFoundError(f"no checkpoint in {directory}")
    config = json.loads(config_path.read_text(encoding="utf-8"))
    model = ByteSeq2Seq(preset=config["preset"])
    model.load_state_dict(torch.load(weights_path, map_location="cpu"))
    model.eval()
    return model, config
