import socket
import subprocess
import sys
import time
from pathlib import Path

import pytest
import requests

PRIMARY_ROOT = Path(__file__).resolve().parents[2]

RV_SAMPLE = (
    "S yuvorhi mātāditiḥ",
    "yuvoḥ hi mātā aditiḥ",
)


def write_pairs(path, pairs):
    with open(path, "w", encoding="utf-8") as fh:
        for source, target in pairs:
            fh.write(f"{source}\t{target}\n")


@pytest.fixture(scope="session")
def memorized_checkpoint(tmp_path_factory):
    """Train once on the single Rigvedic sample; reused by the serve tests."""
    from trainer_service.train import TrainConfig, train

    workdir = tmp_path_factory.mktemp("memorize")
    train_path = workdir / "train.tsv"
    write_pairs(train_path, [RV_SAMPLE] * 50)
    config = TrainConfig(
        train_path=str(train_path),
        dev_path=str(train_path),
        checkpoint_dir=str(workdir / "checkpoint"),
        steps=300,
        batch_size=8,
        seed=1,
        eval_interval=150,
        max_source_len=64,
        max_target_len=64,
    )
    result = train(config)
    return result


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture()
def running_service(memorized_checkpoint):
    """The real service process on a local port, torn down afterwards."""
    port = free_port()
    proc = subprocess.Popen(
        [
            sys.executable, "-m", "trainer_service.cli", "serve",
            "--checkpoint-dir", str(memorized_checkpoint.checkpoint_dir),
            "--port", str(port),
        ],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    endpoint = f"http://127.0.0.1:{port}"
    try:
        for _ in range(100):
            try:
                if requests.get(f"{endpoint}/health", timeout=1).status_code == 200:
                    break
            except requests.RequestException:
                time.sleep(0.2)
        else:
            raise RuntimeError("service did not become healthy")
        yield endpoint
    finally:
        proc.terminate()
        proc.wait(timeout=10)
