"""Uniform prediction interface over three backends.

``echo`` strips the task prefix (a floor for metrics), ``oracle`` looks
up gold targets from a sample table (an identity check for the whole
pipeline), ``remote`` talks to an inference service over HTTP. Remote
calls retry only on connection errors, never on model errors.
"""

from __future__ import annotations

import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import requests

from .taskgen import read_sample_pairs
from .types import ValidationError

_PREFIX_RE = re.compile(r"^(R )?(S?L?M?|O|D) ")


class BackendError(Exception):
    """Base for everything the prediction layer can raise."""


class BackendTimeoutError(BackendError):
    pass


class BackendConnectionError(BackendError):
    pass


class BackendProtocolError(BackendError):
    """Service reachable but the response violates the wire contract."""


class UnknownSourceError(BackendError):
    def __init__(self, source: str):
        super().__init__(f"source not in oracle table: {source[:60]!r}")
        self.source = source


class OversizeOutputError(BackendError):
    pass


@dataclass(frozen=True)
class PredictionRequest:
    source: str
    max_output_chars: int = 0  # 0 means the default bound

    def __post_init__(self) -> None:
        if not self.source:
            raise ValidationError("prediction source must be non-empty")
        match = _PREFIX_RE.match(self.source)
        if not match or not match.group(2):
            raise ValidationError(
                f"source must start with a task prefix: {self.source[:30]!r}"
            )
        if self.max_output_chars <= 0:
            object.__setattr__(
                self, "max_output_chars", 2 * len(self.source) + 64
            )

    @property
    def text(self) -> str:
        """Source with flag and prefix stripped."""
        return _PREFIX_RE.sub("", self.source, count=1)


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "echo"  # echo | oracle | remote
    endpoint: str = ""
    oracle_path: str = ""
    timeout: float = 30.0
    max_in_flight: int = 4
    retries: int = 2
    truncate_oversize: bool = True

    def __post_init__(self) -> None:
        if self.kind not in ("echo", "oracle", "remote"):
            raise ValidationError(f"unknown backend kind {self.kind!r}")
        if self.kind == "remote" and not self.endpoint:
            raise ValidationError("remote backend requires an endpoint")
        if self.kind == "oracle" and not self.oracle_path:
            raise ValidationError("oracle backend requires a table path")


@dataclass(frozen=True)
class PredictionOutcome:
    index: int
    target: Optional[str] = None
    error: Optional[BackendError] = None

    @property
    def ok(self) -> bool:
        return self.error is None


class Backend:
    def predict(self, request: PredictionRequest) -> str:
        raise NotImplementedError

    def predict_batch(
        self, requests_: Sequence[PredictionRequest], max_in_flight: int = 4
    ) -> list[PredictionOutcome]:
        """Order-preserving batch; per-item failures never abort the rest."""

        def run(pair):
            index, request = pair
            try:
                return PredictionOutcome(index=index, target=self.predict(request))
            except BackendError as err:
                return PredictionOutcome(index=index, error=err)

        if not requests_:
            return []
        with ThreadPoolExecutor(max_workers=max(1, max_in_flight)) as pool:
            return list(pool.map(run, enumerate(requests_)))


class EchoBackend(Backend):
    """Returns the source minus its flag and prefix."""

    def predict(self, request: PredictionRequest) -> str:
        return request.text


class OracleBackend(Backend):
    """Gold-target lookup from a sample TSV; errors on unknown sources."""

    def __init__(self, table: Union[str, Path, dict]):
        if isinstance(table, dict):
            self.table = dict(table)
        else:
            self.table = dict(read_sample_pairs(table))

    def predict(self, request: PredictionRequest) -> str:
        try:
            return self.table[request.source]
        except KeyError:
            raise UnknownSourceError(request.source) from None


class RemoteBackend(Backend):
    """HTTP client for the wire protocol: POST /predict, GET /health."""

    def __init__(self, endpoint: str, timeout: float = 30.0, retries: int = 2,
                 truncate_oversize: bool = True):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.retries = retries
        self.truncate_oversize = truncate_oversize

    def healthy(self) -> bool:
        try:
            response = requests.get(
                f"{self.endpoint}/health", timeout=self.timeout
            )
            return response.status_code == 200
        except requests.RequestException:
            return False

    def predict(self, request: PredictionRequest) -> str:
        payload = {"source": request.source}
        attempt = 0
        while True:
            try:
                response = requests.post(
                    f"{self.endpoint}/predict", json=payload, timeout=self.timeout
                )
                break
            except requests.Timeout as err:
                raise BackendTimeoutError(str(err)) from err
            except requests.ConnectionError as err:
                if attempt >= self.retries:
                    raise BackendConnectionError(str(err)) from err
                time.sleep(0.1 * (2 ** attempt))
                attempt += 1
            except requests.RequestException as err:
                raise BackendConnectionError(str(err)) from err
        if response.status_code != 200:
            raise BackendProtocolError(
                f"/predict returned status {response.status_code}"
            )
        try:
            target = response.json()["target"]
        except (ValueError, KeyError) as err:
            raise BackendProtocolError(f"malformed response body: {err}") from err
        if not isinstance(target, str):
            raise BackendProtocolError("response target is not a string")
        if len(target) > request.max_output_chars:
            if not self.truncate_oversize:
                raise OversizeOutputError(
                    f"output length {len(target)} exceeds bound "
                    f"{request.max_output_chars}"
                )
            target = target[: request.max_output_chars]
        return target


def make_backend(config: BackendConfig) -> Backend:
    if config.kind == "echo":
        return EchoBackend()
    if config.kind == "oracle":
        return OracleBackend(config.oracle_path)
    return RemoteBackend(
        config.endpoint,
        timeout=config.timeout,
        retries=config.retries,
        truncate_oversize=config.truncate_oversize,
    )


def predict_sources(
    sources: Iterable[str], backend: Backend, config: Optional[BackendConfig] = None
) -> list[PredictionOutcome]:
    config = config or BackendConfig()
    requests_ = [PredictionRequest(source=s) for s in sources]
    return backend.predict_batch(requests_, max_in_flight=config.max_in_flight)
