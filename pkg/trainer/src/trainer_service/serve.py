"""Inference service on the prediction wire protocol.

POST /predict {"source": str} -> {"target": str}; GET /health -> 200.
Greedy decoding; malformed request bodies get a 400.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .model import ByteSeq2Seq, load_checkpoint
from .train import decode_sources


class PredictService:
    def __init__(self, model: ByteSeq2Seq, max_source_len: int, max_target_len: int):
        self.model = model
        self.max_source_len = max_source_len
        self.max_target_len = max_target_len

    @classmethod
    def from_checkpoint(cls, directory: str | Path) -> "PredictService":
        model, config = load_checkpoint(directory)
        return cls(
            model,
            max_source_len=int(config.get("max_source_len", 512)),
            max_target_len=int(config.get("max_target_len", 512)),
        )

    def predict(self, source: str) -> str:
        return decode_sources(
            self.model, [source], self.max_source_len, self.max_target_len
        )[0]


class PredictionBody(BaseModel):
    source: str


def make_app(service: PredictService) -> FastAPI:
    app = FastAPI(title="sanskrit-trainer-service")

    @app.exception_handler(RequestValidationError)
    async def bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request"})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/predict")
    def predict(body: PredictionBody):
        return {"target": service.predict(body.source)}

    return app


def serve(checkpoint_dir: str | Path, host: str = "127.0.0.1", port: int = 8700):
    import uvicorn

    service = PredictService.from_checkpoint(checkpoint_dir)
    uvicorn.run(make_app(service), host=host, port=port, log_level="warning")
