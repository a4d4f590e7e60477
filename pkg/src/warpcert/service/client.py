"""Clients for the certification service.

LocalClient runs the handlers in process (no server needed); HttpClient
talks to a running instance over HTTP.  Both expose the same three calls
with the same pydantic models.
"""

from __future__ import annotations

import httpx

from . import app as service
from .schemas import (
    OracleRequest,
    OracleResponse,
    SynthesizeRequest,
    SynthesizeResponse,
    VerifyRequest,
    VerifyResponse,
)


class LocalClient:
    def synthesize(self, req: SynthesizeRequest) -> SynthesizeResponse:
        return service.handle_synthesize(req)

    def verify(self, req: VerifyRequest) -> VerifyResponse:
        return service.handle_verify(req)

    def oracle(self, req: OracleRequest) -> OracleResponse:
        return service.handle_oracle(req)


class HttpClient:
    def __init__(self, base_url: str, timeout: float = 600.0):
        self._client = httpx.Client(base_url=base_url, timeout=timeout)

    def _post(self, path, req, model):
        resp = self._client.post(path, json=req.model_dump())
        resp.raise_for_status()
        return model.model_validate(resp.json())

    def synthesize(self, req: SynthesizeRequest) -> SynthesizeResponse:
        return self._post("/synthesize", req, SynthesizeResponse)

    def verify(self, req: VerifyRequest) -> VerifyResponse:
        return self._post("/verify", req, VerifyResponse)

    def oracle(self, req: OracleRequest) -> OracleResponse:
        return self._post("/oracle", req, OracleResponse)


def make_client(server: str | None = None):
    """HTTP client when a server URL is given, in-process handlers otherwise."""
    return HttpClient(server) if server else LocalClient()
