"""
Text-generation backends: a remote chat-completion endpoint, a scripted
transcript replay and the oracle that wraps the symbolic executor.

Backends never retry on their own; the decision loop owns the retry budget
and records every attempt.
"""

import json
import logging
import os
import threading
from pathlib import Path
from typing import Any, Dict, List, Optional, Protocol

import httpx

from app.models.backend import BackendDescriptor, BackendKind, GenerationRequest, HealthStatus
from app.models.catalog import Catalog
from app.models.machine import MachineSpec
from app.services.output_parser import render_output
from app.services.spec_parser import load_spec
from app.services.symbolic import SymbolicDecision, symbolic_execute

logger = logging.getLogger(__name__)


class BackendError(RuntimeError):
    pass


class TransportError(BackendError):
    """Timeout, non-success status or malformed body from the remote endpoint."""


class TranscriptEndError(BackendError):
    """The scripted transcript has no entries left."""


class BackendConfigError(BackendError):
    pass


class Backend(Protocol):
    kind: BackendKind

    def generate(self, request: GenerationRequest) -> str:
        ...

    def health(self) -> HealthStatus:
        ...


def close_backend(backend: Backend) -> None:
    """Release connections held by `backend`; backends without a close() hold none."""
    close = getattr(backend, "close", None)
    if callable(close):
        close()


class RemoteBackend:
    """Single-attempt client for a chat-completion endpoint."""

    kind = BackendKind.REMOTE

    def __init__(self, descriptor: BackendDescriptor, client: Optional[httpx.Client] = None) -> None:
        self.descriptor = descriptor
        self.base_url = (descriptor.endpoint or "").rstrip("/")
        # an injected client belongs to the caller
        self._owns_client = client is None
        self._client = client or httpx.Client(timeout=descriptor.timeout_seconds)

    def close(self) -> None:
        if self._owns_client:
            self._client.close()

    def __enter__(self) -> "RemoteBackend":
        return self

    def __exit__(self, *exc_info: Any) -> None:
        self.close()

    def _headers(self) -> Dict[str, str]:
        headers = {"Content-Type": "application/json"}
        token = os.getenv(self.descriptor.auth_env) if self.descriptor.auth_env else None
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def request_body(self, request: GenerationRequest) -> Dict[str, Any]:
        body: Dict[str, Any] = {
            "model": self.descriptor.model_name,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        if request.seed is not None:
            body["seed"] = request.seed
        return body

    def generate(self, request: GenerationRequest) -> str:
        url = f"{self.base_url}/chat/completions"
        try:
            response = self._client.post(
                url,
                json=self.request_body(request),
                headers=self._headers(),
                timeout=self.descriptor.timeout_seconds,
            )
        except httpx.TimeoutException as exc:
            raise TransportError(f"timeout after {self.descriptor.timeout_seconds}s") from exc
        except httpx.HTTPError as exc:
            raise TransportError(f"request to {url} failed: {exc}") from exc

        if response.status_code // 100 != 2:
            raise TransportError(f"HTTP {response.status_code}: {response.text[:200]}")
        try:
            content = response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError("malformed chat-completion body") from exc
        if not isinstance(content, str):
            raise TransportError("malformed chat-completion body: content is not text")
        return content

    def health(self) -> HealthStatus:
        try:
            response = self._client.get(
                f"{self.base_url}/models",
                headers=self._headers(),
                timeout=self.descriptor.timeout_seconds,
            )
        except httpx.HTTPError as exc:
            logger.warning("backend health request failed: %s", exc)
            return HealthStatus.UNREACHABLE
        if response.status_code in (401, 403):
            return HealthStatus.UNAUTHORIZED
        if response.status_code >= 400:
            return HealthStatus.UNREACHABLE
        return HealthStatus.OK


class ScriptedBackend:
    """
    Replays a JSON Lines transcript, one {"completion": text} per line.
    The transcript is read on first use; calls are served in file order.
    """

    kind = BackendKind.SCRIPTED

    def __init__(self, transcript_path: str) -> None:
        self.transcript_path = Path(transcript_path)
        self._entries: Optional[List[str]] = None
        self._position = 0
        self._lock = threading.Lock()

    def _load(self) -> List[str]:
        try:
            lines = self.transcript_path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise BackendConfigError(f"cannot read transcript {self.transcript_path}: {exc}") from exc
        entries = []
        for number, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                completion = json.loads(line)["completion"]
            except (ValueError, KeyError, TypeError) as exc:
                raise BackendConfigError(f"transcript line {number} is malformed") from exc
            if not isinstance(completion, str):
                raise BackendConfigError(f"transcript line {number}: completion is not text")
            entries.append(completion)
        return entries

    def generate(self, request: GenerationRequest) -> str:
        with self._lock:
            if self._entries is None:
                self._entries = self._load()
            if self._position >= len(self._entries):
                raise TranscriptEndError(
                    f"transcript {self.transcript_path} exhausted after {len(self._entries)} entries"
                )
            completion = self._entries[self._position]
            self._position += 1
            return completion

    def health(self) -> HealthStatus:
        return HealthStatus.OK if self.transcript_path.is_file() else HealthStatus.UNREACHABLE


def oracle_reasoning(decision: SymbolicDecision) -> str:
    if decision.fired is not None:
        return decision.fired.nl_gloss
    return f"No transition condition holds, so the tactic stays <{decision.state}>."


class OracleBackend:
    """Answers with the symbolic executor's decision in contract form."""

    kind = BackendKind.ORACLE

    def __init__(self, spec: MachineSpec) -> None:
        self.spec = spec

    def decide(self, request: GenerationRequest) -> SymbolicDecision:
        if request.context is None:
            raise BackendConfigError("oracle backend needs the structured decision context")
        return symbolic_execute(self.spec, request.context.observation, request.context.last)

    def generate(self, request: GenerationRequest) -> str:
        decision = self.decide(request)
        return render_output(
            oracle_reasoning(decision), decision.record.variables, decision.actions
        )

    def health(self) -> HealthStatus:
        return HealthStatus.OK


def build_backend(
    descriptor: BackendDescriptor,
    spec: Optional[MachineSpec] = None,
    catalog: Optional[Catalog] = None,
) -> Backend:
    if descriptor.kind is BackendKind.REMOTE:
        return RemoteBackend(descriptor)
    if descriptor.kind is BackendKind.SCRIPTED:
        return ScriptedBackend(descriptor.transcript_path)
    if spec is None:
        spec = load_spec(descriptor.spec_path, catalog)
    return OracleBackend(spec)


def health_check(backend: Backend) -> HealthStatus:
    status = backend.health()
    if status is not HealthStatus.OK:
        logger.warning("%s backend health: %s", backend.kind.value, status.value)
    return status
