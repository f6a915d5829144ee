import json
import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field

from app.models.backend import BackendDescriptor, BackendKind

ASSETS_DIR = Path(__file__).parent / "assets"
DEFAULT_SPEC_PATH = str(ASSETS_DIR / "default_spec.masmp")
DEFAULT_CATALOG_PATH = str(ASSETS_DIR / "catalog.json")

# env var -> settings field
_ENV_OVERRIDES = {
    "MASMP_BACKEND": "backend_kind",
    "MASMP_ENDPOINT": "backend_endpoint",
    "MASMP_MODEL": "backend_model",
    "MASMP_API_KEY_ENV": "backend_auth_env",
    "MASMP_TIMEOUT_SECONDS": "backend_timeout_seconds",
    "MASMP_TRANSCRIPT": "transcript_path",
    "MASMP_SPEC": "spec_path",
    "MASMP_CATALOG": "catalog_path",
    "MASMP_DECISION_PERIOD": "decision_period",
    "MASMP_RETRY_BUDGET": "retry_budget",
    "MASMP_TICK_LIMIT": "tick_limit",
    "MASMP_TEMPERATURE": "temperature",
    "MASMP_MAX_TOKENS": "max_tokens",
    "MASMP_WORKERS": "workers",
    "MASMP_LOG_LEVEL": "log_level",
}


class Settings(BaseModel):
    # Backend
    backend_kind: BackendKind = Field(
        default=BackendKind.ORACLE,
        description="Text-generation backend: remote, scripted or oracle",
    )
    backend_endpoint: Optional[str] = Field(
        default=None,
        description="Base URL of the chat-completion endpoint, e.g. http://localhost:8000/v1",
    )
    backend_model: Optional[str] = Field(
        default=None,
        description="Model name sent in the request body",
    )
    backend_auth_env: str = Field(
        default="MASMP_API_KEY",
        description="Environment variable holding the bearer token (never the token itself)",
    )
    backend_timeout_seconds: float = Field(default=30.0, gt=0)
    transcript_path: Optional[str] = Field(
        default=None,
        description="JSON Lines transcript replayed by the scripted backend",
    )

    # Agent / spec
    spec_path: str = Field(default=DEFAULT_SPEC_PATH, description="Spec DSL file")
    catalog_path: str = Field(default=DEFAULT_CATALOG_PATH, description="Unit catalog JSON")
    decision_period: int = Field(default=8, ge=1)
    retry_budget: int = Field(default=2, ge=0)
    temperature: float = Field(default=0.0, ge=0.0)
    max_tokens: int = Field(default=512, gt=0)

    # Simulation / evaluation
    tick_limit: int = Field(default=2000, gt=0)
    workers: int = Field(default=1, ge=1)
    log_level: str = Field(default="INFO")

    @classmethod
    def from_env(cls, config_path: Optional[str] = None) -> "Settings":
        values: Dict[str, Any] = {}

        # Optionale Konfigurationsdatei, Umgebungsvariablen haben Vorrang
        config_path = config_path or os.getenv("MASMP_CONFIG")
        if config_path:
            values.update(_read_config_file(config_path))

        for env_name, field_name in _ENV_OVERRIDES.items():
            raw = os.getenv(env_name)
            if raw is not None and raw.strip():
                values[field_name] = raw.strip()

        return cls(**values)

    def backend_descriptor(self, kind: Optional[BackendKind] = None) -> BackendDescriptor:
        return BackendDescriptor(
            kind=kind or self.backend_kind,
            endpoint=self.backend_endpoint,
            model_name=self.backend_model,
            auth_env=self.backend_auth_env,
            timeout_seconds=self.backend_timeout_seconds,
            transcript_path=self.transcript_path,
            spec_path=self.spec_path,
        )


def _read_config_file(path: str) -> Dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise RuntimeError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise RuntimeError(f"config file {path} must contain a JSON object")
    unknown = set(data) - set(Settings.model_fields)
    if unknown:
        raise RuntimeError(f"unknown config keys in {path}: {sorted(unknown)}")
    return data


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings.from_env()
