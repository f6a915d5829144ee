import json
from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from app.config import DEFAULT_CATALOG_PATH, get_settings
from app.models.catalog import Catalog


@lru_cache(maxsize=8)
def load_catalog(path: str = DEFAULT_CATALOG_PATH) -> Catalog:
    """
    Load and validate a unit catalog file.

    Raises RuntimeError if the file is missing or does not match the
    documented key set; catalogs are cached per path.
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise RuntimeError(f"cannot read catalog {path}: {exc}") from exc
    try:
        return Catalog.model_validate(raw)
    except ValidationError as exc:
        raise RuntimeError(f"invalid catalog {path}: {exc}") from exc


def get_catalog(path: Optional[str] = None) -> Catalog:
    return load_catalog(path or get_settings().catalog_path)
