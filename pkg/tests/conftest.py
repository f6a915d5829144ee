import os

import pytest

from app.config import DEFAULT_CATALOG_PATH, DEFAULT_SPEC_PATH, get_settings
from app.models.catalog import Catalog
from app.models.machine import MachineSpec
from app.services.catalog import load_catalog
from app.services.spec_parser import load_spec


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long acceptance runs over many episodes")


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch):
    # Settings werden pro Prozess gecacht, jeder Test startet von der Umgebung
    for name in list(os.environ):
        if name.startswith("MASMP_"):
            monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def catalog() -> Catalog:
    return load_catalog(DEFAULT_CATALOG_PATH)


@pytest.fixture
def default_spec(catalog) -> MachineSpec:
    return load_spec(DEFAULT_SPEC_PATH, catalog)
