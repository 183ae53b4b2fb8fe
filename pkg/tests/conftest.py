import sys
from pathlib import Path

import pytest

# Добавляем корень репозитория в sys.path для импортов без установки пакета.
ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from lumicell.models import PhyConfig  # noqa: E402


@pytest.fixture
def phy_cfg() -> PhyConfig:
    return PhyConfig()


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch):
    """Переменные LUMICELL_* окружения разработчика не влияют на тесты."""
    for name in (
        "LUMICELL_SEED",
        "LUMICELL_THREADS",
        "LUMICELL_OUTPUT_DIR",
        "LUMICELL_LOG_LEVEL",
        "LUMICELL_ENABLE_MONITORING",
        "ENABLE_MONITORING",
        "LUMICELL_OTEL_ENDPOINT",
        "OTEL_ENDPOINT",
        "LUMICELL_OTEL_SERVICE_NAME",
        "OTEL_SERVICE_NAME",
    ):
        monkeypatch.delenv(name, raising=False)
