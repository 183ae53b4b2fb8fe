from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Mapping, Optional

from dotenv import find_dotenv, load_dotenv
from pydantic import ValidationError

from .exceptions import ConfigParseError
from .models import RunConfig

# Приоритетно загружаем .env.lumicell (если есть), затем .env.
load_dotenv(find_dotenv(filename=".env.lumicell", raise_error_if_not_found=False))
load_dotenv(find_dotenv())

_LOG_LEVELS = {"CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"}


def _get_bool(value: Optional[str], *, default: bool = False) -> bool:
    if value is None:
        return default
    return value.lower() in {"1", "true", "yes", "y", "on"}


DEFAULT_SEED = int(os.getenv("LUMICELL_SEED", "2017"))
DEFAULT_THREADS = int(os.getenv("LUMICELL_THREADS", "1"))
DEFAULT_OUTPUT_DIR = os.getenv("LUMICELL_OUTPUT_DIR", "runs")
DEFAULT_LOG_LEVEL = os.getenv("LUMICELL_LOG_LEVEL", "INFO").upper()
DEFAULT_ENABLE_MONITORING = _get_bool(os.getenv("LUMICELL_ENABLE_MONITORING") or os.getenv("ENABLE_MONITORING"))
DEFAULT_OTEL_ENDPOINT = os.getenv("LUMICELL_OTEL_ENDPOINT") or os.getenv("OTEL_ENDPOINT")
DEFAULT_OTEL_SERVICE_NAME = os.getenv("LUMICELL_OTEL_SERVICE_NAME") or os.getenv("OTEL_SERVICE_NAME") or "lumicell"


@dataclass
class LumicellConfig:
    """
    Хранит параметры окружения запуска: seed, параллелизм, каталог вывода и телеметрию.
    """

    seed: int = DEFAULT_SEED
    threads: int = DEFAULT_THREADS
    output_dir: str = DEFAULT_OUTPUT_DIR
    log_level: str = DEFAULT_LOG_LEVEL
    enable_monitoring: bool = DEFAULT_ENABLE_MONITORING
    otel_endpoint: Optional[str] = DEFAULT_OTEL_ENDPOINT
    otel_service_name: Optional[str] = DEFAULT_OTEL_SERVICE_NAME

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.threads <= 0:
            raise ValueError("threads must be positive")
        if not self.output_dir:
            raise ValueError("output_dir must not be empty")
        self.log_level = self.log_level.upper()
        if self.log_level not in _LOG_LEVELS:
            raise ValueError(f"unknown log level: {self.log_level}")

    @classmethod
    def from_env(cls) -> "LumicellConfig":
        """
        Построить конфигурацию из переменных окружения.
        """
        return cls(
            seed=int(os.getenv("LUMICELL_SEED", str(DEFAULT_SEED))),
            threads=int(os.getenv("LUMICELL_THREADS", str(DEFAULT_THREADS))),
            output_dir=os.getenv("LUMICELL_OUTPUT_DIR", DEFAULT_OUTPUT_DIR),
            log_level=os.getenv("LUMICELL_LOG_LEVEL", DEFAULT_LOG_LEVEL),
            enable_monitoring=_get_bool(
                os.getenv("LUMICELL_ENABLE_MONITORING") or os.getenv("ENABLE_MONITORING"),
                default=DEFAULT_ENABLE_MONITORING,
            ),
            otel_endpoint=os.getenv("LUMICELL_OTEL_ENDPOINT") or os.getenv("OTEL_ENDPOINT"),
            otel_service_name=os.getenv("LUMICELL_OTEL_SERVICE_NAME") or os.getenv("OTEL_SERVICE_NAME") or "lumicell",
        )

    def configure_logging(self) -> None:
        logging.basicConfig(
            level=getattr(logging, self.log_level),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )


# ---- Файлы конфигурации запуска ----


def _as_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in {"1", "true", "yes", "y", "on"}:
        return True
    if lowered in {"0", "false", "no", "n", "off"}:
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _as_int_list(raw: str) -> list[int]:
    return [int(part) for part in raw.split(",") if part.strip()]


# Ключ файла -> (поле RunConfig, преобразователь значения)
CONFIG_KEYS: dict[str, tuple[str, Callable[[str], Any]]] = {
    "run.seed": ("seed", int),
    "run.threads": ("threads", int),
    "run.scenario": ("scenario", str),
    "mac.n_slots": ("n_slots", int),
    "mac.mode": ("mode", str),
    "mac.transmitters": ("transmitters", int),
    "mac.frames": ("frames", int),
    "mac.slot_list": ("slot_list", _as_int_list),
    "receiver.noise_sigma": ("noise_sigma", float),
    "receiver.fov_deg": ("fov_deg", float),
    "map.resolution": ("resolution", float),
    "phy.oversample": ("oversample", int),
    "phy.lpf_cutoff": ("lpf_cutoff", float),
    "phy.count": ("count", int),
    "phy.corrupt": ("corrupt", int),
    "loc.sigma_move": ("sigma_move", float),
    "loc.static_cycles": ("static_cycles", int),
    "loc.fixed_cycles": ("fixed_cycles", int),
    "loc.light_off": ("light_off", _as_bool),
    "fingerprint.repetitions": ("fingerprint_repetitions", int),
    "floor.repetitions": ("floor_repetitions", int),
}
_FIELD_TO_KEY = {field_name: key for key, (field_name, _) in CONFIG_KEYS.items()}


def parse_config_text(text: str) -> dict[str, Any]:
    """
    Разобрать плоский текст `section.key=value` в словарь полей RunConfig.

    Raises:
        ConfigParseError: неизвестный или повторный ключ, строка без '=', значение не приводится к типу
    """
    values: dict[str, Any] = {}
    seen: set[str] = set()
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigParseError(
                f"line {lineno}: expected key=value, got {line!r}",
                details={"key": line, "line": lineno},
            )
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in CONFIG_KEYS:
            raise ConfigParseError(f"unknown config key '{key}'", details={"key": key, "line": lineno})
        if key in seen:
            raise ConfigParseError(f"duplicate config key '{key}'", details={"key": key, "line": lineno})
        seen.add(key)
        field_name, convert = CONFIG_KEYS[key]
        try:
            values[field_name] = convert(raw_value)
        except ValueError as exc:
            raise ConfigParseError(
                f"invalid value for '{key}': {raw_value!r}",
                details={"key": key, "line": lineno, "reason": str(exc)},
            ) from exc
    return values


def parse_overrides(pairs: list[str]) -> dict[str, Any]:
    """Разобрать список `--set key=value` тем же парсером, что и файл."""
    return parse_config_text("\n".join(pairs))


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Прочитать файл конфигурации; OSError пробрасывается как ошибка ввода-вывода."""
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def build_run_config(
    subcommand: str,
    *layers: Mapping[str, Any],
    env: Optional[LumicellConfig] = None,
) -> RunConfig:
    """
    Собрать RunConfig: окружение < слои по порядку (файл, затем флаги CLI).

    Ошибки валидации pydantic переводятся в ConfigParseError с именем ключа.
    """
    env = env or LumicellConfig.from_env()
    merged: dict[str, Any] = {
        "subcommand": subcommand,
        "seed": env.seed,
        "threads": env.threads,
        "outdir": env.output_dir,
    }
    for layer in layers:
        merged.update({name: value for name, value in layer.items() if value is not None})
    try:
        return RunConfig(**merged)
    except ValidationError as exc:
        first = exc.errors()[0]
        field_name = str(first["loc"][0]) if first.get("loc") else "?"
        key = _FIELD_TO_KEY.get(field_name, field_name)
        raise ConfigParseError(
            f"invalid value for '{key}': {first.get('msg')}",
            details={"key": key, "errors": exc.errors(include_url=False, include_context=False)},
        ) from exc


__all__ = [
    "CONFIG_KEYS",
    "LumicellConfig",
    "build_run_config",
    "load_config_file",
    "parse_config_text",
    "parse_overrides",
]
