from __future__ import annotations

from pathlib import Path
from typing import Optional

try:
    from prometheus_client import (
        CONTENT_TYPE_LATEST,
        CollectorRegistry,
        Counter,
        Gauge,
        Histogram,
        generate_latest,
    )
except ImportError as exc:  # pragma: no cover - defensive guardrail
    raise RuntimeError(
        "prometheus_client is required for telemetry. Please add it to dependencies."
    ) from exc


class BaseMetrics:
    """Интерфейс метрик подкоманд симулятора."""

    def inc_command_run(self, command: str) -> None:
        raise NotImplementedError

    def inc_command_error(self, command: str, error_type: str) -> None:
        raise NotImplementedError

    def observe_latency(self, command: str, seconds: float) -> None:
        raise NotImplementedError

    def add_frames(self, outcome: str, count: int) -> None:
        raise NotImplementedError

    def render(self) -> tuple[str, str]:
        """
        Вернуть сериализованные метрики и MIME-тип.
        """
        raise NotImplementedError

    def write_textfile(self, path: Path) -> None:
        body, _ = self.render()
        path.write_text(body, encoding="utf-8")


class NullMetrics(BaseMetrics):
    """Пустая реализация, когда мониторинг выключен."""

    def inc_command_run(self, command: str) -> None:  # pragma: no cover - простая заглушка
        return None

    def inc_command_error(self, command: str, error_type: str) -> None:  # pragma: no cover - простая заглушка
        return None

    def observe_latency(self, command: str, seconds: float) -> None:  # pragma: no cover - простая заглушка
        return None

    def add_frames(self, outcome: str, count: int) -> None:  # pragma: no cover - простая заглушка
        return None

    def render(self) -> tuple[str, str]:
        return "# monitoring disabled\n", "text/plain"


class SimMetrics(BaseMetrics):
    """
    Prometheus-метрики для lumicell.

    Экспортирует:
    - lumicell_command_runs_total{command}
    - lumicell_command_errors_total{command,error_type}
    - lumicell_command_latency_seconds{command}
    - lumicell_frames_total{outcome}
    - lumicell_up (gauge)
    """

    def __init__(self, registry: Optional[CollectorRegistry] = None) -> None:
        self.registry = registry or CollectorRegistry()
        self.command_runs_total = Counter(
            "lumicell_command_runs_total",
            "Total number of subcommand runs.",
            ["command"],
            registry=self.registry,
        )
        self.command_errors_total = Counter(
            "lumicell_command_errors_total",
            "Total number of subcommand errors by type.",
            ["command", "error_type"],
            registry=self.registry,
        )
        self.command_latency_seconds = Histogram(
            "lumicell_command_latency_seconds",
            "Wall-clock duration of subcommands in seconds.",
            ["command"],
            registry=self.registry,
            buckets=(0.1, 0.5, 1, 5, 10, 30, 60, 300, 900, 1800),
        )
        self.frames_total = Counter(
            "lumicell_frames_total",
            "Beacon frames handled by the receiver by outcome.",
            ["outcome"],
            registry=self.registry,
        )
        self.up_gauge = Gauge(
            "lumicell_up",
            "Synthetic metric indicating the simulator process is running.",
            registry=self.registry,
        )
        self.up_gauge.set(1)

    def inc_command_run(self, command: str) -> None:
        self.command_runs_total.labels(command=command).inc()

    def inc_command_error(self, command: str, error_type: str) -> None:
        self.command_errors_total.labels(command=command, error_type=error_type).inc()

    def observe_latency(self, command: str, seconds: float) -> None:
        self.command_latency_seconds.labels(command=command).observe(seconds)

    def add_frames(self, outcome: str, count: int) -> None:
        if count > 0:
            self.frames_total.labels(outcome=outcome).inc(count)

    def render(self) -> tuple[str, str]:
        body = generate_latest(self.registry).decode("utf-8")
        return body, CONTENT_TYPE_LATEST
