"""
Общая обвязка подкоманд: метрики, трассировка, маппинг ошибок и отчёт.

Каждая подкоманда передаёт сюда тело прогона; обвязка отвечает за счётчики,
спан, латентность, код выхода и запись metrics.prom при включённом мониторинге.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

from pydantic import BaseModel, Field

from ..artifacts import ensure_dir
from ..error_mapper import EXIT_OK, ErrorMapper, ErrorModel
from ..harness.scenarios import Scenario, builtin_scenario, customize
from ..models import RunConfig
from ..telemetry import NullMetrics, NullTracing
from ..telemetry.metrics import BaseMetrics
from ..telemetry.tracing import NOOP_SPAN

logger = logging.getLogger(__name__)

# Глобальные зависимости (инициализируются CLI при запуске)
_metrics: Optional[BaseMetrics] = None
_tracing = NullTracing()
_monitoring = False


def init_command_dependencies(metrics: Optional[BaseMetrics], tracing: Any, *, monitoring: bool = False) -> None:
    """Инициализировать зависимости для подкоманд."""
    global _metrics, _tracing, _monitoring
    _metrics = metrics
    _tracing = tracing or NullTracing()
    _monitoring = monitoring


def current_metrics() -> BaseMetrics:
    return _metrics or NullMetrics()


class CommandReport(BaseModel):
    """
    Результат подкоманды: метаданные запуска, сводка, записанные файлы или ошибка.
    """

    command: str = Field(description="Имя подкоманды")
    metadata: dict = Field(default_factory=dict, description="Метаданные запуска: seed, outdir, threads")
    summary: dict = Field(default_factory=dict, description="Сводка результатов")
    files: list[str] = Field(default_factory=list, description="Записанные артефакты")
    error: Optional[ErrorModel] = Field(default=None, description="Информация об ошибке, если прогон не удался")
    exit_code: int = Field(default=EXIT_OK, description="Код выхода CLI")

    @classmethod
    def success(
        cls,
        command: str,
        config: RunConfig,
        summary: dict[str, Any],
        files: list[Path],
    ) -> "CommandReport":
        return cls(
            command=command,
            metadata=_metadata(config),
            summary=summary,
            files=[str(path) for path in files],
        )

    @classmethod
    def from_error(cls, command: str, config: RunConfig, error: ErrorModel, exit_code: int) -> "CommandReport":
        return cls(command=command, metadata=_metadata(config), error=error, exit_code=exit_code)

    @property
    def ok(self) -> bool:
        return self.error is None


def _metadata(config: RunConfig) -> dict[str, Any]:
    return {
        "seed": config.seed,
        "outdir": config.output_path(),
        "threads": config.threads,
        "scenario": config.scenario,
    }


@dataclass
class CommandContext:
    """Состояние одного прогона: конфигурация, каталог вывода, спан и список файлов."""

    config: RunConfig
    outdir: Path
    span: Any = NOOP_SPAN
    files: list[Path] = field(default_factory=list)

    def path(self, name: str) -> Path:
        target = self.outdir / name
        ensure_dir(target.parent)
        return target

    def record(self, path: Path) -> Path:
        self.files.append(path)
        return path

    def frames(self, outcome: str, count: int) -> None:
        current_metrics().add_frames(outcome, count)


CommandBody = Callable[[CommandContext], dict[str, Any]]


def resolve_scenario(config: RunConfig, default: str, *, repetitions: Optional[int] = None) -> Scenario:
    """Встроенный сценарий по имени из конфигурации с переопределениями запуска."""
    scenario = builtin_scenario(config.scenario or default, seed=config.seed)
    return customize(
        scenario,
        n_slots=config.n_slots,
        mode=config.mode,
        noise_sigma=config.noise_sigma,
        fov_deg=config.fov_deg,
        repetitions=repetitions,
        fingerprint_repetitions=config.fingerprint_repetitions,
        resolution=config.resolution,
        oversample=config.oversample,
        lpf_cutoff=config.lpf_cutoff,
    )


def execute(command: str, config: RunConfig, body: CommandBody) -> CommandReport:
    """
    Выполнить тело подкоманды с метриками, спаном и маппингом ошибок.

    Ошибки не пробрасываются: они превращаются в отчёт с error и exit_code.
    """
    metrics = current_metrics()
    start_ts = time.perf_counter()
    metrics.inc_command_run(command)
    outdir = Path(config.output_path())
    logger.info("%s: starting, output in %s", command, outdir)

    with _tracing.start_span(command) as span:
        if span is None:
            span = NOOP_SPAN
        span.set_attribute("seed", config.seed)
        span.set_attribute("threads", config.threads)
        try:
            ensure_dir(outdir)
            ctx = CommandContext(config=config, outdir=outdir, span=span)
            summary = body(ctx)
            span.set_attribute("success", True)
            logger.info("%s: finished, %d file(s) written to %s", command, len(ctx.files), outdir)
            report = CommandReport.success(command, config, summary, ctx.files)
        except Exception as exc:
            error_type = ErrorMapper.get_error_type_for_exception(exc)
            metrics.inc_command_error(command, error_type)
            span.set_attribute("error", str(exc))
            span.set_attribute("error_type", error_type)
            logger.error("%s failed [%s]: %s", command, error_type, exc)
            report = CommandReport.from_error(
                command,
                config,
                ErrorMapper.map_exception(exc),
                ErrorMapper.exit_code_for_exception(exc),
            )
        finally:
            metrics.observe_latency(command, time.perf_counter() - start_ts)

    if _monitoring:
        try:
            ensure_dir(outdir)
            metrics.write_textfile(outdir / "metrics.prom")
        except OSError as exc:
            logger.warning("could not write metrics textfile: %s", exc)
    return report


__all__ = [
    "CommandContext",
    "CommandReport",
    "current_metrics",
    "execute",
    "init_command_dependencies",
    "resolve_scenario",
]
