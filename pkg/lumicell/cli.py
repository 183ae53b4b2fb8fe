"""
Командная строка lumicell: `lumicell <подкоманда> [флаги]`.

Порядок слоёв конфигурации: окружение < файл --config < --set < явные флаги.
Ошибка разбора конфигурации завершает процесс с кодом 1 до начала прогона.
"""

from __future__ import annotations

import argparse
import logging
from dataclasses import replace
from typing import Any, Optional, Sequence

from . import __version__
from .commands import COMMANDS, CommandReport, init_command_dependencies
from .config import LumicellConfig, build_run_config, load_config_file, parse_overrides
from .error_mapper import EXIT_IO, EXIT_VALIDATION, ErrorMapper
from .exceptions import ConfigParseError
from .models import RunConfig
from .telemetry import NullMetrics, SimMetrics, SimTracing

logger = logging.getLogger(__name__)


class _ArgumentParser(argparse.ArgumentParser):
    """argparse с ошибками через ConfigParseError: код выхода 2 зарезервирован за приёмкой."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigParseError(f"{self.prog}: {message}", details={"key": "argv"})


class SimRunner:
    """
    Связывает конфигурацию окружения с телеметрией и запускает подкоманды.
    """

    def __init__(self, config: LumicellConfig) -> None:
        self.config = config
        self.metrics = SimMetrics() if config.enable_monitoring else NullMetrics()
        self.tracing = SimTracing(
            service_name=config.otel_service_name,
            otel_endpoint=config.otel_endpoint,
        )
        init_command_dependencies(self.metrics, self.tracing, monitoring=config.enable_monitoring)

    def run(self, run_config: RunConfig) -> CommandReport:
        try:
            return COMMANDS[run_config.subcommand](run_config)
        finally:
            self.tracing.shutdown()


# ---- Разбор аргументов ----


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Файл конфигурации key=value")
    parser.add_argument("--outdir", help="Корневой каталог вывода (результаты в <outdir>/<подкоманда>)")
    parser.add_argument("--seed", type=int, help="Seed генераторов случайных чисел")
    parser.add_argument("--threads", type=int, help="Число рабочих потоков")
    parser.add_argument("--log-level", help="Уровень логирования")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Переопределение ключа конфигурации, можно повторять",
    )
    parser.add_argument("--check", action="store_true", default=None, help="Проверить приёмочные критерии")
    parser.add_argument("--scenario", help="Встроенный сценарий: testbed, testbed-light-off, floor")


def _slot_list(raw: str) -> list[int]:
    return [int(part) for part in raw.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="lumicell", description="VLC beacon positioning simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_ArgumentParser)

    phy = sub.add_parser("phy-roundtrip", help="Кодирование и декодирование кадров через полную цепочку")
    _common_flags(phy)
    phy.add_argument("--count", type=int, help="Число случайных идентификаторов")
    phy.add_argument("--corrupt", type=int, help="Число кадров для перебора одиночных искажений")
    phy.add_argument("--noise-sigma", type=float, help="СКО аддитивного шума")

    rate = sub.add_parser("success-rate", help="Вероятность успеха BFSA от числа слотов")
    _common_flags(rate)
    rate.add_argument("--slots", dest="slot_list", type=_slot_list, help="Список N через запятую")
    rate.add_argument("--transmitters", type=int, help="Число передатчиков n")
    rate.add_argument("--frames", type=int, help="Кадров Монте-Карло на точку")

    floor = sub.add_parser("floor-sim", help="Модифицированная вероятность успеха на этаже")
    _common_flags(floor)
    floor.add_argument("--n-slots", type=int, help="Слотов в кадре MAC")
    floor.add_argument("--mode", choices=["synchronized", "asynchronous", "waveform"], help="Модель коллизий")
    floor.add_argument("--frames", type=int, help="Кадров MAC на точку")
    floor.add_argument("--noise-sigma", type=float, help="СКО шума приёмника")
    floor.add_argument("--trace", action="store_true", default=None, help="Записать trace.csv")

    loc = sub.add_parser("localize", help="Эксперименты локализации на стенде")
    _common_flags(loc)
    loc.add_argument("--n-slots", type=int, help="Слотов в кадре MAC")
    loc.add_argument("--noise-sigma", type=float, help="СКО шума приёмника")
    loc.add_argument("--resolution", type=float, help="Шаг карты, м")
    loc.add_argument("--sigma-move", type=float, help="СКО модели движения, м")
    loc.add_argument("--no-light-off", dest="light_off", action="store_false", default=None)
    return parser


_NON_CONFIG_ARGS = {"subcommand", "config", "overrides", "log_level"}


def _flag_layer(args: argparse.Namespace) -> dict[str, Any]:
    return {key: value for key, value in vars(args).items() if key not in _NON_CONFIG_ARGS and value is not None}


def _fail(message: str, code: int) -> int:
    logger.error(message)
    print(f"lumicell: error: {message}")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Точка входа CLI; возвращает код выхода 0/1/2/3.
    """
    try:
        args = build_parser().parse_args(argv)
        env = LumicellConfig.from_env()
        if args.log_level:
            env = replace(env, log_level=args.log_level)
    except (ConfigParseError, ValueError) as exc:
        return _fail(str(exc), EXIT_VALIDATION)
    env.configure_logging()

    try:
        file_layer = load_config_file(args.config) if args.config else {}
        overrides = parse_overrides(args.overrides)
        run_config = build_run_config(args.subcommand, file_layer, overrides, _flag_layer(args), env=env)
    except ConfigParseError as exc:
        return _fail(str(exc), ErrorMapper.exit_code_for_exception(exc))
    except OSError as exc:
        return _fail(f"cannot read config: {exc}", EXIT_IO)

    report = SimRunner(env).run(run_config)
    if report.ok:
        print(f"{report.command}: ok, {len(report.files)} file(s) in {run_config.output_path()}")
    else:
        assert report.error is not None
        print(f"{report.command}: {report.error.error_type}: {report.error.message}")
    return report.exit_code


__all__ = ["SimRunner", "build_parser", "main"]
