"""
Нормализованная иерархия исключений для `lumicell`.

Вычислительные модули (phy, mac, channel, gpr, localization) бросают эти
исключения, чтобы слой команд мог маппить их в `error_type` и код выхода
без разбора внутренних деталей.
"""

from typing import Any, Optional


class LumicellError(Exception):
    """Базовый класс для всех доменных ошибок lumicell."""

    error_type: str = "UNKNOWN"
    exit_code: int = 1

    def __init__(self, message: str, *, details: Optional[Any] = None) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    def __repr__(self) -> str:  # pragma: no cover - мелкий хелпер
        return f"{self.__class__.__name__}(message={self.message!r}, details={self.details!r})"


class PhyConfigError(LumicellError):
    """Параметры PhyConfig нарушают инварианты или несовместимы с частотой дискретизации сигнала."""

    error_type = "INVALID_PHY_CONFIG"


class InvalidPayloadError(LumicellError):
    """Идентификатор маяка или символы кадра вне допустимого диапазона."""

    error_type = "INVALID_PAYLOAD"


class SampleRateMismatchError(LumicellError):
    """Суммируемые сигналы имеют разные частоты дискретизации."""

    error_type = "SAMPLE_RATE_MISMATCH"


class DegenerateGeometryError(LumicellError):
    """Светильник и приёмник совпадают (d = 0)."""

    error_type = "DEGENERATE_GEOMETRY"


class IllConditionedKernelError(LumicellError):
    """Матрица K + σn²I не факторизуется даже после эскалации jitter."""

    error_type = "ILL_CONDITIONED_KERNEL"


class UnknownBeaconError(LumicellError):
    """В наблюдении есть маяк, для которого нет карты интенсивности."""

    error_type = "UNKNOWN_BEACON"


class InconsistentObservationError(LumicellError):
    """Апостериорное распределение обнулилось даже в лог-пространстве."""

    error_type = "OBSERVATION_INCONSISTENT"


class NoTransmissionsError(LumicellError):
    """Журнал передач пуст."""

    error_type = "NO_TRANSMISSIONS"


class LengthMismatchError(LumicellError):
    """Списки оценок и истинных позиций разной длины."""

    error_type = "LENGTH_MISMATCH"


class ConfigParseError(LumicellError):
    """Ошибка разбора файла конфигурации; `details["key"]` содержит проблемный ключ."""

    error_type = "CONFIG_PARSE"


class AcceptanceError(LumicellError):
    """Результат прогона не прошёл проверку приёмки."""

    error_type = "ACCEPTANCE_FAILED"
    exit_code = 2


class ScenarioError(LumicellError):
    """
    Ошибка модуля, обёрнутая контекстом сценария (точка, кадр).

    Наследует `error_type` исходной ошибки, чтобы маппинг оставался стабильным.
    """

    def __init__(self, message: str, *, cause: Exception, details: Optional[dict[str, Any]] = None) -> None:
        super().__init__(message, details=details)
        self.cause = cause
        self.error_type = getattr(cause, "error_type", "SCENARIO_FAILED")
        self.exit_code = getattr(cause, "exit_code", 1)


__all__ = [
    "AcceptanceError",
    "ConfigParseError",
    "DegenerateGeometryError",
    "IllConditionedKernelError",
    "InconsistentObservationError",
    "InvalidPayloadError",
    "LengthMismatchError",
    "LumicellError",
    "NoTransmissionsError",
    "PhyConfigError",
    "SampleRateMismatchError",
    "ScenarioError",
    "UnknownBeaconError",
]
