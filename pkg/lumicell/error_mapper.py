"""
Маппер исключений в унифицированную модель ошибки и код выхода CLI.

Команды получают один и тот же формат ошибок независимо от того, в каком
вычислительном модуле возникла проблема.
"""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field, ValidationError

from .exceptions import LumicellError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_ACCEPTANCE = 2
EXIT_IO = 3


class ErrorModel(BaseModel):
    """
    Унифицированная модель ошибки для отчётов команд.
    """

    error_type: str = Field(description="Тип ошибки (INVALID_PHY_CONFIG, CONFIG_PARSE и т.д.)")
    message: str = Field(description="Человекочитаемое сообщение об ошибке")
    details: Optional[dict[str, Any]] = Field(default=None, description="Дополнительные детали ошибки (опционально)")


class ErrorMapper:
    """
    Маппер для преобразования исключений в ErrorModel.
    """

    @staticmethod
    def map_exception(exc: Exception) -> ErrorModel:
        """
        Преобразовать исключение в ErrorModel.
        """
        if isinstance(exc, LumicellError):
            details = exc.details
            if details is not None and not isinstance(details, dict):
                details = {"value": details}
            return ErrorModel(error_type=exc.error_type, message=exc.message, details=details)

        # pydantic ValidationError наследует ValueError, поэтому проверяем раньше
        if isinstance(exc, ValidationError):
            return ErrorModel(
                error_type="VALIDATION_ERROR",
                message=f"{exc.error_count()} validation error(s) for {exc.title}",
                details={"errors": exc.errors(include_url=False, include_context=False)},
            )

        if isinstance(exc, ValueError):
            return ErrorModel(
                error_type="VALIDATION_ERROR",
                message=str(exc) or "Validation error",
                details={"exception_type": type(exc).__name__},
            )

        if isinstance(exc, KeyError):
            return ErrorModel(
                error_type="VALIDATION_ERROR",
                message=f"Missing required field: {exc}",
                details={"exception_type": type(exc).__name__},
            )

        if isinstance(exc, OSError):
            return ErrorModel(
                error_type="IO_ERROR",
                message=str(exc) or "I/O error",
                details={"exception_type": type(exc).__name__, "filename": getattr(exc, "filename", None)},
            )

        return ErrorModel(
            error_type="UNKNOWN",
            message=str(exc) or "Unknown error",
            details={"exception_type": type(exc).__name__},
        )

    @classmethod
    def get_error_type_for_exception(cls, exc: Exception) -> str:
        """
        Получить error_type для исключения без создания полной модели.
        """
        if isinstance(exc, LumicellError):
            return exc.error_type
        if isinstance(exc, (ValueError, KeyError)):
            return "VALIDATION_ERROR"
        if isinstance(exc, OSError):
            return "IO_ERROR"
        return "UNKNOWN"

    @staticmethod
    def exit_code_for_exception(exc: Exception) -> int:
        """
        Код выхода CLI: 1 валидация, 2 приёмка, 3 ввод-вывод.
        """
        if isinstance(exc, LumicellError):
            return exc.exit_code
        if isinstance(exc, (ValueError, KeyError)):
            return EXIT_VALIDATION
        if isinstance(exc, OSError):
            return EXIT_IO
        return EXIT_VALIDATION


__all__ = [
    "EXIT_ACCEPTANCE",
    "EXIT_IO",
    "EXIT_OK",
    "EXIT_VALIDATION",
    "ErrorMapper",
    "ErrorModel",
]
