"""
lumicell: симулятор позиционирования по маякам видимого света.

Физический уровень OOK/Manchester, доступ к среде BFSA, оптический канал, карты GPR
и байесовский фильтр на сетке; запуск экспериментов через CLI `lumicell`.
"""

__version__ = "0.1.0"

from .config import LumicellConfig
from .exceptions import LumicellError
from .models import GPHyperparams, GridSpec, Luminaire, MotionParams, PhyConfig, ReceiverModel, RunConfig

__all__ = [
    "GPHyperparams",
    "GridSpec",
    "Luminaire",
    "LumicellConfig",
    "LumicellError",
    "MotionParams",
    "PhyConfig",
    "ReceiverModel",
    "RunConfig",
    "__version__",
]
