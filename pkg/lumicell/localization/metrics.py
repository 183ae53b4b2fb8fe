"""
Метрики точности локализации: средняя ошибка и эмпирическая CDF.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..exceptions import LengthMismatchError

PERCENTILES = np.arange(0, 101)


@dataclass(frozen=True)
class ErrorReport:
    errors: np.ndarray
    mean: float
    std: float
    p90: float
    cdf: list[tuple[int, float]]

    @property
    def n_points(self) -> int:
        return int(self.errors.shape[0])


def error_metrics(estimates: Sequence[Sequence[float]], truths: Sequence[Sequence[float]]) -> ErrorReport:
    """
    Евклидовы ошибки, среднее и CDF с шагом 1 перцентиль (90-й отдельно).

    Raises:
        LengthMismatchError: разная длина списков
        ValueError: пустые списки
    """
    if len(estimates) != len(truths):
        raise LengthMismatchError(
            f"estimates and truths differ in length: {len(estimates)} != {len(truths)}",
            details={"estimates": len(estimates), "truths": len(truths)},
        )
    if len(estimates) == 0:
        raise ValueError("at least one estimate is required")
    est = np.asarray(estimates, dtype=float).reshape(-1, 2)
    ref = np.asarray(truths, dtype=float).reshape(-1, 2)
    errors = np.linalg.norm(est - ref, axis=1)
    quantiles = np.percentile(errors, PERCENTILES, method="inverted_cdf")
    cdf = [(int(q), float(value)) for q, value in zip(PERCENTILES, quantiles)]
    return ErrorReport(
        errors=errors,
        mean=float(errors.mean()),
        std=float(errors.std()),
        p90=float(np.percentile(errors, 90, method="inverted_cdf")),
        cdf=cdf,
    )


__all__ = ["ErrorReport", "PERCENTILES", "error_metrics"]
