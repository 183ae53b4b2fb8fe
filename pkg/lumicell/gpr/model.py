"""
Регрессия гауссовского процесса с RBF-ядром, по одной модели на маяк.

Факторизация K + σn²I выполняется разложением Холецкого; при неудаче к диагонали
добавляется jitter 1e-10, ×10 до 1e-6.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.spatial.distance import cdist

from ..exceptions import IllConditionedKernelError
from ..models import GPHyperparams

logger = logging.getLogger(__name__)

JITTER_START = 1e-10
JITTER_MAX = 1e-6


def kernel(xp: Sequence[float], xq: Sequence[float], hp: GPHyperparams) -> float:
    """σf²·exp(-‖xp - xq‖² / (2l²))."""
    diff = np.subtract(xp, xq, dtype=float)
    return float(hp.sigma_f2 * math.exp(-float(np.dot(diff, diff)) / (2.0 * hp.length_scale**2)))


def kernel_matrix(a: np.ndarray, b: np.ndarray, hp: GPHyperparams) -> np.ndarray:
    sq = cdist(np.atleast_2d(a), np.atleast_2d(b), metric="sqeuclidean")
    return hp.sigma_f2 * np.exp(-sq / (2.0 * hp.length_scale**2))


@dataclass(frozen=True)
class FingerprintSet:
    """
    Обучающая выборка: позиции X (n×2) и вектор RSS длины n для каждого маяка.
    """

    positions: np.ndarray
    observations: Mapping[int, np.ndarray]

    def __post_init__(self) -> None:
        positions = np.asarray(self.positions, dtype=float)
        if positions.ndim != 2 or positions.shape[1] != 2 or positions.shape[0] < 1:
            raise ValueError("positions must be an n x 2 array with n >= 1")
        if not np.all(np.isfinite(positions)):
            raise ValueError("positions must be finite")
        observations: dict[int, np.ndarray] = {}
        for beacon_id in sorted(self.observations):
            y = np.asarray(self.observations[beacon_id], dtype=float)
            if y.shape != (positions.shape[0],):
                raise ValueError(f"observations of beacon {beacon_id} must have length {positions.shape[0]}")
            observations[int(beacon_id)] = y
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "observations", observations)

    @property
    def beacon_ids(self) -> list[int]:
        return list(self.observations)

    @property
    def n(self) -> int:
        return int(self.positions.shape[0])

    def pooled_variance(self) -> float:
        """Выборочная дисперсия всех наблюдений; 1.0 для вырожденных данных."""
        if not self.observations:
            return 1.0
        values = np.concatenate(list(self.observations.values()))
        variance = float(values.var())
        return variance if variance > 0 else 1.0


@dataclass(frozen=True)
class BeaconGP:
    """Обученная модель одного маяка: фактор Холецкого и веса α = (K + σn²I)⁻¹y."""

    beacon_id: int
    hp: GPHyperparams
    positions: np.ndarray
    y: np.ndarray
    factor: tuple[np.ndarray, bool] = field(repr=False)
    alpha: np.ndarray = field(repr=False)
    jitter: float = 0.0

    def log_marginal_likelihood(self) -> float:
        chol, _ = self.factor
        n = self.y.shape[0]
        return float(
            -0.5 * self.y @ self.alpha - np.sum(np.log(np.diag(chol))) - 0.5 * n * math.log(2.0 * math.pi)
        )


@dataclass(frozen=True)
class GPModel:
    """Набор независимых моделей по маякам с общими гиперпараметрами."""

    hp: GPHyperparams
    beacons: Mapping[int, BeaconGP]

    def __getitem__(self, beacon_id: int) -> BeaconGP:
        return self.beacons[beacon_id]

    @property
    def beacon_ids(self) -> list[int]:
        return sorted(self.beacons)

    def log_marginal_likelihood(self) -> float:
        return float(sum(model.log_marginal_likelihood() for model in self.beacons.values()))


@dataclass(frozen=True)
class Prediction:
    mean: np.ndarray
    latent_variance: np.ndarray
    observation_variance: np.ndarray


def _factorize(cov: np.ndarray, beacon_id: int) -> tuple[tuple[np.ndarray, bool], float]:
    try:
        return cho_factor(cov, lower=True), 0.0
    except LinAlgError:
        pass
    jitter = JITTER_START
    eye = np.eye(cov.shape[0])
    while jitter <= JITTER_MAX * (1 + 1e-9):
        try:
            factor = cho_factor(cov + jitter * eye, lower=True)
            logger.debug("beacon %d: factorized with jitter %.1e", beacon_id, jitter)
            return factor, jitter
        except LinAlgError:
            jitter *= 10.0
    raise IllConditionedKernelError(
        f"ill-conditioned kernel matrix for beacon {beacon_id}",
        details={"beacon_id": beacon_id, "max_jitter": JITTER_MAX},
    )


def fit_beacon(positions: np.ndarray, y: np.ndarray, hp: GPHyperparams, beacon_id: int) -> BeaconGP:
    cov = kernel_matrix(positions, positions, hp) + hp.sigma_n2 * np.eye(positions.shape[0])
    factor, jitter = _factorize(cov, beacon_id)
    alpha = cho_solve(factor, y)
    return BeaconGP(beacon_id=beacon_id, hp=hp, positions=positions, y=y, factor=factor, alpha=alpha, jitter=jitter)


def fit(fp: FingerprintSet, hp: GPHyperparams) -> GPModel:
    """
    Обучить модель каждого маяка.

    Raises:
        IllConditionedKernelError: матрица не положительно определена после эскалации jitter
    """
    beacons = {beacon_id: fit_beacon(fp.positions, y, hp, beacon_id) for beacon_id, y in fp.observations.items()}
    return GPModel(hp=hp, beacons=beacons)


def predict_many(model: BeaconGP, points: np.ndarray) -> Prediction:
    """Предсказание во многих точках сразу (векторизованный predict)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    k_star = kernel_matrix(points, model.positions, model.hp)
    mean = k_star @ model.alpha
    v = cho_solve(model.factor, k_star.T)
    latent = np.clip(model.hp.sigma_f2 - np.einsum("ij,ji->i", k_star, v), 0.0, None)
    return Prediction(mean=mean, latent_variance=latent, observation_variance=latent + model.hp.sigma_n2)


def predict(model: BeaconGP, point: Sequence[float]) -> tuple[float, float, float]:
    """
    Апостериорное среднее, латентная дисперсия и дисперсия наблюдения в точке x*.
    """
    result = predict_many(model, np.asarray(point, dtype=float).reshape(1, 2))
    return (float(result.mean[0]), float(result.latent_variance[0]), float(result.observation_variance[0]))


def log_marginal_likelihood(fp: FingerprintSet, hp: GPHyperparams) -> float:
    """Сумма log p(y | X, θ) по маякам."""
    return fit(fp, hp).log_marginal_likelihood()


def default_hyperparams(fp: FingerprintSet) -> GPHyperparams:
    """l = 1 м, σf² = выборочная дисперсия наблюдений всех маяков (гиперпараметры общие), σn² = 0.01·σf²."""
    variance = fp.pooled_variance()
    return GPHyperparams(sigma_f2=variance, length_scale=1.0, sigma_n2=0.01 * variance)


def default_candidate_grid(fp: FingerprintSet) -> list[GPHyperparams]:
    variance = fp.pooled_variance()
    return [
        GPHyperparams(sigma_f2=f * variance, length_scale=length, sigma_n2=noise * variance)
        for length in (0.5, 0.75, 1.0, 1.5, 2.0)
        for f in (0.5, 1.0, 2.0)
        for noise in (1e-4, 1e-3, 1e-2)
    ]


def select_hyperparams(fp: FingerprintSet, candidates: Iterable[GPHyperparams]) -> GPHyperparams:
    """
    Кандидат с максимальным суммарным логарифмом маргинального правдоподобия.

    Плохо обусловленные кандидаты пропускаются; при равенстве побеждает первый.

    Raises:
        ValueError: пустая сетка кандидатов
        IllConditionedKernelError: все кандидаты плохо обусловлены
    """
    candidates = list(candidates)
    if not candidates:
        raise ValueError("candidate grid must be non-empty")
    best: Optional[GPHyperparams] = None
    best_lml = -math.inf
    failures: list[int] = []
    for hp in candidates:
        try:
            lml = log_marginal_likelihood(fp, hp)
        except IllConditionedKernelError as exc:
            failures.append(exc.details.get("beacon_id", -1) if isinstance(exc.details, dict) else -1)
            continue
        if best is None or lml > best_lml:
            best, best_lml = hp, lml
    if best is None:
        raise IllConditionedKernelError(
            "all hyperparameter candidates are ill-conditioned",
            details={"candidates": len(candidates), "beacon_ids": sorted(set(failures))},
        )
    logger.info(
        "selected GP hyperparameters l=%.3f sigma_f2=%.4g sigma_n2=%.4g (lml=%.3f)",
        best.length_scale,
        best.sigma_f2,
        best.sigma_n2,
        best_lml,
    )
    return best


__all__ = [
    "BeaconGP",
    "FingerprintSet",
    "GPModel",
    "Prediction",
    "default_candidate_grid",
    "default_hyperparams",
    "fit",
    "fit_beacon",
    "kernel",
    "kernel_matrix",
    "log_marginal_likelihood",
    "predict",
    "predict_many",
    "select_hyperparams",
]
