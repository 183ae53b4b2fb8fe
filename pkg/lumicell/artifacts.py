"""
Запись и чтение артефактов прогонов: CSV через pandas и JSON-сводки.

Числа пишутся фиксированным форматом, поэтому одинаковый seed даёт побайтно одинаковые файлы.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from .gpr.maps import IntensityMapSet
from .gpr.model import FingerprintSet
from .phy.demodulator import DecodedFrame
from .phy.waveform import Waveform

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.6f"
SAMPLE_RATE_PREFIX = "# sample_rate="

TRAJECTORY_COLUMNS = ["t", "x_est", "y_est", "x_true", "y_true", "error"]
TRACE_COLUMNS = ["point_x", "point_y", "frame", "beacon_id", "rss", "clean"]
SUCCESS_RATE_COLUMNS = ["N", "n", "mode", "frames", "success_rate", "ci_low", "ci_high"]


def ensure_dir(path: Path) -> Path:
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_frame(df: pd.DataFrame, path: Path) -> Path:
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug("wrote %s (%d rows)", path, len(df))
    return path


def write_rows(rows: Iterable[Sequence[Any]], columns: Sequence[str], path: Path) -> Path:
    return write_frame(pd.DataFrame(list(rows), columns=list(columns)), path)


def write_json(payload: Mapping[str, Any], path: Path) -> Path:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_json(path: Path) -> dict[str, Any]:
    return json.loads(path.read_text(encoding="utf-8"))


# ---- Сигналы и кадры ----


def write_waveform_csv(w: Waveform, path: Path, sections: Optional[Sequence[str]] = None) -> Path:
    """
    Сигнал с заголовком `# sample_rate=<Гц>` и колонками sample, amplitude[, section].
    """
    data: dict[str, Any] = {"sample": np.arange(len(w)) + w.start_sample, "amplitude": w.samples}
    if sections is not None:
        if len(sections) != len(w):
            raise ValueError("sections must label every sample")
        data["section"] = list(sections)
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(f"{SAMPLE_RATE_PREFIX}{w.sample_rate:g}\n")
        pd.DataFrame(data).to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def read_waveform_csv(path: Path) -> Waveform:
    """
    Прочитать сигнал; поддерживается и одна колонка амплитуд без заголовка колонок.

    Raises:
        ValueError: нет строки `# sample_rate=`
    """
    with path.open("r", encoding="utf-8") as handle:
        first = handle.readline().strip()
        second = handle.readline().strip()
    if not first.startswith(SAMPLE_RATE_PREFIX):
        raise ValueError(f"{path}: missing '{SAMPLE_RATE_PREFIX}' header")
    sample_rate = float(first[len(SAMPLE_RATE_PREFIX):])
    if second.startswith("sample"):
        df = pd.read_csv(path, skiprows=1)
        start = int(df["sample"].iloc[0]) if len(df) else 0
        return Waveform(samples=df["amplitude"].to_numpy(dtype=float), sample_rate=sample_rate, start_sample=start)
    df = pd.read_csv(path, skiprows=1, header=None)
    return Waveform(samples=df.iloc[:, 0].to_numpy(dtype=float), sample_rate=sample_rate)


def write_decoded_csv(decoded: Sequence[DecodedFrame], path: Path) -> Path:
    rows = [(d.start_sample, d.frame.payload_hex, d.rss, d.clean) for d in decoded]
    return write_rows(rows, ["start_sample", "payload_hex", "rss", "clean"], path)


# ---- Отпечатки и карты ----


def write_fingerprints(fp: FingerprintSet, path: Path) -> Path:
    """Длинный формат: строка на пару (точка, маяк), колонки x, y, beacon_id, rss."""
    rows = [
        (float(x), float(y), beacon_id, float(fp.observations[beacon_id][i]))
        for i, (x, y) in enumerate(fp.positions)
        for beacon_id in fp.beacon_ids
    ]
    return write_rows(rows, ["x", "y", "beacon_id", "rss"], path)


def read_fingerprints(path: Path) -> FingerprintSet:
    """
    Собрать FingerprintSet из длинного формата; порядок точек: порядок первого появления.

    Raises:
        ValueError: у какой-то точки нет значения одного из маяков
    """
    df = pd.read_csv(path)
    wide = df.pivot_table(index=["x", "y"], columns="beacon_id", values="rss", aggfunc="first", sort=False)
    if wide.isna().to_numpy().any():
        raise ValueError(f"{path}: every point must carry a value for every beacon")
    positions = np.array(list(wide.index), dtype=float)
    observations = {int(beacon_id): wide[beacon_id].to_numpy(dtype=float) for beacon_id in wide.columns}
    return FingerprintSet(positions=positions, observations=observations)


def write_maps(maps: IntensityMapSet, directory: Path) -> list[Path]:
    """Карта каждого маяка в maps/beacon_<id>.csv: x, y, mean, variance, latent_variance."""
    ensure_dir(directory)
    nodes = maps.grid.nodes()
    written = []
    for beacon_id in maps.beacon_ids:
        df = pd.DataFrame(
            {
                "x": nodes[:, 0],
                "y": nodes[:, 1],
                "mean": maps.mean[beacon_id].ravel(),
                "variance": maps.variance[beacon_id].ravel(),
                "latent_variance": maps.latent_variance[beacon_id].ravel(),
            }
        )
        written.append(write_frame(df, directory / f"beacon_{beacon_id}.csv"))
    return written


# ---- Метрики ----


def write_cdf(cdf: Sequence[tuple[int, float]], path: Path) -> Path:
    return write_rows(cdf, ["percentile", "error_m"], path)


__all__ = [
    "FLOAT_FORMAT",
    "SUCCESS_RATE_COLUMNS",
    "TRACE_COLUMNS",
    "TRAJECTORY_COLUMNS",
    "ensure_dir",
    "read_fingerprints",
    "read_json",
    "read_waveform_csv",
    "write_cdf",
    "write_decoded_csv",
    "write_fingerprints",
    "write_frame",
    "write_json",
    "write_maps",
    "write_rows",
    "write_waveform_csv",
]
