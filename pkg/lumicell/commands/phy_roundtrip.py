"""
Подкоманда phy-roundtrip: кодирование и декодирование случайных идентификаторов через
полную цепочку (модуляция, несущая-заглушка, шум, receiver_chain, demodulate) и перебор
одиночных искажений символов.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..artifacts import write_decoded_csv, write_json, write_waveform_csv
from ..channel.optical import superpose
from ..exceptions import AcceptanceError
from ..models import PhyConfig, RunConfig
from ..phy.demodulator import DecodedFrame, demodulate_with_stats
from ..phy.frame import BeaconFrame, SymbolFrame, decode_symbols, encode_frame
from ..phy.receiver import receiver_chain
from ..phy.waveform import Waveform, dummy_carrier, modulate, modulate_symbols
from .base import CommandContext, CommandReport, execute

logger = logging.getLogger(__name__)

COMMAND = "phy-roundtrip"
DEFAULT_COUNT = 1000
DEFAULT_NOISE_SIGMA = 0.01


@dataclass(frozen=True)
class TrialResult:
    payload: int
    decoded: list[DecodedFrame]
    dropped: int

    @property
    def passed(self) -> bool:
        return len(self.decoded) == 1 and self.decoded[0].frame.payload == self.payload


def transmit_symbols(
    symbols: tuple[int, ...],
    cfg: PhyConfig,
    *,
    pad_samples: int,
    noise_sigma: float,
    seed: int,
    idle_lights: int = 0,
) -> Waveform:
    """
    Один пакет в окружении несущей-заглушки на аналоговой частоте.

    До пакета pad_samples отсчётов несущей, после: один слот; idle_lights светильников
    той же амплитуды всё время излучают несущую.
    """
    rate = cfg.analog_rate
    packet = modulate_symbols(symbols, cfg, 1.0, sample_rate=rate)
    total = pad_samples + 2 * len(packet)
    base = dummy_carrier(total, cfg, 1.0 + idle_lights, sample_rate=rate)
    carrier = dummy_carrier(len(packet), cfg, 1.0, sample_rate=rate, start_sample=pad_samples)
    delta = Waveform(samples=packet.samples - carrier.samples, sample_rate=rate, start_sample=pad_samples)
    return superpose([(base, 1.0), (delta, 1.0)], noise_sigma=noise_sigma, seed=seed)


def run_trial(payload: int, cfg: PhyConfig, *, pad_samples: int, noise_sigma: float, seed: int) -> TrialResult:
    symbols = encode_frame(BeaconFrame.for_payload(payload)).symbols
    received = transmit_symbols(symbols, cfg, pad_samples=pad_samples, noise_sigma=noise_sigma, seed=seed)
    decoded, stats = demodulate_with_stats(receiver_chain(received, cfg), cfg)
    return TrialResult(payload=payload, decoded=decoded, dropped=stats.dropped)


def corruption_sweep(payload: int, cfg: PhyConfig, *, seed: int) -> int:
    """
    Инвертировать по очереди каждый из 56 символов кадра; вернуть число ложных приёмов.

    Ложный приём: искажённый кадр принят разбором символов или цепочка выдала чужой идентификатор.
    """
    original = encode_frame(BeaconFrame.for_payload(payload)).symbols
    pad = int(round(cfg.packet_duration * cfg.analog_rate))
    false_accepts = 0
    for position in range(len(original)):
        corrupted = list(original)
        corrupted[position] = 1 - corrupted[position]
        if decode_symbols(corrupted) is not None:
            false_accepts += 1
            continue
        received = transmit_symbols(tuple(corrupted), cfg, pad_samples=pad, noise_sigma=0.0, seed=seed)
        decoded, _ = demodulate_with_stats(receiver_chain(received, cfg), cfg)
        false_accepts += sum(1 for item in decoded if item.frame.payload != payload)
    return false_accepts


def _section_labels(symbols: SymbolFrame, cfg: PhyConfig, w: Waveform) -> list[str]:
    labels = symbols.section_labels()
    sps = w.sample_rate / cfg.f_mod
    index = np.minimum((np.arange(len(w)) / sps).astype(int), len(labels) - 1)
    return [labels[i] for i in index]


def _body(ctx: CommandContext) -> dict[str, Any]:
    config = ctx.config
    cfg = PhyConfig(
        **{
            key: value
            for key, value in {"oversample": config.oversample, "lpf_cutoff": config.lpf_cutoff}.items()
            if value is not None
        }
    )
    count = config.count or DEFAULT_COUNT
    corrupt = config.corrupt if config.corrupt is not None else 0
    noise_sigma = config.noise_sigma if config.noise_sigma is not None else DEFAULT_NOISE_SIGMA
    rng = np.random.default_rng(config.seed)
    packet_samples = int(round(cfg.packet_duration * cfg.analog_rate))
    ctx.span.set_attribute("count", count)
    ctx.span.set_attribute("noise_sigma", noise_sigma)

    payloads = rng.integers(0, 0x10000, size=count)
    pads = packet_samples + rng.integers(0, 2 * packet_samples, size=count)
    decoded_all: list[DecodedFrame] = []
    passed = dropped = 0
    for i, (payload, pad) in enumerate(zip(payloads, pads)):
        trial = run_trial(int(payload), cfg, pad_samples=int(pad), noise_sigma=noise_sigma, seed=config.seed + i)
        passed += trial.passed
        dropped += trial.dropped
        decoded_all.extend(trial.decoded)
    failed = count - passed
    ctx.frames("decoded", len(decoded_all))
    ctx.frames("dropped", dropped)

    false_accepts = 0
    sweep_payloads = rng.integers(0, 0x10000, size=corrupt)
    for j, payload in enumerate(sweep_payloads):
        false_accepts += corruption_sweep(int(payload), cfg, seed=config.seed + count + j)

    sample_frame = encode_frame(BeaconFrame.for_payload(int(payloads[0])))
    sample = modulate(sample_frame, cfg, 1.0)
    labels = _section_labels(sample_frame, cfg, sample)
    ctx.record(write_waveform_csv(sample, ctx.path("sample_waveform.csv"), labels))
    ctx.record(write_decoded_csv(decoded_all, ctx.path("decoded.csv")))
    summary = {
        "count": count,
        "passed": passed,
        "failed": failed,
        "corrupt": int(corrupt),
        "false_accepts": false_accepts,
        "dropped": dropped,
        "packet_duration_s": cfg.packet_duration,
    }
    ctx.record(write_json(summary, ctx.path("summary.json")))
    logger.info("phy-roundtrip: %d/%d passed, %d false accept(s)", passed, count, false_accepts)

    if failed or false_accepts:
        raise AcceptanceError(
            f"round-trip mismatch: {failed} failed, {false_accepts} false accept(s)",
            details={"failed": failed, "false_accepts": false_accepts},
        )
    return summary


def run(config: RunConfig) -> CommandReport:
    """
    Выполнить phy-roundtrip.

    Returns:
        CommandReport: сводка и список артефактов; несовпадение декодирования даёт код выхода 2
    """
    return execute(COMMAND, config, _body)


__all__ = ["COMMAND", "TrialResult", "corruption_sweep", "run", "run_trial", "transmit_symbols"]
