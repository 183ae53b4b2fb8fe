"""
Физический уровень: кадр маяка, OOK/Manchester-сигналы, цепочка приёмника и демодулятор.
"""

from .demodulator import DecodedFrame, DemodStats, demodulate, demodulate_with_stats
from .frame import (
    BeaconFrame,
    SECTIONS,
    SymbolFrame,
    checksum,
    decode_symbols,
    encode_frame,
)
from .receiver import receiver_chain
from .waveform import (
    Waveform,
    check_phy_config,
    dummy_carrier,
    flicker_index,
    modulate,
    modulate_symbols,
    symbol_boundaries,
)

__all__ = [
    "BeaconFrame",
    "DecodedFrame",
    "DemodStats",
    "SECTIONS",
    "SymbolFrame",
    "Waveform",
    "check_phy_config",
    "checksum",
    "decode_symbols",
    "demodulate",
    "demodulate_with_stats",
    "dummy_carrier",
    "encode_frame",
    "flicker_index",
    "modulate",
    "modulate_symbols",
    "receiver_chain",
    "symbol_boundaries",
]
