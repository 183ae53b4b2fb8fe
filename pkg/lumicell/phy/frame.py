"""
Формат кадра маяка: SFD(4) + Sync(8) + Data(40, Manchester) + EOF(4) = 56 символов.

Логически кадр несёт 16-битный идентификатор и 4-битную XOR-контрольную сумму;
в эфире каждый бит превращается в пару символов Manchester.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from ..exceptions import InvalidPayloadError
from ..models import FRAME_SYMBOLS

HIGH = 1
LOW = 0

SFD_SYMBOLS = 4
SYNC_SYMBOLS = 8
PAYLOAD_BITS = 16
CHECKSUM_BITS = 4
DATA_SYMBOLS = 2 * (PAYLOAD_BITS + CHECKSUM_BITS)
EOF_SYMBOLS = 4

# Manchester: 1 -> (high, low), 0 -> (low, high). Единственная точка истины для кодера и декодера.
MANCHESTER = {1: (HIGH, LOW), 0: (LOW, HIGH)}

SFD = (HIGH,) * SFD_SYMBOLS
SYNC = tuple(HIGH if k % 2 == 0 else LOW for k in range(SYNC_SYMBOLS))
EOF = (LOW,) * EOF_SYMBOLS
PREAMBLE = SFD + SYNC

SECTIONS: dict[str, slice] = {
    "SFD": slice(0, SFD_SYMBOLS),
    "Sync": slice(SFD_SYMBOLS, SFD_SYMBOLS + SYNC_SYMBOLS),
    "Data": slice(SFD_SYMBOLS + SYNC_SYMBOLS, SFD_SYMBOLS + SYNC_SYMBOLS + DATA_SYMBOLS),
    "EOF": slice(FRAME_SYMBOLS - EOF_SYMBOLS, FRAME_SYMBOLS),
}


def checksum(payload: int) -> int:
    """XOR четырёх полубайтов 16-битного идентификатора."""
    if not 0 <= payload <= 0xFFFF:
        raise InvalidPayloadError(f"payload out of 16-bit range: {payload}", details={"payload": payload})
    return (payload ^ (payload >> 4) ^ (payload >> 8) ^ (payload >> 12)) & 0xF


@dataclass(frozen=True)
class BeaconFrame:
    """Логическое сообщение маяка."""

    payload: int
    checksum: int

    @classmethod
    def for_payload(cls, payload: int) -> "BeaconFrame":
        return cls(payload=payload, checksum=checksum(payload))

    @property
    def is_valid(self) -> bool:
        return 0 <= self.checksum <= 0xF and checksum(self.payload) == self.checksum

    @property
    def payload_hex(self) -> str:
        return f"0x{self.payload:04X}"


@dataclass(frozen=True)
class SymbolFrame:
    """Последовательность уровней в эфире, по одному на такт модуляции."""

    symbols: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.symbols) != FRAME_SYMBOLS:
            raise InvalidPayloadError(
                f"symbol frame must have {FRAME_SYMBOLS} symbols, got {len(self.symbols)}",
                details={"length": len(self.symbols)},
            )
        if any(level not in (HIGH, LOW) for level in self.symbols):
            raise InvalidPayloadError("symbol levels must be 0 or 1")

    def __len__(self) -> int:
        return len(self.symbols)

    def section(self, name: str) -> tuple[int, ...]:
        return self.symbols[SECTIONS[name]]

    def section_labels(self) -> list[str]:
        """Имя секции для каждого символа (для аннотированного вывода сигнала)."""
        labels: list[str] = []
        for name, part in SECTIONS.items():
            labels.extend([name] * (part.stop - part.start))
        return labels


def _bits_msb_first(value: int, width: int) -> list[int]:
    return [(value >> shift) & 1 for shift in range(width - 1, -1, -1)]


def manchester_encode(bits: Sequence[int]) -> list[int]:
    symbols: list[int] = []
    for bit in bits:
        symbols.extend(MANCHESTER[bit])
    return symbols


def encode_frame(frame: BeaconFrame) -> SymbolFrame:
    """
    Собрать 56-символьный кадр. Контрольная сумма пересчитывается из payload.
    """
    crc = checksum(frame.payload)
    data = manchester_encode(_bits_msb_first(frame.payload, PAYLOAD_BITS) + _bits_msb_first(crc, CHECKSUM_BITS))
    return SymbolFrame(symbols=PREAMBLE + tuple(data) + EOF)


def manchester_decode(symbols: Sequence[int]) -> Optional[list[int]]:
    """Пары (high,low) -> 1, (low,high) -> 0; любая другая пара делает данные невалидными."""
    if len(symbols) % 2:
        return None
    bits: list[int] = []
    for first, second in zip(symbols[0::2], symbols[1::2]):
        if (first, second) == MANCHESTER[1]:
            bits.append(1)
        elif (first, second) == MANCHESTER[0]:
            bits.append(0)
        else:
            return None
    return bits


def bits_to_int(bits: Sequence[int]) -> int:
    value = 0
    for bit in bits:
        value = (value << 1) | bit
    return value


def decode_bits(bits: Sequence[int]) -> Optional[BeaconFrame]:
    """Собрать кадр из 20 битов данных; None при несовпадении контрольной суммы."""
    payload = bits_to_int(bits[:PAYLOAD_BITS])
    crc = bits_to_int(bits[PAYLOAD_BITS:PAYLOAD_BITS + CHECKSUM_BITS])
    if checksum(payload) != crc:
        return None
    return BeaconFrame(payload=payload, checksum=crc)


def decode_symbols(symbols: Sequence[int]) -> Optional[BeaconFrame]:
    """
    Разобрать чистую последовательность символов без DSP.

    Возвращает None, если нарушены разделители, пары Manchester или контрольная сумма.
    """
    symbols = tuple(symbols)
    if len(symbols) != FRAME_SYMBOLS:
        return None
    if symbols[SECTIONS["SFD"]] != SFD or symbols[SECTIONS["Sync"]] != SYNC or symbols[SECTIONS["EOF"]] != EOF:
        return None
    bits = manchester_decode(symbols[SECTIONS["Data"]])
    if bits is None:
        return None
    return decode_bits(bits)


__all__ = [
    "BeaconFrame",
    "CHECKSUM_BITS",
    "DATA_SYMBOLS",
    "EOF",
    "HIGH",
    "LOW",
    "MANCHESTER",
    "PAYLOAD_BITS",
    "PREAMBLE",
    "SECTIONS",
    "SFD",
    "SYNC",
    "SymbolFrame",
    "bits_to_int",
    "checksum",
    "decode_bits",
    "decode_symbols",
    "encode_frame",
    "manchester_decode",
    "manchester_encode",
]
