"""
Bit manipulation helpers shared by the codec modules.

Packing convention everywhere: little-endian bytes, LSB-first within a
byte. Multi-bit fields inside a bitstream are written MSB-first.
"""

import logging
from typing import Iterable

import numpy as np

from ..exceptions import CorruptArtifactError

logger = logging.getLogger(__name__)


def pack_bits(bits: np.ndarray) -> bytes:
    """Pack a 1-D array of 0/1 values into bytes (LSB-first)."""
    return np.packbits(np.asarray(bits, dtype=bool), bitorder='little').tobytes()


def unpack_bits(data: bytes, length: int) -> np.ndarray:
    """Unpack ``length`` bits from bytes packed LSB-first."""
    raw = np.frombuffer(data, dtype=np.uint8)
    return np.unpackbits(raw, count=length, bitorder='little').astype(bool)


def int_to_bits(values: np.ndarray, width: int) -> np.ndarray:
    """
    Expand integers into MSB-first bit rows.

    Args:
        values: integer array of shape (n,)
        width: number of bits per value

    Returns:
        bool array of shape (n, width)
    """
    values = np.asarray(values, dtype=np.uint64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    return ((values[:, None] >> shifts[None, :]) & np.uint64(1)).astype(bool)


def bits_to_int(bits: np.ndarray) -> np.ndarray:
    """Collapse MSB-first bit rows of shape (n, width) back to integers."""
    bits = np.asarray(bits, dtype=np.uint64)
    width = bits.shape[1]
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    return (bits << shifts[None, :]).sum(axis=1, dtype=np.uint64)


def pack_rows_u64(bits: np.ndarray) -> np.ndarray:
    """
    Pack each row of a 2-D bool array into 64-bit words.

    Rows of width 0 become a single zero word so callers can treat every
    row as at least one word wide.
    """
    bits = np.asarray(bits, dtype=bool)
    rows, width = bits.shape
    words = max(1, -(-width // 64))
    padded = np.zeros((rows, words * 64), dtype=bool)
    padded[:, :width] = bits
    packed = np.packbits(padded, axis=1, bitorder='little')
    return np.ascontiguousarray(packed).view('<u8').reshape(rows, words)


def popcount_rows(words: np.ndarray) -> np.ndarray:
    """Population count of each row of a (n, words) uint64 array."""
    return np.bitwise_count(words).sum(axis=-1, dtype=np.uint32)


class BitWriter:
    """Append-only bitstream builder."""

    def __init__(self):
        self._chunks = []
        self._length = 0

    @property
    def bit_length(self) -> int:
        return self._length

    def write_bit(self, bit: bool) -> None:
        self._chunks.append(np.array([bool(bit)]))
        self._length += 1

    def write_bits(self, bits: Iterable[bool]) -> None:
        array = np.asarray(bits, dtype=bool).ravel()
        self._chunks.append(array)
        self._length += array.size

    def write_uint(self, value: int, width: int) -> None:
        if width == 0:
            return
        if value < 0 or value >> width:
            raise ValueError(f"Value {value} does not fit in {width} bits")
        self.write_bits(int_to_bits(np.array([value]), width)[0])

    def write_uint_array(self, values: np.ndarray, width: int) -> None:
        values = np.asarray(values)
        if width == 0 or values.size == 0:
            return
        self.write_bits(int_to_bits(values, width).ravel())

    def to_bits(self) -> np.ndarray:
        if not self._chunks:
            return np.zeros(0, dtype=bool)
        return np.concatenate(self._chunks)

    def to_bytes(self) -> bytes:
        """Serialize, zero-padding the tail to a byte boundary."""
        return pack_bits(self.to_bits())


class BitReader:
    """Sequential reader over an LSB-first packed bitstream."""

    def __init__(self, data: bytes, bit_offset: int = 0):
        self._bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder='little')
        self._pos = bit_offset

    @property
    def position(self) -> int:
        return self._pos

    @property
    def remaining(self) -> int:
        return self._bits.size - self._pos

    def _take(self, count: int) -> np.ndarray:
        if count > self.remaining:
            raise CorruptArtifactError(
                "Bitstream truncated",
                {'requested_bits': count, 'remaining_bits': self.remaining},
            )
        chunk = self._bits[self._pos:self._pos + count]
        self._pos += count
        return chunk.astype(bool)

    def read_bit(self) -> bool:
        return bool(self._take(1)[0])

    def read_bits(self, count: int) -> np.ndarray:
        return self._take(count)

    def read_uint(self, width: int) -> int:
        if width == 0:
            return 0
        return int(bits_to_int(self._take(width)[None, :])[0])

    def read_uint_array(self, count: int, width: int) -> np.ndarray:
        if count == 0 or width == 0:
            return np.zeros(count, dtype=np.uint64)
        bits = self._take(count * width).reshape(count, width)
        return bits_to_int(bits)

    def align(self) -> None:
        """Skip the zero padding up to the next byte boundary."""
        pad = (-self._pos) % 8
        if pad:
            self._take(pad)
