"""Payload framing and bit-level line coding.

Frame format (all fields MSB-first):

    +----------+--------+---------+--------+
    | PREAMBLE | LENGTH | PAYLOAD | CRC-16 |
    | 8 bits   | 16 bit | N bits  | 16 bit |
    +----------+--------+---------+--------+

- PREAMBLE: fixed 10101010, used by the receiver for synchronization
- LENGTH:   payload bit count (0..65535)
- CRC-16:   CCITT polynomial 0x1021, init 0xFFFF, over LENGTH + PAYLOAD

Two line codes map frame bits onto carrier on/off symbols: direct OOK
(1 = carrier on for a full bit time) and Manchester (each bit becomes two
half-bits with a forced mid-bit transition; 1 = rising 0,1 and 0 = falling
1,0). Manchester doubles the symbol count, which is asserted as an exact
2x length property rather than as a spectral statement.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    CodeViolationError,
    ConfigError,
    FrameIntegrityError,
    FrameSizeError,
    FrameSyncError,
    TruncationError,
)

__all__ = [
    "BitStream",
    "Frame",
    "LineCode",
    "PREAMBLE",
    "build_frame",
    "parse_frame",
    "manchester_encode",
    "manchester_decode",
    "manchester_decode_lenient",
    "ook_map",
    "crc16",
    "FRAME_OVERHEAD_BITS",
]

MAX_PAYLOAD_BITS = 0xFFFF
#: preamble + length field + crc
FRAME_OVERHEAD_BITS = 8 + 16 + 16


class LineCode(str, Enum):
    """Symbol mapping scheme for transmission."""

    OOK_DIRECT = "ook"
    MANCHESTER = "manchester"


class BitStream:
    """Immutable ordered sequence of binary symbols.

    Backed by a read-only uint8 numpy array; every element is 0 or 1.
    Supports the fixture text format (ASCII '0'/'1', whitespace ignored)
    and hex strings for byte payloads (MSB-first within each byte).
    """

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int] | np.ndarray = ()):
        arr = np.asarray(bits)
        if arr.ndim != 1:
            arr = arr.reshape(-1) if arr.size == 0 else arr
            if arr.ndim != 1:
                raise ConfigError("bits must be one-dimensional")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ConfigError("bit stream elements must be exactly 0 or 1")
        arr = arr.astype(np.uint8, copy=True)
        arr.setflags(write=False)
        self._bits = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "BitStream":
        # internal fast path: arr is already a validated uint8 0/1 array
        obj = cls.__new__(cls)
        arr.setflags(write=False)
        obj._bits = arr
        return obj

    @classmethod
    def from_text(cls, text: str) -> "BitStream":
        """Parse ASCII '0'/'1' characters; whitespace is ignored."""
        cleaned = "".join(text.split())
        if not set(cleaned) <= {"0", "1"}:
            bad = sorted(set(cleaned) - {"0", "1"})
            raise ConfigError(f"invalid bitstream characters: {bad}")
        return cls._wrap(np.frombuffer(cleaned.encode("ascii"), dtype=np.uint8) - ord("0"))

    @classmethod
    def from_hex(cls, text: str) -> "BitStream":
        """Parse a hex string into bits, MSB-first within each byte."""
        cleaned = "".join(text.split()).removeprefix("0x")
        try:
            data = bytes.fromhex(cleaned)
        except ValueError as exc:
            raise ConfigError(f"invalid hex payload: {exc}") from exc
        return cls.from_bytes(data)

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitStream":
        if not data:
            return cls()
        return cls._wrap(np.unpackbits(np.frombuffer(data, dtype=np.uint8)))

    @classmethod
    def from_uint(cls, value: int, width: int) -> "BitStream":
        """Fixed-width unsigned integer, MSB-first."""
        if not 0 <= value < (1 << width):
            raise ConfigError(f"value {value} does not fit in {width} bits")
        shifts = np.arange(width - 1, -1, -1)
        return cls._wrap(((value >> shifts) & 1).astype(np.uint8))

    @property
    def bits(self) -> np.ndarray:
        """Read-only uint8 array of the symbols."""
        return self._bits

    @property
    def length(self) -> int:
        return self._bits.size

    def to_text(self) -> str:
        return "".join("1" if b else "0" for b in self._bits)

    def to_bytes(self) -> bytes:
        if self._bits.size % 8:
            raise ConfigError("bit count is not a whole number of bytes")
        return np.packbits(self._bits).tobytes()

    def to_hex(self) -> str:
        return self.to_bytes().hex()

    def to_uint(self) -> int:
        value = 0
        for b in self._bits:
            value = (value << 1) | int(b)
        return value

    def __len__(self) -> int:
        return self._bits.size

    def __iter__(self) -> Iterator[int]:
        return iter(int(b) for b in self._bits)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return BitStream._wrap(self._bits[idx].copy())
        return int(self._bits[idx])

    def __add__(self, other: "BitStream") -> "BitStream":
        if not isinstance(other, BitStream):
            return NotImplemented
        return BitStream._wrap(np.concatenate([self._bits, other._bits]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitStream):
            return NotImplemented
        return np.array_equal(self._bits, other._bits)

    def __hash__(self) -> int:
        return hash(self._bits.tobytes())

    def __repr__(self) -> str:
        text = self.to_text()
        if len(text) > 48:
            text = text[:45] + "..."
        return f'BitStream("{text}", length={self.length})'


PREAMBLE = BitStream((1, 0, 1, 0, 1, 0, 1, 0))

# table-driven CRC-16/CCITT (poly 0x1021, init 0xFFFF); whole bytes go
# through the table, trailing bits through single-bit steps
_CRC_POLY = 0x1021


def _build_crc_table() -> np.ndarray:
    table = np.zeros(256, dtype=np.uint32)
    for byte in range(256):
        crc = byte << 8
        for _ in range(8):
            crc = ((crc << 1) ^ _CRC_POLY) if crc & 0x8000 else (crc << 1)
            crc &= 0xFFFF
        table[byte] = crc
    return table


_CRC_TABLE = _build_crc_table()


def crc16(bits: BitStream | np.ndarray) -> int:
    """CRC-16/CCITT over a bit sequence of any length, MSB-first."""
    arr = bits.bits if isinstance(bits, BitStream) else np.asarray(bits, dtype=np.uint8)
    crc = 0xFFFF
    n_bytes = arr.size // 8
    if n_bytes:
        for byte in np.packbits(arr[: n_bytes * 8]):
            crc = ((crc << 8) ^ int(_CRC_TABLE[((crc >> 8) ^ int(byte)) & 0xFF])) & 0xFFFF
    for bit in arr[n_bytes * 8 :]:
        crc ^= int(bit) << 15
        crc = ((crc << 1) ^ _CRC_POLY) & 0xFFFF if crc & 0x8000 else (crc << 1) & 0xFFFF
    return crc


@dataclass(frozen=True)
class Frame:
    """The on-air unit: preamble, length field, payload, checksum.

    ``crc`` is the declared checksum. ``build_frame`` always stores a valid
    one; a frame recovered from a corrupted stream may carry the received
    (mismatching) value so the payload stays available for error analysis.
    """

    length_field: int
    payload: BitStream
    crc: int
    preamble: BitStream = PREAMBLE

    def __post_init__(self):
        if self.preamble != PREAMBLE:
            raise ConfigError("frame preamble must be 10101010")
        if self.length_field != self.payload.length:
            raise ConfigError(
                f"length field {self.length_field} != payload length {self.payload.length}"
            )

    @property
    def bit_length(self) -> int:
        return FRAME_OVERHEAD_BITS + self.payload.length

    @property
    def crc_valid(self) -> bool:
        return self.crc == crc16(_crc_region(self.length_field, self.payload))

    def serialize(self) -> BitStream:
        """preamble || length (MSB-first) || payload || crc (MSB-first)."""
        return (
            self.preamble
            + BitStream.from_uint(self.length_field, 16)
            + self.payload
            + BitStream.from_uint(self.crc, 16)
        )


def _crc_region(length_field: int, payload: BitStream) -> BitStream:
    return BitStream.from_uint(length_field, 16) + payload


def build_frame(payload: BitStream) -> Frame:
    """Wrap a payload in a frame with preamble, length field and CRC."""
    if payload.length > MAX_PAYLOAD_BITS:
        raise FrameSizeError(
            f"payload of {payload.length} bits exceeds the {MAX_PAYLOAD_BITS}-bit limit"
        )
    crc = crc16(_crc_region(payload.length, payload))
    return Frame(length_field=payload.length, payload=payload, crc=crc)


def parse_frame(bits: BitStream) -> Frame:
    """Recover a frame from a bit stream that starts at the preamble.

    Trailing bits beyond the frame are ignored (multi-frame scanning slices
    exact symbol counts before calling this). Raises FrameSyncError for a
    bad preamble, TruncationError if the stream ends early, and
    FrameIntegrityError (with the as-received frame attached) on CRC
    mismatch.
    """
    arr = bits.bits
    if arr.size < 8 or not np.array_equal(arr[:8], PREAMBLE.bits):
        got = bits[: min(8, len(bits))].to_text()
        raise FrameSyncError(f"expected preamble 10101010, got '{got}'")
    if arr.size < 24:
        raise TruncationError(
            f"stream ends inside the length field ({arr.size} of 24 bits)"
        )
    length = BitStream._wrap(arr[8:24].copy()).to_uint()
    end = 24 + length + 16
    if arr.size < end:
        raise TruncationError(
            f"frame needs {end} bits but only {arr.size} are available",
            partial=BitStream._wrap(arr[24 : min(arr.size, 24 + length)].copy()),
        )
    payload = BitStream._wrap(arr[24 : 24 + length].copy())
    received_crc = BitStream._wrap(arr[24 + length : end].copy()).to_uint()
    expected_crc = crc16(_crc_region(length, payload))
    frame = Frame(length_field=length, payload=payload, crc=received_crc)
    if received_crc != expected_crc:
        raise FrameIntegrityError(
            f"crc mismatch: computed 0x{expected_crc:04X}, received 0x{received_crc:04X}",
            frame=frame,
            expected_crc=expected_crc,
            received_crc=received_crc,
        )
    return frame


def manchester_encode(bits: BitStream) -> BitStream:
    """Expand each bit into two half-bits: 1 -> (0,1), 0 -> (1,0).

    Output is exactly twice the input length and every pair contains a
    level transition.
    """
    b = bits.bits
    out = np.empty(2 * b.size, dtype=np.uint8)
    out[0::2] = 1 - b
    out[1::2] = b
    return BitStream._wrap(out)


def manchester_decode(halfbits: BitStream) -> BitStream:
    """Invert :func:`manchester_encode`.

    Raises ConfigError for odd input length and CodeViolationError when a
    pair has no transition (the violating bit index makes the error
    position recoverable).
    """
    h = halfbits.bits
    if h.size % 2:
        raise ConfigError(f"half-bit stream length {h.size} is odd")
    first = h[0::2]
    second = h[1::2]
    violations = np.flatnonzero(first == second)
    if violations.size:
        raise CodeViolationError(
            f"no mid-bit transition at bit {int(violations[0])}",
            bit_index=int(violations[0]),
            indices=violations.tolist(),
        )
    return BitStream._wrap(second.copy())


def manchester_decode_lenient(halfbits: BitStream) -> tuple[BitStream, np.ndarray]:
    """Decode despite code violations, for error analysis on noisy streams.

    With the (0,1)/(1,0) convention the data bit equals the second half-bit,
    so violating pairs still resolve to a deterministic bit; their positions
    are returned alongside. Used by the receiver so corrupted frames keep a
    comparable payload.
    """
    h = halfbits.bits
    if h.size % 2:
        raise ConfigError(f"half-bit stream length {h.size} is odd")
    first = h[0::2]
    second = h[1::2]
    return BitStream._wrap(second.copy()), np.flatnonzero(first == second)


def ook_map(bits: BitStream) -> BitStream:
    """Identity symbol mapping: 1 = carrier on, 0 = carrier off.

    Exists so both line codes feed the same synthesis path.
    """
    return bits
