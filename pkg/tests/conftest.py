"""Shared test helpers: independent oracles kept deliberately primitive so
they cannot share a bug with the library implementations."""

import numpy as np
import pytest


def crc16_oracle(bits) -> int:
    """Textbook bit-by-bit CRC-16/CCITT loop (poly 0x1021, init 0xFFFF)."""
    crc = 0xFFFF
    for b in bits:
        crc ^= (int(b) & 1) << 15
        if crc & 0x8000:
            crc = ((crc << 1) ^ 0x1021) & 0xFFFF
        else:
            crc = (crc << 1) & 0xFFFF
    return crc


def bits_of_bytes(data: bytes) -> list[int]:
    out = []
    for byte in data:
        out.extend((byte >> (7 - i)) & 1 for i in range(8))
    return out


def uint_bits(value: int, width: int) -> list[int]:
    return [(value >> (width - 1 - i)) & 1 for i in range(width)]


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)
