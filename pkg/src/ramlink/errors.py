"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: configuration problems exit 2,
decode/integrity problems exit 1.
"""

from __future__ import annotations


class RamlinkError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(RamlinkError, ValueError):
    """A parameter or invariant violation (bad timing, bad window, ...)."""


class FrameSizeError(ConfigError):
    """Payload exceeds the 16-bit length field."""


class FrameSyncError(RamlinkError):
    """Bit stream does not start with the expected preamble."""


class TruncationError(RamlinkError):
    """Input ended before the expected structure was complete.

    ``partial`` carries whatever was recovered before the data ran out
    (payload bits for frame parsing, sliced symbols for demodulation).
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class FrameIntegrityError(RamlinkError):
    """Checksum mismatch. The as-received frame is attached so callers can
    still analyse the (possibly corrupted) payload."""

    def __init__(self, message: str, frame, expected_crc: int, received_crc: int):
        super().__init__(message)
        self.frame = frame
        self.expected_crc = expected_crc
        self.received_crc = received_crc


class CodeViolationError(RamlinkError):
    """A Manchester half-bit pair without a mid-bit transition.

    ``bit_index`` is the first offending bit position; ``indices`` lists
    all of them.
    """

    def __init__(self, message: str, bit_index: int, indices=None):
        super().__init__(message)
        self.bit_index = bit_index
        self.indices = indices if indices is not None else [bit_index]


class CalibrationError(RamlinkError):
    """Channel noise cannot be calibrated (e.g. no carrier-on samples)."""


class DomainError(RamlinkError, ValueError):
    """Input outside the supported domain (e.g. distance not in the
    measured range); no extrapolation is performed."""


class NoSignalError(RamlinkError):
    """Sample distribution is degenerate; there is nothing to threshold."""


class SyncNotFoundError(RamlinkError):
    """No candidate position matched the preamble within tolerance."""


class CapabilityError(RamlinkError):
    """The running platform cannot execute the requested operation."""


class EstimationError(RamlinkError):
    """Not enough masked samples for a meaningful SNR estimate."""
