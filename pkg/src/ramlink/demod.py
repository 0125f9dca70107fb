"""Receiver chain: smoothing, thresholding, preamble synchronization,
symbol slicing, line-code decoding and frame recovery.

The chain is a conventional envelope receiver: centered moving average,
robust midpoint threshold (5th/95th percentiles rather than min/max so a
stray spike cannot drag the cut), correlation search for the line-coded
preamble, then majority voting over the central half of each symbol
window. Every stage is a parameter of DemodConfig so alternate rules can
be swapped in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal as _sig

from .errors import (
    ConfigError,
    FrameIntegrityError,
    FrameSyncError,
    NoSignalError,
    SyncNotFoundError,
    TruncationError,
)
from .frames import (
    PREAMBLE,
    BitStream,
    Frame,
    LineCode,
    manchester_decode_lenient,
    manchester_encode,
    parse_frame,
)
from .waveform import EnvelopeSignal, SymbolTiming

__all__ = [
    "DemodConfig",
    "DecodedFrame",
    "FrameStats",
    "DecodeResult",
    "smooth",
    "threshold",
    "find_preamble",
    "slice_symbols",
    "demodulate",
]

# threshold distributions narrower than this are treated as carrier-free
_DEGENERATE_SPREAD = 1e-9
# absorbs FFT-correlation rounding; real mismatches step in units of 1/(2M)
_SYNC_EPS = 1e-6


@dataclass(frozen=True)
class DemodConfig:
    """Receiver settings; timing and scheme must match the transmitter.

    threshold_mode is either the string "midpoint" (cut at the midpoint of
    the 5th/95th percentiles) or a float for a fixed cut level.
    sync_tolerance is the accepted fraction of mismatching samples when
    validating a preamble candidate (0 = require a perfect match).
    """

    timing: SymbolTiming
    scheme: LineCode = LineCode.OOK_DIRECT
    smooth_window: int = 1
    sync_tolerance: float = 0.0
    threshold_mode: float | str = "midpoint"

    def __post_init__(self):
        object.__setattr__(self, "scheme", LineCode(self.scheme))
        spH = self.timing.samples_per_halfbit
        if not 1 <= self.smooth_window <= spH:
            raise ConfigError(
                f"smooth_window must be in [1, {spH:g}] samples, got {self.smooth_window}"
            )
        if not 0.0 <= self.sync_tolerance < 0.5:
            raise ConfigError(
                f"sync_tolerance must be in [0, 0.5), got {self.sync_tolerance}"
            )
        if isinstance(self.threshold_mode, str) and self.threshold_mode != "midpoint":
            raise ConfigError(f"unknown threshold mode {self.threshold_mode!r}")

    @property
    def samples_per_symbol(self) -> float:
        if self.scheme is LineCode.MANCHESTER:
            return self.timing.samples_per_halfbit
        return self.timing.samples_per_bit

    @property
    def symbols_per_bit(self) -> int:
        return 2 if self.scheme is LineCode.MANCHESTER else 1


@dataclass(frozen=True)
class FrameStats:
    """Soft per-frame metrics measured on the unsmoothed input."""

    on_level: float
    off_level: float
    est_snr_db: float
    manchester_violations: int = 0


@dataclass(frozen=True)
class DecodedFrame:
    frame: Frame
    start_sample: int
    crc_valid: bool
    stats: FrameStats


@dataclass(frozen=True)
class DecodeResult:
    frames: tuple[DecodedFrame, ...]
    raw_bits: BitStream  # recovered line-symbol stream, concatenated per frame

    def payloads(self) -> list[BitStream]:
        return [df.frame.payload for df in self.frames]


def smooth(signal: EnvelopeSignal, window: int) -> EnvelopeSignal:
    """Centered moving average; edge windows shrink to what is available."""
    if window < 1:
        raise ConfigError(f"smoothing window must be >= 1, got {window}")
    if window == 1 or signal.samples.size == 0:
        return signal
    x = signal.samples
    n = x.size
    csum = np.concatenate([[0.0], np.cumsum(x)])
    idx = np.arange(n)
    lo = np.maximum(idx - (window - 1) // 2, 0)
    hi = np.minimum(idx + window // 2 + 1, n)
    out = (csum[hi] - csum[lo]) / (hi - lo)
    return EnvelopeSignal(out, signal.sample_rate)


def threshold(signal: EnvelopeSignal, mode: float | str = "midpoint") -> BitStream:
    """Per-sample hard decision: sample >= cut -> 1, else 0.

    Midpoint mode places the cut halfway between the 5th and 95th
    percentiles; a degenerate spread means there is no signal to slice.
    """
    if signal.samples.size == 0:
        raise NoSignalError("empty signal")
    if isinstance(mode, str):
        if mode != "midpoint":
            raise ConfigError(f"unknown threshold mode {mode!r}")
        p5, p95 = np.percentile(signal.samples, [5.0, 95.0])
        if p95 - p5 < _DEGENERATE_SPREAD:
            raise NoSignalError(
                f"sample spread {p95 - p5:.3g} below {_DEGENERATE_SPREAD:g}; no signal"
            )
        cut = (p5 + p95) / 2.0
    else:
        cut = float(mode)
    return BitStream._wrap((signal.samples >= cut).astype(np.uint8))


def _as_mask(samplebits: BitStream | np.ndarray) -> np.ndarray:
    if isinstance(samplebits, BitStream):
        return samplebits.bits
    return np.asarray(samplebits, dtype=np.uint8)


def _preamble_symbols(scheme: LineCode) -> np.ndarray:
    if scheme is LineCode.MANCHESTER:
        return manchester_encode(PREAMBLE).bits
    return PREAMBLE.bits


def _symbol_bounds(start: int, sps: float, count: int) -> np.ndarray:
    """Cumulative rounding of symbol boundaries, mirroring synthesis."""
    return start + np.floor(np.arange(count + 1) * sps + 0.5).astype(np.int64)


def _central_windows(bounds: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Central ~50% of each symbol window (drop a quarter from each end)."""
    widths = np.diff(bounds)
    trim = widths // 4
    return bounds[:-1] + trim, bounds[1:] - trim


def find_preamble(
    samplebits: BitStream | np.ndarray, cfg: DemodConfig, start_at: int = 0
) -> int:
    """Locate the line-coded preamble in a per-sample decision stream.

    Correlates the +/-1-mapped stream against the expected preamble
    waveform masked to the central half of each symbol window (so
    transition ramps from smoothing cannot fail a clean signal). A random
    payload can legitimately contain the alternating pattern, so the
    earliest offset within sync_tolerance wins, refined to the best match
    in its immediate neighbourhood. Raises SyncNotFoundError when no
    offset qualifies.
    """
    mask = _as_mask(samplebits)
    sym = _preamble_symbols(cfg.scheme)
    bounds = _symbol_bounds(0, cfg.samples_per_symbol, sym.size)
    lo, hi = _central_windows(bounds)
    length = int(bounds[-1])
    region = mask[start_at:]
    if region.size < length:
        raise SyncNotFoundError("signal shorter than the preamble")
    tmpl = np.zeros(length, dtype=np.float32)
    for k in range(sym.size):
        tmpl[lo[k] : hi[k]] = 2.0 * sym[k] - 1.0
    weighted = int((hi - lo).sum())
    x = region.astype(np.float32) * 2 - 1
    corr = _sig.correlate(x, tmpl, mode="valid", method="auto")
    mismatch = (weighted - corr) / (2.0 * weighted)
    passing = np.flatnonzero(mismatch <= cfg.sync_tolerance + _SYNC_EPS)
    if passing.size == 0:
        raise SyncNotFoundError(
            f"no preamble within tolerance {cfg.sync_tolerance:g} after {start_at}"
        )
    # the alternating pattern is periodic, so a tolerant match can trigger
    # up to one preamble length early on partial overlap; refine over that
    # span. Central-window scores plateau around the true offset, so ties
    # break on the full-waveform correlation, whose peak is unique there.
    first = int(passing[0])
    refine = mismatch[first : first + length + int(cfg.samples_per_symbol)]
    ties = first + np.flatnonzero(refine <= refine.min() + _SYNC_EPS)
    full = np.repeat(sym.astype(np.float32) * 2 - 1, np.diff(bounds))
    corr_full = np.array([float(x[t : t + length] @ full) for t in ties])
    return start_at + int(ties[np.argmax(corr_full)])


def slice_symbols(
    samplebits: BitStream | np.ndarray, start: int, cfg: DemodConfig, count: int
) -> BitStream:
    """Decide ``count`` line symbols starting at ``start``.

    Each symbol is a majority vote over the central half of its sample
    window; exact ties resolve to 0. Raises TruncationError (carrying the
    symbols decided so far) if the stream ends first.
    """
    mask = _as_mask(samplebits)
    if count == 0:
        return BitStream()
    sps = cfg.samples_per_symbol
    bounds = _symbol_bounds(start, sps, count)
    if start < 0:
        raise ConfigError(f"start must be non-negative, got {start}")
    if bounds[-1] > mask.size:
        fit = int(np.searchsorted(bounds, mask.size, side="right")) - 1
        partial = slice_symbols(mask, start, cfg, max(fit, 0)) if fit > 0 else BitStream()
        raise TruncationError(
            f"{count} symbols need {int(bounds[-1])} samples, have {mask.size}",
            partial=partial,
        )
    lo, hi = _central_windows(bounds)
    csum = np.concatenate([[0], np.cumsum(mask)])
    ones = csum[hi] - csum[lo]
    votes = hi - lo
    return BitStream._wrap((2 * ones > votes).astype(np.uint8))


def _frame_stats(
    raw: np.ndarray, bounds_lo: np.ndarray, bounds_hi: np.ndarray, symbols: np.ndarray,
    violations: int,
) -> FrameStats:
    """Level/SNR metrics over the central windows, grouped by decision."""
    spans_on = [(l, h) for l, h, s in zip(bounds_lo, bounds_hi, symbols) if s]
    spans_off = [(l, h) for l, h, s in zip(bounds_lo, bounds_hi, symbols) if not s]
    on_vals = np.concatenate([raw[l:h] for l, h in spans_on]) if spans_on else np.zeros(0)
    off_vals = np.concatenate([raw[l:h] for l, h in spans_off]) if spans_off else np.zeros(0)
    on_level = float(on_vals.mean()) if on_vals.size else math.nan
    off_level = float(off_vals.mean()) if off_vals.size else math.nan
    if on_vals.size == 0:
        snr = -math.inf
    else:
        noise = float(off_vals.var()) if off_vals.size else 0.0
        snr = math.inf if noise <= 0 else 10.0 * math.log10(on_level**2 / noise)
    return FrameStats(
        on_level=on_level, off_level=off_level, est_snr_db=snr,
        manchester_violations=violations,
    )


def demodulate(signal: EnvelopeSignal, cfg: DemodConfig) -> DecodeResult:
    """Full receive pass: smooth, threshold, then scan for frames.

    Each hit runs preamble sync, symbol slicing, line-code decoding and
    frame parsing; a CRC mismatch flags the frame invalid but keeps its
    payload. The scan resumes one bit time after each frame (or one
    preamble length after an unparseable hit) until no preamble is found.
    """
    smoothed = smooth(signal, cfg.smooth_window)
    mask = threshold(smoothed, cfg.threshold_mode).bits
    f = cfg.symbols_per_bit
    sps = cfg.samples_per_symbol
    raw = signal.samples

    frames: list[DecodedFrame] = []
    raw_segments: list[np.ndarray] = []
    pos = 0
    preamble_span = int(math.floor(8 * f * sps + 0.5))
    while True:
        try:
            start = find_preamble(mask, cfg, start_at=pos)
        except SyncNotFoundError:
            break
        try:
            head = slice_symbols(mask, start, cfg, (8 + 16) * f)
        except TruncationError:
            break
        if cfg.scheme is LineCode.MANCHESTER:
            head_bits, _ = manchester_decode_lenient(head)
        else:
            head_bits = head
        length = head_bits[8:24].to_uint()
        total_symbols = (8 + 16 + length + 16) * f
        try:
            # reslice the whole frame from `start` so every symbol sits on
            # the same rounding lattice the transmitter used
            symbols = slice_symbols(mask, start, cfg, total_symbols)
        except TruncationError:
            # corrupted length field or a frame cut short; skip this hit
            pos = start + preamble_span
            continue
        if cfg.scheme is LineCode.MANCHESTER:
            bits, violations = manchester_decode_lenient(symbols)
            n_violations = int(violations.size)
        else:
            bits = symbols
            n_violations = 0
        try:
            frame = parse_frame(bits)
            crc_valid = True
        except FrameIntegrityError as err:
            frame = err.frame
            crc_valid = False
        except (FrameSyncError, TruncationError):
            pos = start + preamble_span
            continue

        bounds = _symbol_bounds(start, sps, total_symbols)
        lo, hi = _central_windows(bounds)
        stats = _frame_stats(raw, lo, hi, symbols.bits, n_violations)
        frames.append(DecodedFrame(frame=frame, start_sample=start,
                                   crc_valid=crc_valid, stats=stats))
        raw_segments.append(symbols.bits)
        frame_end = int(bounds[-1])
        pos = frame_end + int(math.floor(cfg.timing.samples_per_bit + 0.5))
        if pos >= mask.size:
            break

    raw_bits = BitStream._wrap(
        np.concatenate(raw_segments) if raw_segments else np.zeros(0, dtype=np.uint8)
    )
    return DecodeResult(frames=tuple(frames), raw_bits=raw_bits)
