"""Symbol timing, carrier activity schedules and baseband envelope synthesis.

The carrier is modelled at baseband as a unit-amplitude envelope rather
than a modulated RF carrier: the receive chain operates on the envelope
anyway, and the channel model injects noise at this level. Durations are
integer microseconds so schedules reproduce exactly; sample counts come
from one cumulative rounding so no per-interval drift accumulates.

An optional driver (:func:`execute_schedule`) plays a schedule back as real
memory-write activity with measured timing. True non-temporal stores are
not reachable from pure Python, so ON intervals sweep full writes over a
buffer sized well beyond last-level cache, which forces memory-bus traffic
either way. It is verified for timing only, never for emission.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

from .errors import CapabilityError, ConfigError
from .frames import BitStream, LineCode

__all__ = [
    "CarrierState",
    "SymbolTiming",
    "ActivitySchedule",
    "EnvelopeSignal",
    "TimingReport",
    "schedule_from_symbols",
    "silence",
    "concat_schedules",
    "synthesize_envelope",
    "execute_schedule",
    "supports_memory_stress",
    "write_envelope",
    "read_envelope",
    "read_iq",
    "sidecar_path",
    "DEFAULT_SAMPLE_RATE",
    "DEFAULT_STRESS_BUFFER_BYTES",
]

#: 100 samples per half-bit at the finest standard bit time (1 ms)
DEFAULT_SAMPLE_RATE = 200_000.0

#: default memory-stress buffer; the exact write pattern is not pinned
#: anywhere authoritative, so size is simply a parameter
DEFAULT_STRESS_BUFFER_BYTES = 16 * 2**20

_MIN_SAMPLES_PER_HALFBIT = 4.0


class CarrierState(IntEnum):
    OFF = 0
    ON = 1

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class SymbolTiming:
    """Per-bit duration and synthesis sample rate.

    ``bit_time_ms`` is the duration of one payload bit (10/5/1 ms are the
    standard operating points). Manchester half-bits must span at least
    4 samples and a whole number of microseconds.
    """

    bit_time_ms: float
    sample_rate: float = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        if not (self.bit_time_ms > 0 and math.isfinite(self.bit_time_ms)):
            raise ConfigError(f"bit_time_ms must be positive, got {self.bit_time_ms}")
        if not (self.sample_rate > 0 and math.isfinite(self.sample_rate)):
            raise ConfigError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.samples_per_halfbit < _MIN_SAMPLES_PER_HALFBIT:
            raise ConfigError(
                f"{self.samples_per_halfbit:.2f} samples per half-bit; "
                f"need at least {_MIN_SAMPLES_PER_HALFBIT:g} to resolve Manchester half-bits"
            )
        half_us = self.bit_time_ms * 500.0
        if abs(half_us - round(half_us)) > 1e-6 * max(1.0, half_us):
            raise ConfigError(
                f"half-bit duration {half_us} us is not a whole number of microseconds"
            )

    @property
    def samples_per_bit(self) -> float:
        return self.sample_rate * self.bit_time_ms / 1000.0

    @property
    def samples_per_halfbit(self) -> float:
        return self.samples_per_bit / 2.0

    @property
    def bit_us(self) -> int:
        return round(self.bit_time_ms * 1000.0)

    @property
    def halfbit_us(self) -> int:
        return round(self.bit_time_ms * 500.0)

    def symbol_us(self, scheme: LineCode) -> int:
        return self.halfbit_us if scheme is LineCode.MANCHESTER else self.bit_us


@dataclass(frozen=True)
class ActivitySchedule:
    """Ordered carrier on/off intervals with integer-microsecond durations."""

    intervals: tuple[tuple[CarrierState, int], ...]

    def __post_init__(self):
        norm = []
        for state, dur in self.intervals:
            if dur <= 0:
                raise ConfigError(f"interval durations must be positive, got {dur}")
            norm.append((CarrierState(state), int(dur)))
        object.__setattr__(self, "intervals", tuple(norm))

    @property
    def total_us(self) -> int:
        return sum(dur for _, dur in self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)


def schedule_from_symbols(
    symbols: BitStream, timing: SymbolTiming, scheme: LineCode
) -> ActivitySchedule:
    """Turn line-coded symbols into merged carrier on/off intervals.

    For Manchester the symbols are half-bits (bit_time/2 each); for direct
    OOK they are full bits. Maximal runs of equal symbols merge into a
    single interval, so total duration is exactly symbol count times the
    symbol duration.
    """
    sym = symbols.bits
    if sym.size == 0:
        return ActivitySchedule(())
    dur_us = timing.symbol_us(LineCode(scheme))
    boundaries = np.flatnonzero(np.diff(sym)) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [sym.size]])
    intervals = tuple(
        (CarrierState(int(sym[s])), int((e - s) * dur_us)) for s, e in zip(starts, ends)
    )
    return ActivitySchedule(intervals)


def silence(duration_us: int) -> ActivitySchedule:
    """A single carrier-off interval, e.g. an inter-frame gap."""
    return ActivitySchedule(((CarrierState.OFF, int(duration_us)),))


def concat_schedules(*schedules: ActivitySchedule) -> ActivitySchedule:
    """Join schedules back to back. Equal states may touch across the
    joins; that only happens at frame boundaries by construction."""
    intervals: list[tuple[CarrierState, int]] = []
    for sched in schedules:
        intervals.extend(sched.intervals)
    return ActivitySchedule(tuple(intervals))


@dataclass(frozen=True)
class EnvelopeSignal:
    """Sampled baseband amplitude with its sample rate."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ConfigError("envelope samples must be one-dimensional")
        if arr.size and not np.isfinite(arr).all():
            raise ConfigError("envelope samples must be finite")
        if not (self.sample_rate > 0 and math.isfinite(self.sample_rate)):
            raise ConfigError(f"sample_rate must be positive, got {self.sample_rate}")
        arr = arr.copy() if arr is self.samples else arr
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate


def synthesize_envelope(
    schedule: ActivitySchedule, timing: SymbolTiming, amplitude: float = 1.0
) -> EnvelopeSignal:
    """Render a schedule as a piecewise-constant envelope.

    Sample boundaries are rounded on the cumulative time axis, so the total
    sample count is round(total_us * rate / 1e6) with no accumulated drift.
    """
    if not (amplitude > 0 and math.isfinite(amplitude)):
        raise ConfigError(f"amplitude must be positive, got {amplitude}")
    rate = timing.sample_rate
    if not schedule.intervals:
        return EnvelopeSignal(np.zeros(0), rate)
    durs = np.array([dur for _, dur in schedule.intervals], dtype=np.int64)
    cum_us = np.concatenate([[0], np.cumsum(durs)])
    boundaries = np.floor(cum_us * (rate / 1e6) + 0.5).astype(np.int64)
    counts = np.diff(boundaries)
    levels = np.array(
        [amplitude if state else 0.0 for state, _ in schedule.intervals], dtype=np.float64
    )
    return EnvelopeSignal(np.repeat(levels, counts), rate)


# ---------------------------------------------------------------------------
# envelope / IQ file formats
# ---------------------------------------------------------------------------

def sidecar_path(path: str | Path) -> Path:
    return Path(str(path) + ".json")


def write_envelope(
    path: str | Path,
    signal: EnvelopeSignal,
    *,
    bit_time_ms: float | None = None,
    scheme: LineCode | str | None = None,
    payload_bits: int | None = None,
    extra: dict | None = None,
) -> Path:
    """Write raw little-endian float32 samples plus a JSON metadata sidecar.

    Sidecar fields: sample_rate, bit_time_ms, scheme, payload_bits, plus
    optional channel settings (snr_db or distance_cm, seed, jammer.*)
    carried through ``extra``.
    """
    path = Path(path)
    signal.samples.astype("<f4").tofile(path)
    meta: dict = {
        "sample_rate": signal.sample_rate,
        "bit_time_ms": bit_time_ms,
        "scheme": LineCode(scheme).value if scheme is not None else None,
        "payload_bits": payload_bits,
    }
    if extra:
        meta.update(extra)
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def read_envelope(path: str | Path) -> tuple[EnvelopeSignal, dict]:
    """Read an envelope file and its sidecar (empty dict if absent)."""
    path = Path(path)
    samples = np.fromfile(path, dtype="<f4").astype(np.float64)
    meta: dict = {}
    side = sidecar_path(path)
    if side.exists():
        meta = json.loads(side.read_text())
    rate = meta.get("sample_rate") or DEFAULT_SAMPLE_RATE
    return EnvelopeSignal(samples, float(rate)), meta


def read_iq(path: str | Path, sample_rate: float | None = None) -> tuple[EnvelopeSignal, dict]:
    """Import interleaved little-endian float32 I,Q pairs as an envelope.

    The envelope is the magnitude sqrt(I^2 + Q^2), which is what the
    demodulator operates on for captures taken with SDR hardware.
    """
    path = Path(path)
    raw = np.fromfile(path, dtype="<f4")
    if raw.size % 2:
        raise ConfigError(f"IQ file holds {raw.size} floats; expected interleaved pairs")
    iq = raw.astype(np.float64).reshape(-1, 2)
    env = np.hypot(iq[:, 0], iq[:, 1])
    meta: dict = {}
    side = sidecar_path(path)
    if side.exists():
        meta = json.loads(side.read_text())
    rate = sample_rate or meta.get("sample_rate") or DEFAULT_SAMPLE_RATE
    return EnvelopeSignal(env, float(rate)), meta


# ---------------------------------------------------------------------------
# best-effort schedule execution with measured timing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimingReport:
    """Measured per-interval timestamps from :func:`execute_schedule`."""

    intervals: tuple[tuple[CarrierState, int, int, int], ...]  # state, req_us, start_ns, end_ns
    buffer_bytes: int = 0

    @property
    def total_requested_us(self) -> int:
        return sum(req for _, req, _, _ in self.intervals)

    @property
    def total_measured_us(self) -> float:
        if not self.intervals:
            return 0.0
        return (self.intervals[-1][3] - self.intervals[0][2]) / 1000.0

    @property
    def interval_errors_us(self) -> np.ndarray:
        """|measured - requested| per interval, in microseconds."""
        if not self.intervals:
            return np.zeros(0)
        measured = np.array([(e - s) / 1000.0 for _, _, s, e in self.intervals])
        requested = np.array([req for _, req, _, _ in self.intervals], dtype=np.float64)
        return np.abs(measured - requested)

    def __len__(self) -> int:
        return len(self.intervals)


def supports_memory_stress(buffer_size: int = DEFAULT_STRESS_BUFFER_BYTES) -> bool:
    """Probe whether the platform can run :func:`execute_schedule`."""
    try:
        _check_stress_support(buffer_size)
    except (CapabilityError, ConfigError):
        return False
    return True


def _check_stress_support(buffer_size: int) -> np.ndarray:
    if buffer_size < 2**20:
        raise ConfigError("memory-stress buffer must be at least 1 MiB")
    if not hasattr(time, "perf_counter_ns"):
        raise CapabilityError("no high-resolution monotonic clock available")
    try:
        return np.zeros(buffer_size // 8, dtype=np.uint64)
    except MemoryError as exc:
        raise CapabilityError(f"cannot allocate {buffer_size} byte stress buffer") from exc


def _sleep_until(deadline_ns: int) -> None:
    # coarse sleep, then spin for the tail; plain sleep() alone is too
    # granular for sub-millisecond interval accuracy
    while True:
        remaining = deadline_ns - time.perf_counter_ns()
        if remaining <= 0:
            return
        if remaining > 1_500_000:
            time.sleep((remaining - 1_000_000) / 1e9)
        # else spin


def execute_schedule(
    schedule: ActivitySchedule, buffer_size: int = DEFAULT_STRESS_BUFFER_BYTES
) -> TimingReport:
    """Play a schedule as real memory activity, returning measured timing.

    ON intervals repeatedly rewrite a buffer larger than last-level cache
    (forcing memory-bus traffic); OFF intervals sleep. Must run on a single
    dedicated thread; co-scheduled memory-heavy workloads will degrade both
    timing and any hoped-for emission.
    """
    buf = _check_stress_support(buffer_size)
    if not schedule.intervals:
        return TimingReport((), buffer_bytes=buffer_size)

    # chunked writes so the clock is checked every few hundred KiB
    chunk = min(buf.size, 32_768)
    records: list[tuple[CarrierState, int, int, int]] = []
    fill = np.uint64(0)
    now = time.perf_counter_ns()
    for state, dur_us in schedule.intervals:
        start = now
        deadline = start + dur_us * 1_000
        if state is CarrierState.ON:
            pos = 0
            while time.perf_counter_ns() < deadline:
                end = min(pos + chunk, buf.size)
                buf[pos:end] = fill
                pos = 0 if end >= buf.size else end
                if pos == 0:
                    fill = ~fill
        else:
            _sleep_until(deadline)
        now = time.perf_counter_ns()
        records.append((state, dur_us, start, now))
    return TimingReport(tuple(records), buffer_bytes=buffer_size)
