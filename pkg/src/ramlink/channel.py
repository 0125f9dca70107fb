"""Propagation-path models: calibrated additive noise, the measured
distance-to-SNR table, Faraday-shield attenuation, a memory-jammer
impairment, and clock-harmonic utilities.

The free-space path is modelled as additive white Gaussian noise on the
envelope, calibrated so the requested SNR (carrier-on power over noise
variance) is what a receiver-side estimator measures back. Distances map
to SNR through piecewise-linear interpolation between measured anchors;
there is no path-loss model behind them, so no extrapolation either.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import CalibrationError, ConfigError, DomainError
from .waveform import EnvelopeSignal

__all__ = [
    "NOISE_DISABLED",
    "ChannelModel",
    "JammerConfig",
    "ShieldSpec",
    "FaradayAttenuation",
    "apply_awgn",
    "apply_channel",
    "apply_jammer",
    "distance_to_snr",
    "faraday_attenuation",
    "clock_harmonics",
    "SNR_ANCHORS_CM_DB",
]

#: sentinel SNR that disables noise injection entirely
NOISE_DISABLED = math.inf

#: measured average SNR anchors over 50-700 cm
SNR_ANCHORS_CM_DB: tuple[tuple[float, float], ...] = (
    (50.0, 38.0),
    (100.0, 30.0),
    (200.0, 27.0),
    (300.0, 22.0),
    (400.0, 17.0),
    (500.0, 15.0),
    (600.0, 12.0),
    (700.0, 8.0),
)

_ANCHOR_CM = np.array([d for d, _ in SNR_ANCHORS_CM_DB])
_ANCHOR_DB = np.array([s for _, s in SNR_ANCHORS_CM_DB])


@dataclass(frozen=True)
class JammerConfig:
    """Random carrier-like interference from competing memory activity.

    duty_cycle is the long-run fraction of time the jammer is active,
    burst_ms the mean burst duration, amplitude the jammer envelope level
    relative to the signal's carrier-on level.
    """

    duty_cycle: float
    burst_ms: float = 5.0
    amplitude: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.duty_cycle <= 1.0:
            raise ConfigError(f"duty_cycle must be in [0,1], got {self.duty_cycle}")
        if not self.burst_ms > 0:
            raise ConfigError(f"burst_ms must be positive, got {self.burst_ms}")
        if self.amplitude < 0:
            raise ConfigError(f"amplitude must be non-negative, got {self.amplitude}")


@dataclass(frozen=True)
class ChannelModel:
    """Target SNR plus RNG seed (and optional jammer) for one channel pass."""

    snr_db: float
    seed: int = 0
    jammer: JammerConfig | None = None

    def __post_init__(self):
        if math.isnan(self.snr_db):
            raise ConfigError("snr_db must not be NaN")


def apply_awgn(signal: EnvelopeSignal, model: ChannelModel) -> EnvelopeSignal:
    """Add white Gaussian noise calibrated against the carrier-on power.

    Noise variance is P_on / 10^(snr_db/10) where P_on is the mean squared
    level of carrier-on samples (those above half the peak). The sentinel
    snr_db = inf returns the input signal unchanged, bit for bit. Equal
    seeds give bit-identical outputs.
    """
    if signal.samples.size == 0:
        raise CalibrationError("cannot calibrate noise for an empty signal")
    if model.snr_db == NOISE_DISABLED:
        return signal
    samples = signal.samples
    peak = samples.max()
    on = samples > 0.5 * peak if peak > 0 else np.zeros(0, dtype=bool)
    if peak <= 0 or not on.any():
        raise CalibrationError("no carrier-on samples; cannot set the noise level")
    p_on = float(np.mean(samples[on] ** 2))
    sigma = math.sqrt(p_on / 10.0 ** (model.snr_db / 10.0))
    rng = np.random.default_rng(model.seed)
    noisy = samples + rng.normal(0.0, sigma, samples.size)
    return EnvelopeSignal(noisy, signal.sample_rate)


def apply_jammer(signal: EnvelopeSignal, cfg: JammerConfig, seed: int) -> EnvelopeSignal:
    """Add an independent random on/off envelope on top of the signal.

    Burst lengths are exponentially distributed with mean ``burst_ms``;
    quiet gaps are scaled so the long-run on-fraction equals duty_cycle.
    Deterministic for a given seed.
    """
    n = signal.samples.size
    if cfg.duty_cycle == 0.0 or n == 0 or cfg.amplitude == 0.0:
        return signal
    if cfg.duty_cycle == 1.0:
        return EnvelopeSignal(signal.samples + cfg.amplitude, signal.sample_rate)
    rng = np.random.default_rng(seed)
    mask = _burst_mask(n, signal.sample_rate, cfg, rng)
    return EnvelopeSignal(signal.samples + cfg.amplitude * mask, signal.sample_rate)


def _burst_mask(
    n: int, sample_rate: float, cfg: JammerConfig, rng: np.random.Generator
) -> np.ndarray:
    on_mean = cfg.burst_ms * 1e-3 * sample_rate
    off_mean = on_mean * (1.0 - cfg.duty_cycle) / cfg.duty_cycle
    state = bool(rng.random() < cfg.duty_cycle)
    first = state
    # draw alternating segment lengths in continuous sample time, then
    # quantize on the cumulative axis so nothing drifts
    lengths: list[np.ndarray] = []
    total = 0.0
    while total < n:
        batch = max(16, int((n - total) / max(on_mean, off_mean) * 2) + 2)
        means = np.empty(batch)
        means[0::2] = on_mean if state else off_mean
        means[1::2] = off_mean if state else on_mean
        seg = rng.exponential(means)
        lengths.append(seg)
        total += float(seg.sum())
        state = state if batch % 2 == 0 else not state
    segments = np.concatenate(lengths)
    bounds = np.floor(np.concatenate([[0.0], np.cumsum(segments)]) + 0.5).astype(np.int64)
    bounds = np.clip(bounds, 0, n)
    mask = np.zeros(n, dtype=np.float64)
    start_idx = 0 if first else 1
    for i in range(start_idx, len(segments), 2):
        lo, hi = bounds[i], bounds[i + 1]
        if lo >= n:
            break
        mask[lo:hi] = 1.0
    return mask


def apply_channel(signal: EnvelopeSignal, model: ChannelModel) -> EnvelopeSignal:
    """Full channel pass: calibrated noise, then the jammer if configured.

    The jammer stream gets its own RNG derived from the model seed so the
    noise realization is unchanged by toggling the jammer on or off.
    """
    out = apply_awgn(signal, model)
    if model.jammer is not None:
        jam_seed = int(np.random.SeedSequence((model.seed, 0x4A4D)).generate_state(1)[0])
        out = apply_jammer(out, model.jammer, jam_seed)
    return out


def distance_to_snr(distance_cm: float) -> float:
    """Average SNR at a receiver distance, from the measured anchor table.

    Exact at the anchors (50 cm -> 38 dB ... 700 cm -> 8 dB) and
    piecewise-linear in between. Distances outside [50, 700] cm raise
    DomainError; the table says nothing out there.
    """
    if math.isnan(distance_cm) or not _ANCHOR_CM[0] <= distance_cm <= _ANCHOR_CM[-1]:
        raise DomainError(
            f"distance {distance_cm} cm outside the measured range "
            f"[{_ANCHOR_CM[0]:g}, {_ANCHOR_CM[-1]:g}] cm"
        )
    return float(np.interp(distance_cm, _ANCHOR_CM, _ANCHOR_DB))


@dataclass(frozen=True)
class ShieldSpec:
    """Conductive-enclosure parameters: conductivity (S/m), thickness (m),
    permeability (H/m) and radiation frequency (Hz)."""

    sigma: float
    d: float
    mu: float
    f: float

    def __post_init__(self):
        for name in ("sigma", "d", "mu", "f"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be strictly positive, got {v}")


class FaradayAttenuation(NamedTuple):
    attenuation_db: float  # as printed by the formula; always <= 0
    shielding_db: float    # magnitude, the usual way shielding is quoted


def faraday_attenuation(spec: ShieldSpec) -> FaradayAttenuation:
    """Attenuation of a conductive shield: A = 10 log10(1 / (1 + (sd/uf)^2)).

    Computed exactly as that expression reads, which yields non-positive
    decibels; the magnitude is returned alongside as shielding_db. Note the
    ratio sigma*d/(mu*f) is not dimensionless in SI and the formula gives
    modest figures for thick copper, so treat it as an approximation.
    """
    ratio = spec.sigma * spec.d / (spec.mu * spec.f)
    attenuation = -10.0 * math.log1p(ratio * ratio) / math.log(10.0)
    return FaradayAttenuation(attenuation_db=attenuation, shielding_db=abs(attenuation))


def clock_harmonics(clock_ghz: float, n: int) -> list[float]:
    """Integer harmonics of a memory clock: [f, 2f, ..., nf] in GHz.

    E.g. a 1.6 GHz clock radiates around 1.6, 3.2 and 4.8 GHz. Values are
    rounded to 1e-9 GHz so exact rational multiples survive binary floats.
    """
    if not (clock_ghz > 0 and math.isfinite(clock_ghz)):
        raise ConfigError(f"clock_ghz must be positive, got {clock_ghz}")
    if n < 1:
        raise ConfigError(f"need at least one harmonic, got n={n}")
    return [round(clock_ghz * k, 9) for k in range(1, n + 1)]
