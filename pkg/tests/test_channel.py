"""Channel model tests: noise calibration, distance table, shielding,
jammer and harmonics."""

from decimal import Decimal, getcontext

import numpy as np
import pytest

from ramlink import (
    NOISE_DISABLED,
    SNR_ANCHORS_CM_DB,
    CalibrationError,
    ChannelModel,
    ConfigError,
    DomainError,
    EnvelopeSignal,
    JammerConfig,
    ShieldSpec,
    apply_awgn,
    apply_channel,
    apply_jammer,
    clock_harmonics,
    distance_to_snr,
    faraday_attenuation,
)


def unit_ook_signal(n=200_000, seed=1):
    rng = np.random.default_rng(seed)
    mask = rng.integers(0, 2, n).astype(bool)
    return EnvelopeSignal(mask.astype(float), 200_000.0), mask


# ---------------------------------------------------------------------------
# apply_awgn
# ---------------------------------------------------------------------------

def test_noise_disabled_sentinel_is_bit_exact():
    sig, _ = unit_ook_signal(5000)
    out = apply_awgn(sig, ChannelModel(snr_db=NOISE_DISABLED, seed=9))
    assert np.array_equal(out.samples, sig.samples)


def test_noise_variance_tracks_requested_snr():
    sig, _ = unit_ook_signal(200_000)
    out = apply_awgn(sig, ChannelModel(snr_db=20.0, seed=3))
    noise = out.samples - sig.samples
    assert abs(noise.var() / 0.01 - 1.0) < 0.05  # sigma^2 = 1/10^2


def test_awgn_seed_determinism():
    sig, _ = unit_ook_signal(10_000)
    a = apply_awgn(sig, ChannelModel(snr_db=15.0, seed=42))
    b = apply_awgn(sig, ChannelModel(snr_db=15.0, seed=42))
    c = apply_awgn(sig, ChannelModel(snr_db=15.0, seed=43))
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)


def test_awgn_preserves_length_and_rate():
    sig, _ = unit_ook_signal(5000)
    out = apply_awgn(sig, ChannelModel(snr_db=10.0, seed=0))
    assert len(out) == len(sig)
    assert out.sample_rate == sig.sample_rate


def test_awgn_all_zero_signal_is_calibration_error():
    sig = EnvelopeSignal(np.zeros(1000), 1000.0)
    with pytest.raises(CalibrationError):
        apply_awgn(sig, ChannelModel(snr_db=20.0, seed=0))


# ---------------------------------------------------------------------------
# distance_to_snr
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("cm,db", list(SNR_ANCHORS_CM_DB))
def test_distance_anchors_exact(cm, db):
    assert distance_to_snr(cm) == db


def test_distance_interpolation_midpoint():
    assert distance_to_snr(150.0) == 28.5  # halfway between 30 dB and 27 dB


def test_distance_domain_errors():
    with pytest.raises(DomainError):
        distance_to_snr(49.9)
    with pytest.raises(DomainError):
        distance_to_snr(701.0)


def test_distance_monotone_non_increasing():
    grid = np.linspace(50.0, 700.0, 400)
    values = [distance_to_snr(d) for d in grid]
    assert all(a >= b for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------------------
# faraday_attenuation
# ---------------------------------------------------------------------------

def test_faraday_thin_shield_limit():
    res = faraday_attenuation(ShieldSpec(sigma=1.0, d=1e-12, mu=1.0, f=1.0))
    assert abs(res.attenuation_db) < 1e-9


def test_faraday_unity_ratio_point():
    res = faraday_attenuation(ShieldSpec(sigma=1.0, d=1.0, mu=1.0, f=1.0))
    assert res.attenuation_db == pytest.approx(-3.0103, abs=1e-4)
    assert res.shielding_db == pytest.approx(3.0103, abs=1e-4)


def test_faraday_copper_point():
    # frozen from a 50-digit Decimal evaluation of the same expression
    res = faraday_attenuation(
        ShieldSpec(sigma=5.8e7, d=1e-3, mu=1.2566e-6, f=1.6e9)
    )
    assert res.attenuation_db == pytest.approx(-29.20743467834608, rel=1e-12)
    assert res.shielding_db == pytest.approx(29.2, abs=0.05)


def test_faraday_against_decimal_oracle():
    getcontext().prec = 50
    rng = np.random.default_rng(7)
    for _ in range(20):
        sigma = 10.0 ** rng.uniform(3, 8)
        d = 10.0 ** rng.uniform(-5, -1)
        mu = 10.0 ** rng.uniform(-7, -4)
        f = 10.0 ** rng.uniform(6, 10)
        res = faraday_attenuation(ShieldSpec(sigma, d, mu, f))
        r = Decimal(sigma) * Decimal(d) / (Decimal(mu) * Decimal(f))
        want = Decimal(10) * (Decimal(1) / (Decimal(1) + r * r)).log10()
        assert abs(res.attenuation_db - float(want)) <= 1e-9 * abs(float(want))


def test_faraday_sign_and_monotonicity():
    base = ShieldSpec(sigma=1e5, d=1e-3, mu=1e-6, f=1e9)
    res = faraday_attenuation(base)
    assert res.attenuation_db <= 0
    thicker = faraday_attenuation(ShieldSpec(1e5, 2e-3, 1e-6, 1e9))
    more_conductive = faraday_attenuation(ShieldSpec(2e5, 1e-3, 1e-6, 1e9))
    higher_f = faraday_attenuation(ShieldSpec(1e5, 1e-3, 1e-6, 2e9))
    assert thicker.shielding_db > res.shielding_db
    assert more_conductive.shielding_db > res.shielding_db
    assert higher_f.shielding_db < res.shielding_db


def test_shield_spec_validation():
    with pytest.raises(ConfigError):
        ShieldSpec(sigma=0.0, d=1.0, mu=1.0, f=1.0)
    with pytest.raises(ConfigError):
        ShieldSpec(sigma=1.0, d=1.0, mu=-1.0, f=1.0)


# ---------------------------------------------------------------------------
# apply_jammer
# ---------------------------------------------------------------------------

def test_jammer_zero_duty_is_identity():
    sig, _ = unit_ook_signal(2000)
    out = apply_jammer(sig, JammerConfig(duty_cycle=0.0), seed=1)
    assert np.array_equal(out.samples, sig.samples)


def test_jammer_full_duty_adds_constant():
    sig, _ = unit_ook_signal(2000)
    out = apply_jammer(sig, JammerConfig(duty_cycle=1.0, amplitude=0.75), seed=1)
    assert np.allclose(out.samples - sig.samples, 0.75)


def test_jammer_duty_fraction_converges():
    base = EnvelopeSignal(np.zeros(1_000_000), 200_000.0)
    out = apply_jammer(base, JammerConfig(duty_cycle=0.5, burst_ms=1.0), seed=42)
    assert abs(out.samples.mean() - 0.5) < 0.02
    quarter = apply_jammer(base, JammerConfig(duty_cycle=0.25, burst_ms=0.5), seed=9)
    assert abs((quarter.samples > 0).mean() - 0.25) < 0.03


def test_jammer_determinism():
    sig, _ = unit_ook_signal(50_000)
    cfg = JammerConfig(duty_cycle=0.4, burst_ms=2.0, amplitude=1.5)
    a = apply_jammer(sig, cfg, seed=5)
    b = apply_jammer(sig, cfg, seed=5)
    c = apply_jammer(sig, cfg, seed=6)
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)


def test_jammer_config_validation():
    with pytest.raises(ConfigError):
        JammerConfig(duty_cycle=1.2)
    with pytest.raises(ConfigError):
        JammerConfig(duty_cycle=0.5, burst_ms=0.0)
    with pytest.raises(ConfigError):
        JammerConfig(duty_cycle=0.5, amplitude=-1.0)


def test_apply_channel_composes_noise_and_jammer():
    sig, _ = unit_ook_signal(20_000)
    model = ChannelModel(snr_db=20.0, seed=7,
                         jammer=JammerConfig(duty_cycle=0.3, burst_ms=1.0))
    out = apply_channel(sig, model)
    plain = apply_awgn(sig, ChannelModel(snr_db=20.0, seed=7))
    # same noise realization; the jammer only ever adds on top
    extra = out.samples - plain.samples
    assert (extra >= -1e-12).all()
    assert extra.max() > 0.5


# ---------------------------------------------------------------------------
# clock_harmonics
# ---------------------------------------------------------------------------

def test_harmonics_ddr_clock():
    assert clock_harmonics(1.6, 3) == [1.6, 3.2, 4.8]


def test_harmonics_trivial_and_multiples():
    assert clock_harmonics(1.0, 1) == [1.0]
    assert clock_harmonics(2.4, 2) == [2.4, 4.8]


def test_harmonics_validation():
    with pytest.raises(ConfigError):
        clock_harmonics(0.0, 3)
    with pytest.raises(ConfigError):
        clock_harmonics(1.6, 0)
