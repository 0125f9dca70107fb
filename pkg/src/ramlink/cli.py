"""Command-line front end.

Subcommands: encode, synth, channel, decode, sweep, exfil-time, faraday,
harmonics, roundtrip. Exit codes: 0 success, 1 decode/integrity failure,
2 configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import channel as ch
from . import demod, harness, waveform
from .errors import ConfigError, DomainError, RamlinkError
from .frames import BitStream, LineCode, build_frame, manchester_encode, ook_map


def _parse_payload(args: argparse.Namespace, default_hex: str | None = None) -> BitStream:
    if getattr(args, "payload_hex", None):
        return BitStream.from_hex(args.payload_hex)
    if getattr(args, "payload_file", None):
        text = Path(args.payload_file).read_text().strip()
        if set(text) <= set("01 \t\n\r"):
            return BitStream.from_text(text)
        return BitStream.from_hex(text)
    if default_hex is not None:
        return BitStream.from_hex(default_hex)
    raise ConfigError("a payload is required (--payload-hex or --payload-file)")


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"bad numeric list {text!r}") from exc


def _resolve_snr(args: argparse.Namespace, meta: dict | None = None) -> float:
    if getattr(args, "snr_db", None) is not None:
        return args.snr_db
    if getattr(args, "distance_cm", None) is not None:
        return ch.distance_to_snr(args.distance_cm)
    if meta:
        if meta.get("snr_db") is not None:
            return float(meta["snr_db"])
        if meta.get("distance_cm") is not None:
            return ch.distance_to_snr(float(meta["distance_cm"]))
    raise ConfigError("need --snr-db or --distance-cm (or sidecar channel settings)")


def _jammer_from(args: argparse.Namespace, meta: dict | None = None) -> ch.JammerConfig | None:
    duty = getattr(args, "jammer_duty", None)
    amp = getattr(args, "jammer_amplitude", None)
    burst = getattr(args, "jammer_burst_ms", None)
    side = (meta or {}).get("jammer") or {}
    duty = duty if duty is not None else side.get("duty_cycle")
    if duty is None or duty == 0:
        return None
    amp = amp if amp is not None else side.get("amplitude", 1.0)
    burst = burst if burst is not None else side.get("burst_ms", 5.0)
    return ch.JammerConfig(duty_cycle=duty, burst_ms=burst, amplitude=amp)


def _symbol_stream(payload: BitStream, scheme: LineCode) -> BitStream:
    frame_bits = build_frame(payload).serialize()
    if scheme is LineCode.MANCHESTER:
        return manchester_encode(frame_bits)
    return ook_map(frame_bits)


def _add_payload_args(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--payload-hex", help="payload as a hex string")
    group.add_argument("--payload-file", help="file with hex or '0'/'1' text")


def _add_channel_args(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--snr-db", type=float, help="target SNR in dB")
    group.add_argument("--distance-cm", type=float,
                       help="receiver distance; mapped through the SNR table")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jammer-duty", type=float, help="jammer duty cycle [0,1]")
    p.add_argument("--jammer-amplitude", type=float, help="jammer level vs carrier")
    p.add_argument("--jammer-burst-ms", type=float, help="mean jammer burst (ms)")


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_encode(args) -> int:
    payload = _parse_payload(args)
    symbols = _symbol_stream(payload, LineCode(args.scheme))
    _write_or_print(symbols.to_text() + "\n", args.out)
    return 0


def cmd_synth(args) -> int:
    payload = _parse_payload(args)
    scheme = LineCode(args.scheme)
    symbols = _symbol_stream(payload, scheme)
    timing = waveform.SymbolTiming(args.bit_time_ms, args.sample_rate)
    sched = waveform.schedule_from_symbols(symbols, timing, scheme)
    if args.pad_bits > 0:
        gap = waveform.silence(round(args.pad_bits * timing.bit_us))
        sched = waveform.concat_schedules(gap, sched, gap)
    sig = waveform.synthesize_envelope(sched, timing, args.amplitude)
    waveform.write_envelope(
        args.out, sig,
        bit_time_ms=args.bit_time_ms, scheme=scheme, payload_bits=len(payload),
    )
    print(f"wrote {len(sig)} samples at {sig.sample_rate:g} S/s to {args.out}")
    return 0


def cmd_channel(args) -> int:
    sig, meta = waveform.read_envelope(args.infile)
    snr = _resolve_snr(args, meta)
    jammer = _jammer_from(args, meta)
    seed = args.seed if args.seed is not None else int(meta.get("seed", 0))
    model = ch.ChannelModel(snr_db=snr, seed=seed, jammer=jammer)
    out_sig = ch.apply_channel(sig, model)
    extra = {"snr_db": snr, "seed": seed}
    if jammer is not None:
        extra["jammer"] = {
            "duty_cycle": jammer.duty_cycle,
            "burst_ms": jammer.burst_ms,
            "amplitude": jammer.amplitude,
        }
    waveform.write_envelope(
        args.out, out_sig,
        bit_time_ms=meta.get("bit_time_ms"), scheme=meta.get("scheme"),
        payload_bits=meta.get("payload_bits"), extra=extra,
    )
    print(f"wrote {len(out_sig)} samples to {args.out} (snr {snr:g} dB)")
    return 0


def cmd_decode(args) -> int:
    if args.iq:
        sig, meta = waveform.read_iq(args.infile, args.sample_rate)
    else:
        sig, meta = waveform.read_envelope(args.infile)
        if args.sample_rate:
            sig = waveform.EnvelopeSignal(sig.samples, args.sample_rate)
    bit_time = args.bit_time_ms or meta.get("bit_time_ms")
    scheme = args.scheme or meta.get("scheme")
    if bit_time is None or scheme is None:
        raise ConfigError("need --bit-time-ms and --scheme (or a metadata sidecar)")
    cfg = demod.DemodConfig(
        timing=waveform.SymbolTiming(float(bit_time), sig.sample_rate),
        scheme=LineCode(scheme),
        smooth_window=args.smooth_window,
        sync_tolerance=args.sync_tolerance,
        threshold_mode="midpoint" if args.threshold is None else args.threshold,
    )
    result = demod.demodulate(sig, cfg)
    reference = None
    if args.payload_hex or args.payload_file:
        reference = _parse_payload(args)

    lines = []
    for df in result.frames:
        payload = df.frame.payload
        hex_text = payload.to_hex() if len(payload) % 8 == 0 else "(" + payload.to_text() + ")"
        print(f"payload {hex_text} crc_valid={str(df.crc_valid).lower()}")
        ber = ""
        if reference is not None:
            ber = f"{harness._aligned_errors(reference, payload) / max(1, len(reference)):.6f}"
        lines.append(
            f"{df.start_sample},{len(payload)},{str(df.crc_valid).lower()},"
            f"{df.stats.est_snr_db:.2f},{ber}"
        )
    report = "start_sample,length_bits,crc_valid,est_snr_db,ber_vs_reference\n"
    report += "".join(line + "\n" for line in lines)
    _write_or_print(report, args.out)
    if not result.frames or not all(df.crc_valid for df in result.frames):
        return 1
    return 0


def cmd_sweep(args) -> int:
    spec = harness.SweepSpec(
        bit_times_ms=_parse_float_list(args.bit_time_ms),
        distances_cm=_parse_float_list(args.distance_cm),
        payload_bits=args.payload_bits,
        trials=args.trials,
        seed=args.seed,
        scheme=LineCode(args.scheme),
        snr_db_override=args.snr_db,
        jammer=_jammer_from(args),
    )
    report = harness.run_sweep(spec)
    _write_or_print(harness.emit_tables(report, args.format), args.out)
    return 0


def cmd_exfil_time(args) -> int:
    bit_times = _parse_float_list(args.bit_time_ms)
    if args.size_bits:
        items = (harness.ExfilItem(args.name or f"{args.size_bits} bits", args.size_bits),)
        _write_or_print(harness.exfil_table(bit_times, items, args.format), args.out)
    else:
        _write_or_print(harness.exfil_table(bit_times, fmt=args.format), args.out)
    return 0


def cmd_faraday(args) -> int:
    spec = ch.ShieldSpec(sigma=args.sigma, d=args.thickness_m, mu=args.mu, f=args.freq_hz)
    result = ch.faraday_attenuation(spec)
    print(f"attenuation_db={result.attenuation_db:.4f}")
    print(f"shielding_db={result.shielding_db:.4f}")
    return 0


def cmd_harmonics(args) -> int:
    freqs = ch.clock_harmonics(args.clock_ghz, args.count)
    print(", ".join(f"{f:g}" for f in freqs) + " GHz")
    return 0


def cmd_roundtrip(args) -> int:
    payload = _parse_payload(args, default_hex="44415441")
    snr = math.inf
    if args.snr_db is not None or args.distance_cm is not None:
        snr = _resolve_snr(args)
    outcome = harness.run_trial(
        payload,
        args.bit_time_ms,
        snr,
        scheme=LineCode(args.scheme),
        channel_seed=args.seed if args.seed is not None else 0,
        jammer=_jammer_from(args),
    )
    if outcome.lost:
        print("frame lost (no sync)")
        return 1
    assert outcome.result is not None
    frame = outcome.result.frames[0]
    ok = outcome.bit_errors == 0 and frame.crc_valid
    print(
        f"sent {len(payload)} bits at t={args.bit_time_ms:g} ms, snr "
        f"{'disabled' if math.isinf(snr) else f'{snr:g} dB'}: "
        f"{outcome.bit_errors} bit errors (ber {outcome.ber:.4f}), "
        f"crc_valid={str(frame.crc_valid).lower()}"
    )
    return 0 if ok else 1


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ramlink",
        description="Covert-channel signal chain: framing, OOK/Manchester "
        "modulation, calibrated noisy channel, demodulation and BER evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="payload -> line-coded bit text")
    _add_payload_args(p)
    p.add_argument("--scheme", choices=[c.value for c in LineCode], default="manchester")
    p.add_argument("--out")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("synth", help="payload -> envelope file (+ sidecar)")
    _add_payload_args(p)
    p.add_argument("--scheme", choices=[c.value for c in LineCode], default="manchester")
    p.add_argument("--bit-time-ms", type=float, default=10.0)
    p.add_argument("--sample-rate", type=float, default=waveform.DEFAULT_SAMPLE_RATE)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--pad-bits", type=float, default=4.0,
                   help="leading/trailing silence, in bit times")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("channel", help="add calibrated noise (and jammer) to an envelope file")
    p.add_argument("infile")
    _add_channel_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("decode", help="demodulate an envelope (or IQ) file")
    p.add_argument("infile")
    p.add_argument("--iq", action="store_true", help="input is interleaved float32 I,Q")
    p.add_argument("--sample-rate", type=float)
    p.add_argument("--bit-time-ms", type=float)
    p.add_argument("--scheme", choices=[c.value for c in LineCode])
    p.add_argument("--smooth-window", type=int, default=1)
    p.add_argument("--sync-tolerance", type=float, default=0.25)
    p.add_argument("--threshold", type=float, help="fixed cut level (default: midpoint)")
    _add_payload_args(p)  # reference payload for BER column
    p.add_argument("--out", help="write the per-frame CSV report here")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("sweep", help="BER sweep over bit time x distance")
    p.add_argument("--bit-time-ms", default="10,5,1", help="comma-separated list")
    p.add_argument("--distance-cm", default="50,100,200,300,400,500,600,700",
                   help="comma-separated list")
    p.add_argument("--snr-db", type=float, help="override the distance table")
    p.add_argument("--payload-bits", type=int, default=256)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scheme", choices=[c.value for c in LineCode], default="manchester")
    p.add_argument("--jammer-duty", type=float)
    p.add_argument("--jammer-amplitude", type=float)
    p.add_argument("--jammer-burst-ms", type=float)
    p.add_argument("--format", choices=["csv", "text"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("exfil-time", help="exfiltration-time table")
    p.add_argument("--bit-time-ms", default="10,5,1", help="comma-separated list")
    p.add_argument("--size-bits", type=int, help="custom secret size")
    p.add_argument("--name", help="label for --size-bits")
    p.add_argument("--format", choices=["csv", "text"], default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_exfil_time)

    p = sub.add_parser("faraday", help="conductive-shield attenuation")
    p.add_argument("--sigma", type=float, required=True, help="conductivity (S/m)")
    p.add_argument("--thickness-m", type=float, required=True)
    p.add_argument("--mu", type=float, required=True, help="permeability (H/m)")
    p.add_argument("--freq-hz", type=float, required=True)
    p.set_defaults(func=cmd_faraday)

    p = sub.add_parser("harmonics", help="clock harmonic frequencies")
    p.add_argument("--clock-ghz", type=float, required=True)
    p.add_argument("--count", type=int, default=3)
    p.set_defaults(func=cmd_harmonics)

    p = sub.add_parser("roundtrip", help="one in-memory TX -> channel -> RX pass")
    _add_payload_args(p)
    p.add_argument("--scheme", choices=[c.value for c in LineCode], default="manchester")
    p.add_argument("--bit-time-ms", type=float, default=10.0)
    _add_channel_args(p)
    p.set_defaults(func=cmd_roundtrip)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    except RamlinkError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
