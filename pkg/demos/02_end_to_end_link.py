#!/usr/bin/env python3
"""Walkthrough: one complete link pass, transmitter to recovered payload.

Synthesizes the envelope for a framed payload, pushes it through the
calibrated noisy channel at a chosen receiver distance, and runs the
demodulator chain (smooth -> threshold -> preamble sync -> symbol
slicing -> line decode -> frame parse).

Run:  python demos/02_end_to_end_link.py [--distance-cm 300] [--bit-time-ms 1]
"""

import argparse

from ramlink import (
    BitStream,
    ChannelModel,
    LineCode,
    apply_channel,
    demodulate,
    distance_to_snr,
)
from ramlink.harness import SimParams, transmit


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--distance-cm", type=float, default=300.0)
    parser.add_argument("--bit-time-ms", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    payload = BitStream.from_hex("44415441")
    sim = SimParams()
    scheme = LineCode.MANCHESTER

    snr = distance_to_snr(args.distance_cm)
    print(f"receiver at {args.distance_cm:g} cm -> average SNR {snr:g} dB")

    clean = transmit(payload, args.bit_time_ms, scheme, sim)
    print(f"transmit: {len(clean)} samples at {clean.sample_rate:g} S/s "
          f"({clean.duration_s*1000:.1f} ms on air)")

    noisy = apply_channel(clean, ChannelModel(snr_db=snr, seed=args.seed))
    print(f"channel: additive noise calibrated to {snr:g} dB against the carrier-on level")

    cfg = sim.demod_config(args.bit_time_ms, scheme)
    result = demodulate(noisy, cfg)
    if not result.frames:
        print("receiver: no frame found (sync failed)")
        return

    for df in result.frames:
        payload_hex = df.frame.payload.to_hex()
        print(f"receiver: frame at sample {df.start_sample}, payload {payload_hex}, "
              f"crc_valid={df.crc_valid}")
        print(f"  levels: on {df.stats.on_level:.3f} / off {df.stats.off_level:.3f}, "
              f"estimated SNR {df.stats.est_snr_db:.1f} dB, "
              f"{df.stats.manchester_violations} code violations")
    ok = result.frames[0].frame.payload == payload
    print("payload recovered exactly" if ok else "payload corrupted")


if __name__ == "__main__":
    main()
