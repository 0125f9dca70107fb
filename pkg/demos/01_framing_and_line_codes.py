#!/usr/bin/env python3
"""Walkthrough: payload framing, OOK vs Manchester line coding, and the
carrier activity schedule a frame turns into.

Run:  python demos/01_framing_and_line_codes.py [--plot]
"""

import argparse

from ramlink import (
    BitStream,
    LineCode,
    SymbolTiming,
    build_frame,
    manchester_encode,
    schedule_from_symbols,
    synthesize_envelope,
)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--plot", action="store_true", help="save waveforms to PNG")
    args = parser.parse_args()

    # The canonical demo word. Bytes map to bits MSB-first.
    payload = BitStream.from_hex("44415441")  # "DATA"
    print(f"payload (hex 44415441): {payload.to_text()}")

    frame = build_frame(payload)
    wire = frame.serialize()
    print(f"\nframe: preamble {frame.preamble.to_text()}, length {frame.length_field}, "
          f"crc 0x{frame.crc:04X}")
    print(f"on-air bits ({wire.length}): {wire.to_text()}")
    print("note the 10101010 preamble up front: that's what the receiver locks onto")

    # Direct OOK: each bit is one carrier-on/off symbol.
    # Manchester: each bit becomes two half-bits with a mid-bit transition,
    # doubling the symbol count but guaranteeing a transition per bit.
    manchester = manchester_encode(wire)
    print(f"\nOOK symbols:        {wire.length}")
    print(f"Manchester symbols: {manchester.length} (exactly 2x)")

    timing = SymbolTiming(bit_time_ms=10.0, sample_rate=1600.0)
    ook_sched = schedule_from_symbols(wire, timing, LineCode.OOK_DIRECT)
    man_sched = schedule_from_symbols(manchester, timing, LineCode.MANCHESTER)
    print(f"\nat t = 10 ms/bit the OOK schedule has {len(ook_sched)} carrier intervals "
          f"over {ook_sched.total_us/1000:.0f} ms")
    print(f"the Manchester schedule has {len(man_sched)} intervals over "
          f"{man_sched.total_us/1000:.0f} ms (same duration, more switching)")
    print("\nfirst few OOK intervals (state, us):", ook_sched.intervals[:6])
    print("first few Manchester intervals:      ", man_sched.intervals[:6])

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, axes = plt.subplots(2, 1, figsize=(12, 5), sharex=True)
        for ax, sched, title in [
            (axes[0], man_sched, "Manchester"),
            (axes[1], ook_sched, "OOK"),
        ]:
            sig = synthesize_envelope(sched, timing, 1.0)
            t = [i / timing.sample_rate for i in range(len(sig))]
            ax.plot(t, sig.samples, drawstyle="steps-post")
            ax.set_ylabel(title)
            ax.set_ylim(-0.1, 1.2)
        axes[1].set_xlabel("time (s)")
        fig.suptitle('envelope of the word "DATA" under both line codes')
        fig.savefig("framing_line_codes.png", dpi=120)
        print('\nsaved framing_line_codes.png')


if __name__ == "__main__":
    main()
