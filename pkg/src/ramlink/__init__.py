"""Desk-scale signal chain for RAM-bus covert links.

The toolkit covers the full path from payload bits to recovered payload
bits: framing with preamble/length/CRC, OOK and Manchester line coding,
carrier activity schedules and baseband envelope synthesis, a calibrated
noisy channel with distance-derived SNR, an envelope demodulator, and an
evaluation harness for BER sweeps and exfiltration-time arithmetic.
"""

from .channel import (
    NOISE_DISABLED,
    SNR_ANCHORS_CM_DB,
    ChannelModel,
    FaradayAttenuation,
    JammerConfig,
    ShieldSpec,
    apply_awgn,
    apply_channel,
    apply_jammer,
    clock_harmonics,
    distance_to_snr,
    faraday_attenuation,
)
from .demod import (
    DecodedFrame,
    DecodeResult,
    DemodConfig,
    FrameStats,
    demodulate,
    find_preamble,
    slice_symbols,
    smooth,
    threshold,
)
from .errors import (
    CalibrationError,
    CapabilityError,
    CodeViolationError,
    ConfigError,
    DomainError,
    EstimationError,
    FrameIntegrityError,
    FrameSizeError,
    FrameSyncError,
    NoSignalError,
    RamlinkError,
    SyncNotFoundError,
    TruncationError,
)
from .frames import (
    FRAME_OVERHEAD_BITS,
    PREAMBLE,
    BitStream,
    Frame,
    LineCode,
    build_frame,
    crc16,
    manchester_decode,
    manchester_decode_lenient,
    manchester_encode,
    ook_map,
    parse_frame,
)
from .harness import (
    PUBLISHED_EXFIL_SECONDS,
    STANDARD_EXFIL_ITEMS,
    BerReport,
    CellResult,
    ExfilItem,
    ExfilTime,
    SimParams,
    SweepSpec,
    TrialOutcome,
    emit_tables,
    estimate_snr,
    exfil_table,
    exfil_time,
    highrate_probe,
    random_payload,
    run_sweep,
    run_trial,
    transmit,
)
from .waveform import (
    DEFAULT_SAMPLE_RATE,
    ActivitySchedule,
    CarrierState,
    EnvelopeSignal,
    SymbolTiming,
    TimingReport,
    concat_schedules,
    execute_schedule,
    read_envelope,
    read_iq,
    schedule_from_symbols,
    silence,
    supports_memory_stress,
    synthesize_envelope,
    write_envelope,
)

__version__ = "0.1.0"
