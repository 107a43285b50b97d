"""Ultrasonic B-FSK modem and acoustic channel simulator."""

from ._core import (  # noqa: F401
    AttenuationCurve,
    ChannelProfile,
    ChannelResult,
    DecodeReport,
    Detection,
    FrameParse,
    IntegrityFailure,
    ModemConfig,
    NoiseSource,
    Occlusion,
    ReceiverConfig,
    TransmitterKind,
    TransmitterSpec,
    Waveform,
    __version__,
    apply_channel,
    attenuate_db,
    ber_theoretical,
    ber_theoretical_db,
    bit_rate_to_symbol_duration,
    build_frame,
    bytes_from_payloads,
    crc8,
    decode,
    detect_ultrasonic,
    keyboard_noise,
    message_ber,
    modulate,
    parse_frame,
    payloads_from_bytes,
    q_function,
    snr_at_distance,
    snr_inband,
    snr_measure,
    sweep,
    wav_read,
    wav_write,
)
