#pragma once

#include <cstddef>
#include <string>

#include "ultrafsk/bits.hpp"
#include "ultrafsk/waveform.hpp"

namespace ultrafsk {

// Shared transmitter/receiver parameters.
struct ModemConfig {
    double f0 = 18500.0;            // Hz, carries bit 0
    double f1 = 19500.0;            // Hz, carries bit 1
    double symbol_duration = 0.05;  // seconds per bit (Ts)
    double sample_rate = 48000.0;   // samples/second
    double band_low = 18000.0;      // Hz, working band lower edge
    double band_high = 22000.0;     // Hz, working band upper edge
    double amplitude = 0.8;         // linear full-scale fraction, [0, 1]; 0 = silence
    double ramp_duration = 0.0;     // optional raised-cosine edge per symbol, seconds

    // Whole samples per symbol; validates integrality.
    size_t samples_per_symbol() const;
    double midpoint_hz() const { return 0.5 * (f0 + f1); }

    // Throws ConfigError on any violated invariant:
    //   band_low < f0 < f1 < band_high < sample_rate/2, amplitude in [0,1],
    //   symbol_duration * sample_rate a positive whole number.
    void validate() const;
};

enum class TransmitterKind : uint8_t { ActiveSpeaker, PassiveSpeaker, Laptop };

struct TransmitterSpec {
    double power_db = 60.0; // emitted level A0/Pt, dB
    TransmitterKind kind = TransmitterKind::ActiveSpeaker;
};

std::string to_string(TransmitterKind kind);
TransmitterKind transmitter_kind_from_string(const std::string& name);

// Ts = 1/rate; throws ConfigError ("non-integral symbol") when
// sample_rate/rate is not a whole number of samples.
double bit_rate_to_symbol_duration(double bits_per_second, double sample_rate = 48000.0);

// Maximum range d = (power_tx / power_min)^(1/beta), linear powers.
double max_range(double power_tx, double power_min, double beta);

// Phase-continuous B-FSK: bit i becomes amplitude * sin(2 pi f_b t + phi_i)
// with f_b in {f0, f1}; the phase accumulator carries across symbol
// boundaries. Bits must be 0/1 (no erasures on the transmit side).
Waveform modulate(const BitVec& bits, const ModemConfig& cfg);

// Linear chirp from f_start to f_end over the duration; phase-continuous.
// Endpoints must lie within [band_low, band_high], f_start < f_end.
Waveform sweep(const ModemConfig& cfg, double f_start, double f_end, double duration_s);

} // namespace ultrafsk
