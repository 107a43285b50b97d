#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ultrafsk/modulator.hpp"
#include "ultrafsk/waveform.hpp"

namespace ultrafsk {

enum class Occlusion : uint8_t { LineOfSight, Partial, Complete };

std::string to_string(Occlusion o);
Occlusion occlusion_from_string(const std::string& name);

// Fixed default penalties: line-of-sight 0 dB, partial 10 dB, complete 30 dB.
double occlusion_penalty_db(Occlusion o);

struct NoiseSource {
    enum class Kind : uint8_t { WhiteGaussian, BandLimited };
    Kind kind = Kind::WhiteGaussian;
    double band_low = 0.0;   // Hz, BandLimited only
    double band_high = 0.0;  // Hz, BandLimited only
    // Noise power relative to the transmitted waveform's in-band power, dB.
    // With total channel gain G dB the received in-band SNR is G - level_db.
    double level_db = -30.0;
};

// Relative gain vs receiver orientation, tabulated every 45 degrees starting
// at 0; lookup interpolates linearly and wraps at 360.
struct OrientationGainTable {
    std::array<double, 8> gains_db = {-18.0, -10.0, -4.0, -6.0, 0.0, 0.0, -12.0, -14.0};
    double lookup(double theta_deg) const;
};

double orientation_gain(const OrientationGainTable& table, double theta_deg);

// Frequency-dependent attenuation coefficient alpha(f) in dB/m: piecewise
// linear through (hz, db_per_m) points, clamped at the ends. Empty = lossless.
struct AttenuationCurve {
    std::vector<std::pair<double, double>> points; // ascending by hz
    double at(double hz) const;
    bool empty() const { return points.empty(); }
    static AttenuationCurve constant(double db_per_m);
};

struct ChannelProfile {
    double distance_m = 1.0;
    double path_loss_exponent = 2.0;  // beta/gamma in SNR(d) ∝ d^-gamma
    AttenuationCurve attenuation;     // alpha(f), dB/m
    double alpha_ref_hz = 19000.0;    // frequency where alpha is evaluated (carrier midpoint)
    Occlusion occlusion = Occlusion::LineOfSight;
    bool sample_occlusion = false;    // draw partial/complete penalty from [10,15]/[25,30] dB
    bool los_baseline_loss = false;   // when sampling, draw a [2,5] dB extra loss at LoS
    double orientation_deg = 180.0;   // default at the table maximum (0 dB)
    OrientationGainTable orientation_table;
    double doppler_offset_hz = 0.0;
    std::vector<NoiseSource> noise;
    uint64_t seed = 0;
    // Reference band for "in-band" noise levels (receiver working band).
    double noise_ref_low_hz = 18000.0;
    double noise_ref_high_hz = 22000.0;
};

struct ChannelResult {
    Waveform output;
    size_t clipped_samples = 0;
    double gain_db = 0.0;              // total applied gain (path + orientation + attenuation + occlusion)
    double occlusion_penalty_db = 0.0; // actual penalty used (sampled or fixed)
    double received_level_db = 0.0;    // tx.power_db + gain_db
};

// Material absorption, intensity form: a0 * e^(-alpha_np * d) with the
// coefficient converted from dB/cm to intensity nepers (divide by 10*log10 e
// = 4.3429), i.e. a0 * 10^(-alpha_db * d / 10). Matches the dB model below.
double attenuate_linear(double a0, double alpha_db_per_cm, double thickness_cm);

// Logarithmic model: a0_db - alpha*d - occlusion penalty (fixed tiers).
double attenuate_db(double a0_db, double alpha_db_per_m, double distance_m, Occlusion o);

// snr_ref_db - 10 * gamma * log10(d).
double snr_at_distance(double snr_ref_db, double gamma, double distance_m);

// Full channel: Doppler shift, then scalar gain
//   G = -10*gamma*log10(d) + orientation(theta) - alpha(ref)*d - occlusion,
// then seeded noise, then clipping to [-1, 1] with a clip count.
// Deterministic for fixed (w, profile, tx).
ChannelResult apply_channel(const Waveform& w, const ChannelProfile& profile,
                            const TransmitterSpec& tx);

// Impulsive typing noise: seeded click bursts, lowpass-filtered so >= 99% of
// the energy sits below 10 kHz; RMS scaled to level_db (dBFS). level_db of
// -infinity yields silence.
Waveform keyboard_noise(double duration_s, double sample_rate, double level_db, uint64_t seed);

} // namespace ultrafsk
