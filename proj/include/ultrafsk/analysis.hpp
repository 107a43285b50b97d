#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ultrafsk/channel.hpp"
#include "ultrafsk/modulator.hpp"
#include "ultrafsk/waveform.hpp"

namespace ultrafsk {

// Gaussian tail probability Q(x) = erfc(x / sqrt(2)) / 2.
double q_function(double x);

// Idealized BFSK error rate Q(sqrt(snr)); snr is a linear power ratio.
double ber_theoretical(double snr_linear);
// Companion converter: snr given in dB.
double ber_theoretical_db(double snr_db);

// 10*log10(P_signal_band / P_noise_band), band powers via Welch-averaged
// periodograms (Hamming, 50% overlap). Bands must not overlap. Capped at
// +100 dB when the noise band is numerically silent.
double snr_measure(const Waveform& w, std::pair<double, double> signal_band,
                   std::pair<double, double> noise_band);

// In-band SNR against the modem band: signal band [f0-250, f1+250], noise
// density estimated from the remainder of [band_low, band_high], then
// signal power (noise-corrected) over noise power across the full band.
// This matches the channel's noise calibration. Capped at +100 dB.
double snr_inband(const Waveform& w, const ModemConfig& modem);

struct Spectrogram {
    std::vector<std::vector<double>> magnitudes_db; // [frame][bin], floored at -120
    std::vector<double> time_axis_s;   // frame centers
    std::vector<double> freq_axis_hz;  // bin centers
    size_t fft_size = 0;
    size_t hop = 0;
};

inline constexpr double kSpectrogramFloorDb = -120.0;

Spectrogram spectrogram(const Waveform& w, size_t fft_size, size_t hop);

struct SweepRow {
    double band_low_hz = 0.0;
    double band_high_hz = 0.0;
    double distance_m = 0.0;
    double snr_db = 0.0;
};
using SweepReport = std::vector<SweepRow>;

// For each (band, distance): push a band-restricted sweep through the channel
// (alpha evaluated at the band midpoint) and measure the received SNR with
// the band as signal and the rest of the modem band as noise reference.
// Rows ordered band-major, then by distance.
SweepReport sweep_characterize(const ModemConfig& modem, const ChannelProfile& base,
                               const TransmitterSpec& tx,
                               const std::vector<std::pair<double, double>>& bands,
                               const std::vector<double>& distances,
                               double sweep_duration_s = 1.0);

struct PathLossFit {
    double snr_ref_db = 0.0; // intercept at 1 m
    double gamma = 0.0;      // slope against -10*log10(d)
    double residual_rms_db = 0.0;
};

// Least squares of snr_db against -10*log10(distance). Needs >= 2 points
// with at least two distinct distances (else DegenerateFitError).
PathLossFit fit_path_loss(const std::vector<std::pair<double, double>>& points);

struct Detection {
    double t_start_s = 0.0;
    double t_end_s = 0.0;
    double peak_hz = 0.0;
};

// Contiguous STFT frames whose in-band peak exceeds the recording-wide median
// in-band magnitude by threshold_db, merged into intervals.
std::vector<Detection> detect_ultrasonic(const Waveform& w,
                                         std::pair<double, double> band,
                                         double threshold_db,
                                         size_t fft_size = 2048, size_t hop = 512);

} // namespace ultrafsk
