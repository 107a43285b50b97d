#include "ultrafsk/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "ultrafsk/dsp.hpp"
#include "ultrafsk/errors.hpp"
#include "ultrafsk/rng.hpp"

namespace ultrafsk {

namespace {
constexpr double kSnrCapDb = 100.0;

size_t pick_nfft(size_t n) {
    // Large enough for fine band edges, small enough for short recordings.
    return std::min<size_t>(4096, dsp::prev_pow2(std::max<size_t>(n, 64)));
}
} // namespace

double q_function(double x) {
    if (!std::isfinite(x))
        throw DomainError("q_function: x must be finite");
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

double ber_theoretical(double snr_linear) {
    if (!(snr_linear >= 0.0))
        throw DomainError("ber_theoretical: SNR must be non-negative");
    return q_function(std::sqrt(snr_linear));
}

double ber_theoretical_db(double snr_db) {
    return ber_theoretical(std::pow(10.0, snr_db / 10.0));
}

double snr_measure(const Waveform& w, std::pair<double, double> signal_band,
                   std::pair<double, double> noise_band) {
    double nyquist = w.sample_rate / 2.0;
    auto check_band = [nyquist](std::pair<double, double> b, const char* name) {
        if (!(b.first >= 0.0 && b.first < b.second && b.second <= nyquist))
            throw ConfigError(std::string("snr_measure: ") + name + " band violates Nyquist");
    };
    check_band(signal_band, "signal");
    check_band(noise_band, "noise");
    bool disjoint = signal_band.second <= noise_band.first ||
                    noise_band.second <= signal_band.first;
    if (!disjoint)
        throw ConfigError("snr_measure: signal and noise bands overlap");

    dsp::Psd psd = dsp::welch_psd(w, pick_nfft(w.size()));
    double p_sig = dsp::band_power(psd, signal_band.first, signal_band.second);
    double p_noise = dsp::band_power(psd, noise_band.first, noise_band.second);
    if (p_noise <= 0.0 || p_sig / p_noise > 1e10)
        return kSnrCapDb;
    return 10.0 * std::log10(p_sig / p_noise);
}

double snr_inband(const Waveform& w, const ModemConfig& modem) {
    modem.validate();
    double sig_lo = modem.f0 - 250.0;
    double sig_hi = modem.f1 + 250.0;
    sig_lo = std::max(sig_lo, modem.band_low);
    sig_hi = std::min(sig_hi, modem.band_high);

    dsp::Psd psd = dsp::welch_psd(w, pick_nfft(w.size()));
    double p_sig_band = dsp::band_power(psd, sig_lo, sig_hi);

    // Noise density: median PSD bin over the remainder of the working band.
    // The median is robust to modulation sidelobes that leak past the guard
    // bands; a mean would count that splatter as noise and read several dB
    // low on a keyed carrier.
    std::vector<double> rest_bins;
    double rest_width = 0.0;
    auto collect = [&](double lo, double hi) {
        size_t k0 = static_cast<size_t>(std::ceil(lo / psd.bin_hz));
        size_t k1 = std::min(psd.pxx.size(),
                             static_cast<size_t>(std::ceil(hi / psd.bin_hz)));
        for (size_t k = k0; k < k1; ++k)
            rest_bins.push_back(psd.pxx[k]);
    };
    if (sig_lo > modem.band_low) {
        collect(modem.band_low, sig_lo);
        rest_width += sig_lo - modem.band_low;
    }
    if (sig_hi < modem.band_high) {
        collect(sig_hi, modem.band_high);
        rest_width += modem.band_high - sig_hi;
    }
    if (rest_width <= 0.0 || rest_bins.empty())
        throw ConfigError("snr_inband: signal band covers the whole working band");

    std::nth_element(rest_bins.begin(), rest_bins.begin() + static_cast<long>(rest_bins.size() / 2),
                     rest_bins.end());
    double density = rest_bins[rest_bins.size() / 2];
    double band_width = modem.band_high - modem.band_low;
    double p_noise = density * band_width;
    double p_signal = p_sig_band - density * (sig_hi - sig_lo);
    if (p_signal < 0.0)
        p_signal = 0.0;
    if (p_signal <= 0.0)
        return -kSnrCapDb; // nothing in the signal band, even if noise is absent too
    if (p_noise <= 0.0 || p_signal / p_noise > 1e10)
        return kSnrCapDb;
    return 10.0 * std::log10(p_signal / p_noise);
}

Spectrogram spectrogram(const Waveform& w, size_t fft_size, size_t hop) {
    dsp::Stft s = dsp::stft(w, fft_size, hop); // validates sizes, TooShort

    Spectrogram sg;
    sg.fft_size = fft_size;
    sg.hop = hop;
    sg.freq_axis_hz.resize(s.num_bins());
    for (size_t k = 0; k < s.num_bins(); ++k)
        sg.freq_axis_hz[k] = static_cast<double>(k) * s.bin_hz();
    sg.time_axis_s.resize(s.num_frames());
    sg.magnitudes_db.resize(s.num_frames());
    for (size_t f = 0; f < s.num_frames(); ++f) {
        sg.time_axis_s[f] = s.frame_center_s(f);
        auto& row = sg.magnitudes_db[f];
        row.resize(s.num_bins());
        for (size_t k = 0; k < s.num_bins(); ++k) {
            double db = 20.0 * std::log10(std::abs(s.frames[f][k]) + 1e-300);
            row[k] = std::max(db, kSpectrogramFloorDb);
        }
    }
    return sg;
}

SweepReport sweep_characterize(const ModemConfig& modem, const ChannelProfile& base,
                               const TransmitterSpec& tx,
                               const std::vector<std::pair<double, double>>& bands,
                               const std::vector<double>& distances,
                               double sweep_duration_s) {
    if (bands.empty() || distances.empty())
        throw ConfigError("sweep_characterize: bands and distances must be non-empty");
    double prev_hi = modem.band_low;
    for (const auto& b : bands) {
        if (!(b.first >= modem.band_low && b.first < b.second && b.second <= modem.band_high))
            throw ConfigError("sweep_characterize: bands must lie within the modem band");
        if (b.first < prev_hi)
            throw ConfigError("sweep_characterize: bands must be ascending and non-overlapping");
        prev_hi = b.second;
    }

    SweepReport report;
    report.reserve(bands.size() * distances.size());
    size_t row_index = 0;
    for (const auto& band : bands) {
        Waveform tone = sweep(modem, band.first, band.second, sweep_duration_s);
        for (double d : distances) {
            ChannelProfile p = base;
            p.distance_m = d;
            p.alpha_ref_hz = 0.5 * (band.first + band.second);
            p.seed = derive_seed(base.seed, row_index);
            ChannelResult res = apply_channel(tone, p, tx);

            // Signal = the swept band; noise density from the rest of the
            // modem band, scaled to the band width for a like-for-like SNR.
            dsp::Psd psd = dsp::welch_psd(res.output, pick_nfft(res.output.size()));
            double p_sig = dsp::band_power(psd, band.first, band.second);
            double rest_power = 0.0, rest_width = 0.0;
            if (band.first > modem.band_low) {
                rest_power += dsp::band_power(psd, modem.band_low, band.first);
                rest_width += band.first - modem.band_low;
            }
            if (band.second < modem.band_high) {
                rest_power += dsp::band_power(psd, band.second, modem.band_high);
                rest_width += modem.band_high - band.second;
            }
            double snr_db;
            double width = band.second - band.first;
            double density = rest_width > 0.0 ? rest_power / rest_width : 0.0;
            double p_noise = density * width;
            double p_signal = std::max(p_sig - density * width, 0.0);
            if (p_noise <= 0.0 || (p_signal > 0.0 && p_signal / p_noise > 1e10))
                snr_db = kSnrCapDb;
            else if (p_signal <= 0.0)
                snr_db = -kSnrCapDb;
            else
                snr_db = 10.0 * std::log10(p_signal / p_noise);

            report.push_back({band.first, band.second, d, snr_db});
            ++row_index;
        }
    }
    return report;
}

PathLossFit fit_path_loss(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2)
        throw DegenerateFitError("fit_path_loss: need at least two points");
    for (const auto& pt : points)
        if (!(pt.first > 0.0))
            throw DomainError("fit_path_loss: distances must be positive");
    double first = points.front().first;
    bool distinct = false;
    for (const auto& pt : points)
        if (pt.first != first)
            distinct = true;
    if (!distinct)
        throw DegenerateFitError("fit_path_loss: all distances equal");

    // Least squares of y = snr_ref + gamma * u with u = -10*log10(d).
    double su = 0.0, sy = 0.0, suu = 0.0, suy = 0.0;
    double n = static_cast<double>(points.size());
    for (const auto& pt : points) {
        double u = -10.0 * std::log10(pt.first);
        su += u;
        sy += pt.second;
        suu += u * u;
        suy += u * pt.second;
    }
    double denom = n * suu - su * su;
    PathLossFit fit;
    fit.gamma = (n * suy - su * sy) / denom;
    fit.snr_ref_db = (sy - fit.gamma * su) / n;

    double ss = 0.0;
    for (const auto& pt : points) {
        double model = fit.snr_ref_db - 10.0 * fit.gamma * std::log10(pt.first);
        ss += (pt.second - model) * (pt.second - model);
    }
    fit.residual_rms_db = std::sqrt(ss / n);
    return fit;
}

std::vector<Detection> detect_ultrasonic(const Waveform& w,
                                         std::pair<double, double> band,
                                         double threshold_db,
                                         size_t fft_size, size_t hop) {
    if (!(band.first >= 0.0 && band.first < band.second &&
          band.second <= w.sample_rate / 2.0))
        throw ConfigError("detect_ultrasonic: band violates Nyquist");

    // Front-end bandpass, like a hardware monitor's input filter. Without it
    // a strong out-of-band transient (a keyboard click, say) leaks across the
    // whole frame through the analysis window's sidelobes and reads as
    // in-band activity even when the true in-band energy is nil.
    Waveform work = w;
    if (band.first > 0.0) {
        auto sos = dsp::butterworth_bandpass(4, band.first, band.second, w.sample_rate);
        work.samples = dsp::filtfilt(sos, w.samples);
    } else if (band.second < w.sample_rate / 2.0) {
        auto sos = dsp::butterworth_lowpass(4, band.second, w.sample_rate);
        work.samples = dsp::filtfilt(sos, w.samples);
    }

    dsp::Stft s = dsp::stft(work, fft_size, hop);
    double bin_hz = s.bin_hz();
    size_t k_lo = static_cast<size_t>(std::ceil(band.first / bin_hz));
    size_t k_hi = std::min(static_cast<size_t>(std::floor(band.second / bin_hz)),
                           s.num_bins() - 1);
    if (k_lo > k_hi)
        throw ConfigError("detect_ultrasonic: no FFT bins inside the band");

    // Recording-wide median of in-band magnitudes (dB, floored) as the floor.
    std::vector<double> all;
    all.reserve(s.num_frames() * (k_hi - k_lo + 1));
    std::vector<double> peak_db(s.num_frames());
    std::vector<double> peak_hz(s.num_frames());
    for (size_t f = 0; f < s.num_frames(); ++f) {
        double best = -1e300;
        size_t best_k = k_lo;
        for (size_t k = k_lo; k <= k_hi; ++k) {
            double db = 20.0 * std::log10(std::abs(s.frames[f][k]) + 1e-300);
            db = std::max(db, kSpectrogramFloorDb);
            all.push_back(db);
            if (db > best) {
                best = db;
                best_k = k;
            }
        }
        peak_db[f] = best;
        peak_hz[f] = static_cast<double>(best_k) * bin_hz;
    }
    std::nth_element(all.begin(), all.begin() + static_cast<long>(all.size() / 2), all.end());
    double median_db = all[all.size() / 2];

    std::vector<Detection> hits;
    size_t f = 0;
    while (f < s.num_frames()) {
        if (peak_db[f] > median_db + threshold_db) {
            size_t start = f;
            double best = peak_db[f];
            double best_hz = peak_hz[f];
            while (f < s.num_frames() && peak_db[f] > median_db + threshold_db) {
                if (peak_db[f] > best) {
                    best = peak_db[f];
                    best_hz = peak_hz[f];
                }
                ++f;
            }
            // Endpoints: for runs longer than one window, report the span the
            // activity provably covers (first window's end to last window's
            // start) — accurate to one hop. Short runs fall back to the
            // windows' full extent.
            double s0 = static_cast<double>(start) * hop;
            double s1 = static_cast<double>(f - 1) * hop;
            Detection d;
            if (s1 >= s0 + static_cast<double>(fft_size)) {
                d.t_start_s = (s0 + static_cast<double>(fft_size)) / w.sample_rate;
                d.t_end_s = s1 / w.sample_rate;
            } else {
                d.t_start_s = s0 / w.sample_rate;
                d.t_end_s = (s1 + static_cast<double>(fft_size)) / w.sample_rate;
            }
            d.peak_hz = best_hz;
            hits.push_back(d);
        } else {
            ++f;
        }
    }
    return hits;
}

} // namespace ultrafsk
