#include "ultrafsk/demodulator.hpp"

#include <algorithm>
#include <cmath>

#include "ultrafsk/analysis.hpp"
#include "ultrafsk/dsp.hpp"
#include "ultrafsk/errors.hpp"

namespace ultrafsk {

// ============================================================ ReceiverConfig

size_t ReceiverConfig::resolved_fft_size() const {
    if (fft_size != 0)
        return fft_size;
    return dsp::prev_pow2(modem.samples_per_symbol());
}

size_t ReceiverConfig::resolved_hop() const {
    if (hop != 0)
        return hop;
    return std::max<size_t>(1, resolved_fft_size() / 4);
}

double ReceiverConfig::frames_per_symbol() const {
    return static_cast<double>(modem.samples_per_symbol()) /
           static_cast<double>(resolved_hop());
}

void ReceiverConfig::validate() const {
    modem.validate();
    size_t fft = resolved_fft_size();
    size_t h = resolved_hop();
    if (!dsp::is_pow2(fft))
        throw ConfigError("invalid receiver config: fft_size must be a power of two");
    if (fft > modem.samples_per_symbol())
        throw ConfigError("invalid receiver config: fft_size must not exceed samples per symbol");
    if (h == 0 || h > fft)
        throw ConfigError("invalid receiver config: need 0 < hop <= fft_size");
    if (!(classify_tolerance_hz > 0.0) ||
        classify_tolerance_hz >= std::abs(modem.f1 - modem.f0) / 2.0)
        throw ConfigError("invalid receiver config: classify_tolerance_hz must lie in "
                          "(0, |f1 - f0| / 2) so decision regions stay disjoint");
    if (noise_estimate_duration < 0.0)
        throw ConfigError("invalid receiver config: noise_estimate_duration must be >= 0");
    if (!(kalman_process_var > 0.0) || !(kalman_measurement_var > 0.0))
        throw ConfigError("invalid receiver config: Kalman variances must be positive");
    if (filter_order < 1 || filter_order > 12)
        throw ConfigError("invalid receiver config: filter_order must be in [1, 12]");
    if (peak_floor_db < 0.0)
        throw ConfigError("invalid receiver config: peak_floor_db must be >= 0");
}

// ================================================================== pipeline

namespace {

Bit classify(double freq_hz, const ReceiverConfig& cfg) {
    double d0 = std::abs(freq_hz - cfg.modem.f0);
    double d1 = std::abs(freq_hz - cfg.modem.f1);
    if (std::min(d0, d1) > cfg.classify_tolerance_hz)
        return Bit::Erasure;
    return d0 <= d1 ? Bit::Zero : Bit::One;
}

} // namespace

Waveform bandpass(const Waveform& w, double low_hz, double high_hz, int order) {
    auto sos = dsp::butterworth_bandpass(order, low_hz, high_hz, w.sample_rate);
    Waveform out;
    out.sample_rate = w.sample_rate;
    out.samples = dsp::filtfilt(sos, w.samples);
    return out;
}

std::vector<double> noise_profile(const Waveform& w, double duration_s,
                                  size_t fft_size, size_t hop) {
    size_t n = std::min(w.size(), static_cast<size_t>(std::llround(duration_s * w.sample_rate)));
    if (n < fft_size)
        throw TooShortError("noise_profile: leading window shorter than one analysis frame");
    Waveform head;
    head.sample_rate = w.sample_rate;
    head.samples.assign(w.samples.begin(), w.samples.begin() + static_cast<long>(n));
    dsp::Stft s = dsp::stft(head, fft_size, hop);

    std::vector<double> mag(s.num_bins(), 0.0);
    for (const auto& frame : s.frames)
        for (size_t k = 0; k < mag.size(); ++k)
            mag[k] += std::abs(frame[k]);
    for (double& m : mag)
        m /= static_cast<double>(s.num_frames());
    return mag;
}

Waveform spectral_subtract(const Waveform& w, const std::vector<double>& noise,
                           size_t fft_size, size_t hop) {
    if (noise.size() != fft_size / 2 + 1)
        throw LengthMismatchError("spectral_subtract: noise profile must hold fft_size/2+1 bins");
    dsp::Stft s = dsp::stft(w, fft_size, hop);
    for (auto& frame : s.frames) {
        for (size_t k = 0; k < frame.size(); ++k) {
            double mag = std::abs(frame[k]) - noise[k];
            if (mag <= 0.0) {
                frame[k] = dsp::cplx(0.0, 0.0);
            } else {
                double old = std::abs(frame[k]);
                frame[k] *= mag / old; // keep the original phase
            }
        }
    }
    Waveform out;
    out.sample_rate = w.sample_rate;
    out.samples = dsp::istft(s, w.samples);
    return out;
}

SymbolStream stft_peaks(const Waveform& w, const ReceiverConfig& cfg) {
    cfg.validate();
    size_t fft = cfg.resolved_fft_size();
    size_t hop = cfg.resolved_hop();
    dsp::Stft s = dsp::stft(w, fft, hop);

    double bin_hz = s.bin_hz();
    size_t nbins = s.num_bins();
    // Peak search range: in-band bins, kept away from DC/Nyquist so the
    // 3-point interpolation always has neighbors.
    size_t k_lo = static_cast<size_t>(std::ceil(cfg.modem.band_low / bin_hz));
    size_t k_hi = static_cast<size_t>(std::floor(cfg.modem.band_high / bin_hz));
    k_lo = std::max<size_t>(k_lo, 1);
    k_hi = std::min<size_t>(k_hi, nbins - 2);
    if (k_lo > k_hi)
        throw ConfigError("stft_peaks: no FFT bins inside the working band");

    double floor_lin = std::pow(10.0, cfg.peak_floor_db / 20.0);

    SymbolStream out;
    out.decisions.reserve(s.num_frames());
    std::vector<double> inband(k_hi - k_lo + 1);
    for (const auto& frame : s.frames) {
        size_t peak_k = k_lo;
        double peak_mag = 0.0;
        for (size_t k = k_lo; k <= k_hi; ++k) {
            double m = std::abs(frame[k]);
            inband[k - k_lo] = m;
            if (m > peak_mag) {
                peak_mag = m;
                peak_k = k;
            }
        }
        std::nth_element(inband.begin(), inband.begin() + static_cast<long>(inband.size() / 2),
                         inband.end());
        double median = inband[inband.size() / 2];

        Decision d;
        d.magnitude = peak_mag;
        if (peak_mag > median * floor_lin && peak_mag > 0.0) {
            // Parabolic refinement on log magnitude.
            auto mag_db = [&](size_t k) { return 20.0 * std::log10(std::abs(frame[k]) + 1e-300); };
            double delta = dsp::parabolic_offset(mag_db(peak_k - 1), mag_db(peak_k),
                                                 mag_db(peak_k + 1));
            d.freq_hz = (static_cast<double>(peak_k) + delta) * bin_hz;
            d.bit = classify(d.freq_hz, cfg);
        } else {
            d.bit = Bit::Erasure;
            d.freq_hz = 0.0;
        }
        out.decisions.push_back(d);
    }
    return out;
}

SymbolStream kalman_smooth(const SymbolStream& stream, const ReceiverConfig& cfg) {
    const double q = cfg.kalman_process_var;
    const double r = cfg.kalman_measurement_var;
    // Innovations past the carrier midpoint cannot be tracking noise; they
    // are either genuine symbol transitions or outliers.
    const double gate = std::abs(cfg.modem.f1 - cfg.modem.f0) / 2.0;

    SymbolStream out = stream;
    const auto& in = stream.decisions;

    bool init = false;
    double xhat = 0.0, p = 0.0;
    for (size_t i = 0; i < in.size(); ++i) {
        if (in[i].bit == Bit::Erasure) {
            // No measurement: propagate the prior, decision stays an erasure.
            if (init)
                p += q;
            continue;
        }
        double z = in[i].freq_hz;
        if (!init) {
            xhat = z;
            p = r;
            init = true;
        } else {
            p += q;
            if (std::abs(z - xhat) <= gate) {
                double k = p / (p + r);
                xhat += k * (z - xhat);
                p *= (1.0 - k);
            } else {
                // Confirm a transition against the next measurement within
                // two frames (a symbol always spans at least two frames at
                // the default 75% overlap); an unconfirmed jump is an
                // outlier and the prior state stands.
                bool confirmed = false;
                for (size_t j = i + 1; j <= std::min(i + 2, in.size() - 1); ++j) {
                    if (in[j].bit != Bit::Erasure) {
                        confirmed = std::abs(in[j].freq_hz - z) <= gate;
                        break;
                    }
                }
                if (confirmed) {
                    xhat = z;
                    p = r;
                }
            }
        }
        out.decisions[i].freq_hz = xhat;
        out.decisions[i].bit = classify(xhat, cfg);
    }
    return out;
}

AlignResult align_symbols(const SymbolStream& stream, const ReceiverConfig& cfg) {
    double fps = cfg.frames_per_symbol();
    if (fps < 1.0)
        throw ConfigError("align_symbols: need at least one frame per symbol");
    size_t n = stream.size();
    size_t noffsets = static_cast<size_t>(std::ceil(fps));

    // Frames before a nonzero offset form a leading partial symbol instead of
    // being dropped: a transmission can begin at sample zero, where the
    // analysis-window centers land its first frames ahead of every
    // whole-symbol grid cell.
    auto cells_after = [fps](size_t total, size_t off) {
        return total > off ? static_cast<size_t>(std::ceil(
                                 static_cast<double>(total - off) / fps - 1e-9))
                           : 0;
    };
    auto symbol_of = [fps](size_t frame_idx, size_t offset, size_t base) {
        if (frame_idx < offset)
            return size_t{0};
        return static_cast<size_t>(static_cast<double>(frame_idx - offset) / fps) + base;
    };

    size_t best_offset = 0;
    long best_score = -1;
    std::vector<std::array<size_t, 2>> counts;
    for (size_t off = 0; off < noffsets && off < n; ++off) {
        size_t base = off > 0 ? 1 : 0;
        size_t nsym = base + cells_after(n, off);
        counts.assign(nsym, {0, 0});
        for (size_t i = 0; i < n; ++i) {
            const Decision& d = stream.decisions[i];
            if (d.bit == Bit::Erasure)
                continue;
            size_t s = symbol_of(i, off, base);
            if (s < nsym)
                ++counts[s][d.bit == Bit::One ? 1 : 0];
        }
        long score = 0;
        for (const auto& c : counts)
            score += static_cast<long>(std::max(c[0], c[1]));
        if (score > best_score) {
            best_score = score;
            best_offset = off;
        }
    }

    // Re-group at the winning offset, emitting one decision per symbol.
    AlignResult result;
    result.offset_frames = best_offset;
    size_t base = best_offset > 0 ? 1 : 0;
    size_t nsym = base + cells_after(n, best_offset);
    struct Acc {
        size_t votes[2] = {0, 0};
        double freq[2] = {0.0, 0.0};
        double mag[2] = {0.0, 0.0};
    };
    std::vector<Acc> acc(nsym);
    for (size_t i = 0; i < n; ++i) {
        const Decision& d = stream.decisions[i];
        if (d.bit == Bit::Erasure)
            continue;
        size_t s = symbol_of(i, best_offset, base);
        if (s >= nsym)
            continue;
        size_t side = d.bit == Bit::One ? 1 : 0;
        ++acc[s].votes[side];
        acc[s].freq[side] += d.freq_hz;
        acc[s].mag[side] += d.magnitude;
    }
    result.symbols.decisions.reserve(nsym);
    for (const Acc& a : acc) {
        Decision d;
        if (a.votes[0] == a.votes[1]) {
            d.bit = Bit::Erasure; // no votes, or an exact tie
        } else {
            size_t side = a.votes[1] > a.votes[0] ? 1 : 0;
            d.bit = side == 1 ? Bit::One : Bit::Zero;
            d.freq_hz = a.freq[side] / static_cast<double>(a.votes[side]);
            d.magnitude = a.mag[side] / static_cast<double>(a.votes[side]);
        }
        result.symbols.decisions.push_back(d);
    }
    return result;
}

std::optional<size_t> find_preamble(const SymbolStream& symbols, size_t from) {
    const auto& d = symbols.decisions;
    if (d.size() < kPreambleBits)
        return std::nullopt;
    for (size_t i = from; i + kPreambleBits <= d.size(); ++i) {
        bool match = true;
        for (size_t k = 0; k < kPreambleBits; ++k) {
            Bit want = kPreamble[k] ? Bit::One : Bit::Zero;
            if (d[i + k].bit != want) {
                match = false;
                break;
            }
        }
        if (match)
            return i;
    }
    return std::nullopt;
}

DecodeReport decode(const Waveform& w, const ReceiverConfig& cfg) {
    cfg.validate();
    if (std::abs(w.sample_rate - cfg.modem.sample_rate) > 1e-6)
        throw ConfigError("decode: waveform sample rate " + std::to_string(w.sample_rate) +
                          " does not match the configured " +
                          std::to_string(cfg.modem.sample_rate));
    size_t fft = cfg.resolved_fft_size();
    size_t hop = cfg.resolved_hop();
    if (w.size() < fft)
        throw TooShortError("decode: recording shorter than one analysis frame");

    Waveform filtered = bandpass(w, cfg.modem.band_low, cfg.modem.band_high, cfg.filter_order);

    // Spectral subtraction only when the recording can spare a leading
    // noise-estimation window.
    Waveform work = filtered;
    size_t noise_len = static_cast<size_t>(
        std::llround(cfg.noise_estimate_duration * w.sample_rate));
    if (cfg.noise_estimate_duration > 0.0 && noise_len >= fft && w.size() >= noise_len &&
        w.duration_s() >= cfg.noise_estimate_duration) {
        std::vector<double> noise = noise_profile(filtered, cfg.noise_estimate_duration, fft, hop);
        work = spectral_subtract(filtered, noise, fft, hop);
    }

    SymbolStream frames = stft_peaks(work, cfg);
    SymbolStream smoothed = kalman_smooth(frames, cfg);
    AlignResult aligned = align_symbols(smoothed, cfg);

    DecodeReport report;
    report.symbols = aligned.symbols;
    report.align_offset_frames = aligned.offset_frames;

    double fps = cfg.frames_per_symbol();
    const auto& symbols = aligned.symbols.decisions;
    size_t pos = 0;
    for (;;) {
        std::optional<size_t> hit = find_preamble(aligned.symbols, pos);
        if (!hit)
            break;
        size_t idx = *hit;
        if (idx + kFrameBits > symbols.size())
            break;

        bool has_erasure = false;
        BitVec bits;
        bits.reserve(kFrameBits);
        for (size_t k = 0; k < kFrameBits; ++k) {
            Bit b = symbols[idx + k].bit;
            if (b == Bit::Erasure) {
                has_erasure = true;
                break;
            }
            bits.push_back(b == Bit::One ? 1 : 0);
        }
        if (has_erasure) {
            report.errors.push_back({idx, FrameError::None, true});
            pos = idx + 1;
            continue;
        }
        FrameParse parsed = parse_frame(bits);
        if (parsed.ok()) {
            report.payloads.push_back(parsed.payload);
            if (report.sync_offset_samples < 0) {
                // Symbol `base` starts at frame offset_frames; symbol 0 may be
                // the leading partial cell, which starts at frame 0.
                double base = aligned.offset_frames > 0 ? 1.0 : 0.0;
                double start_frame = static_cast<double>(aligned.offset_frames) +
                                     (static_cast<double>(idx) - base) * fps;
                if (start_frame < 0.0)
                    start_frame = 0.0;
                report.sync_offset_samples =
                    static_cast<long>(std::llround(start_frame * static_cast<double>(hop)));
            }
            pos = idx + kFrameBits; // consume the full frame only on success
        } else {
            report.errors.push_back({idx, parsed.error, false});
            pos = idx + 1; // a junk hit must not swallow a real frame
        }
    }

    report.estimated_snr_db = snr_inband(w, cfg.modem);
    return report;
}

double ber(const BitVec& truth, const BitVec& decoded) {
    if (truth.size() != decoded.size())
        throw LengthMismatchError("ber: sequences differ in length (" +
                                  std::to_string(truth.size()) + " vs " +
                                  std::to_string(decoded.size()) + ")");
    if (truth.empty())
        return 0.0;
    size_t errors = 0;
    for (size_t i = 0; i < truth.size(); ++i)
        if (truth[i] != decoded[i])
            ++errors;
    return static_cast<double>(errors) / static_cast<double>(truth.size());
}

double message_ber(const std::vector<uint16_t>& truth, const std::vector<uint16_t>& decoded) {
    if (truth.empty())
        return 0.0;
    size_t errors = 0;
    for (size_t i = 0; i < truth.size(); ++i) {
        if (i < decoded.size()) {
            uint16_t diff = truth[i] ^ decoded[i];
            errors += static_cast<size_t>(__builtin_popcount(diff));
        } else {
            errors += kPayloadBits; // undecoded frames count all bits as errors
        }
    }
    return static_cast<double>(errors) / static_cast<double>(truth.size() * kPayloadBits);
}

} // namespace ultrafsk
