#include "ultrafsk/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ultrafsk/dsp.hpp"
#include "ultrafsk/errors.hpp"
#include "ultrafsk/rng.hpp"

namespace ultrafsk {

namespace {
constexpr double kDbPerIntensityNeper = 4.342944819032518; // 10 * log10(e)
} // namespace

std::string to_string(Occlusion o) {
    switch (o) {
        case Occlusion::LineOfSight: return "line-of-sight";
        case Occlusion::Partial: return "partial";
        case Occlusion::Complete: return "complete";
    }
    return "line-of-sight";
}

Occlusion occlusion_from_string(const std::string& name) {
    if (name == "line-of-sight" || name == "los")
        return Occlusion::LineOfSight;
    if (name == "partial")
        return Occlusion::Partial;
    if (name == "complete")
        return Occlusion::Complete;
    throw ConfigError("unknown occlusion tier '" + name +
                      "' (expected line-of-sight, partial, or complete)");
}

double occlusion_penalty_db(Occlusion o) {
    switch (o) {
        case Occlusion::LineOfSight: return 0.0;
        case Occlusion::Partial: return 10.0;
        case Occlusion::Complete: return 30.0;
    }
    return 0.0;
}

double OrientationGainTable::lookup(double theta_deg) const {
    double t = std::fmod(theta_deg, 360.0);
    if (t < 0.0)
        t += 360.0;
    size_t i0 = static_cast<size_t>(t / 45.0) % 8;
    size_t i1 = (i0 + 1) % 8;
    double frac = (t - 45.0 * static_cast<double>(i0)) / 45.0;
    return (1.0 - frac) * gains_db[i0] + frac * gains_db[i1];
}

double orientation_gain(const OrientationGainTable& table, double theta_deg) {
    return table.lookup(theta_deg);
}

double AttenuationCurve::at(double hz) const {
    if (points.empty())
        return 0.0;
    if (hz <= points.front().first)
        return points.front().second;
    if (hz >= points.back().first)
        return points.back().second;
    for (size_t i = 1; i < points.size(); ++i) {
        if (hz <= points[i].first) {
            double x0 = points[i - 1].first, y0 = points[i - 1].second;
            double x1 = points[i].first, y1 = points[i].second;
            double frac = (x1 > x0) ? (hz - x0) / (x1 - x0) : 0.0;
            return y0 + frac * (y1 - y0);
        }
    }
    return points.back().second;
}

AttenuationCurve AttenuationCurve::constant(double db_per_m) {
    AttenuationCurve c;
    c.points = {{0.0, db_per_m}};
    return c;
}

double attenuate_linear(double a0, double alpha_db_per_cm, double thickness_cm) {
    if (a0 < 0.0 || alpha_db_per_cm < 0.0 || thickness_cm < 0.0)
        throw DomainError("attenuate_linear: inputs must be non-negative");
    double alpha_np = alpha_db_per_cm / kDbPerIntensityNeper;
    return a0 * std::exp(-alpha_np * thickness_cm);
}

double attenuate_db(double a0_db, double alpha_db_per_m, double distance_m, Occlusion o) {
    if (distance_m < 0.0)
        throw DomainError("attenuate_db: distance must be non-negative");
    return a0_db - alpha_db_per_m * distance_m - occlusion_penalty_db(o);
}

double snr_at_distance(double snr_ref_db, double gamma, double distance_m) {
    if (!(distance_m > 0.0))
        throw DomainError("snr_at_distance: distance must be positive");
    if (!(gamma > 0.0))
        throw DomainError("snr_at_distance: gamma must be positive");
    return snr_ref_db - 10.0 * gamma * std::log10(distance_m);
}

namespace {

void validate_profile(const Waveform& w, const ChannelProfile& p) {
    if (!(w.sample_rate > 0.0))
        throw ConfigError("apply_channel: waveform sample rate must be positive");
    if (!(p.distance_m > 0.0))
        throw ConfigError("apply_channel: distance must be positive");
    if (!(p.path_loss_exponent > 0.0))
        throw ConfigError("apply_channel: path_loss_exponent must be positive");
    double nyquist = w.sample_rate / 2.0;
    if (!(p.noise_ref_low_hz >= 0.0 && p.noise_ref_low_hz < p.noise_ref_high_hz &&
          p.noise_ref_high_hz <= nyquist))
        throw ConfigError("apply_channel: noise reference band violates Nyquist");
    for (const NoiseSource& s : p.noise) {
        if (s.kind == NoiseSource::Kind::BandLimited &&
            !(s.band_low >= 0.0 && s.band_low < s.band_high && s.band_high <= nyquist))
            throw ConfigError("apply_channel: band-limited noise band violates Nyquist");
    }
    for (const auto& pt : p.attenuation.points)
        if (pt.second < 0.0)
            throw ConfigError("apply_channel: attenuation coefficient must be non-negative");
}

// Brick-wall restriction of a buffer to [lo, hi) via FFT masking.
std::vector<double> band_restrict(const std::vector<double>& x, double fs,
                                  double lo, double hi) {
    size_t n = x.size();
    size_t nfft = dsp::next_pow2(n);
    std::vector<dsp::cplx> spec = dsp::fft_real(x.data(), n, nfft);
    double bin = fs / static_cast<double>(nfft);
    for (size_t k = 0; k <= nfft / 2; ++k) {
        double f = static_cast<double>(k) * bin;
        bool keep = (f >= lo && f < hi);
        if (!keep) {
            spec[k] = dsp::cplx(0.0, 0.0);
            if (k != 0 && k != nfft / 2)
                spec[nfft - k] = dsp::cplx(0.0, 0.0);
        }
    }
    dsp::fft(spec, true);
    std::vector<double> y(n);
    for (size_t i = 0; i < n; ++i)
        y[i] = spec[i].real();
    return y;
}

} // namespace

ChannelResult apply_channel(const Waveform& w, const ChannelProfile& profile,
                            const TransmitterSpec& tx) {
    validate_profile(w, profile);

    ChannelResult result;
    result.output.sample_rate = w.sample_rate;

    // Doppler first (deterministic linear effects before stochastic ones).
    std::vector<double> x = dsp::frequency_shift(w.samples, profile.doppler_offset_hz,
                                                 w.sample_rate);

    // Occlusion penalty: fixed tiers, or sampled from the published ranges.
    double penalty = occlusion_penalty_db(profile.occlusion);
    if (profile.sample_occlusion) {
        Rng rng(derive_seed(profile.seed, 0xA11ACEDu));
        switch (profile.occlusion) {
            case Occlusion::LineOfSight:
                penalty = profile.los_baseline_loss ? rng.uniform(2.0, 5.0) : 0.0;
                break;
            case Occlusion::Partial:
                penalty = rng.uniform(10.0, 15.0);
                break;
            case Occlusion::Complete:
                penalty = rng.uniform(25.0, 30.0);
                break;
        }
    }
    result.occlusion_penalty_db = penalty;

    double gain_db = -10.0 * profile.path_loss_exponent * std::log10(profile.distance_m) +
                     profile.orientation_table.lookup(profile.orientation_deg) -
                     profile.attenuation.at(profile.alpha_ref_hz) * profile.distance_m -
                     penalty;
    result.gain_db = gain_db;
    result.received_level_db = tx.power_db + gain_db;

    double scale = std::pow(10.0, gain_db / 20.0);
    for (double& v : x)
        v *= scale;

    // Noise levels reference the transmitted waveform's in-band power, so the
    // received in-band SNR is gain_db - level_db by construction.
    double p_ref = 0.0;
    if (!profile.noise.empty()) {
        p_ref = dsp::fft_band_power(w.samples, w.sample_rate, profile.noise_ref_low_hz,
                                    profile.noise_ref_high_hz);
        if (p_ref <= 0.0)
            p_ref = 1.0; // silent input: fall back to full-scale reference
    }

    for (size_t si = 0; si < profile.noise.size(); ++si) {
        const NoiseSource& src = profile.noise[si];
        if (std::isinf(src.level_db) && src.level_db < 0.0)
            continue; // disabled source
        Rng rng(derive_seed(profile.seed, 1000 + si));
        std::vector<double> noise(x.size());
        for (double& v : noise)
            v = rng.gaussian();
        double measured;
        if (src.kind == NoiseSource::Kind::BandLimited) {
            noise = band_restrict(noise, w.sample_rate, src.band_low, src.band_high);
            measured = dsp::fft_band_power(noise, w.sample_rate, src.band_low, src.band_high);
        } else {
            measured = dsp::fft_band_power(noise, w.sample_rate, profile.noise_ref_low_hz,
                                           profile.noise_ref_high_hz);
        }
        if (measured <= 0.0)
            continue;
        double target = p_ref * std::pow(10.0, src.level_db / 10.0);
        double nscale = std::sqrt(target / measured);
        for (size_t i = 0; i < x.size(); ++i)
            x[i] += nscale * noise[i];
    }

    size_t clipped = 0;
    for (double& v : x) {
        if (v > 1.0) {
            v = 1.0;
            ++clipped;
        } else if (v < -1.0) {
            v = -1.0;
            ++clipped;
        }
    }
    result.clipped_samples = clipped;
    result.output.samples = std::move(x);
    return result;
}

Waveform keyboard_noise(double duration_s, double sample_rate, double level_db, uint64_t seed) {
    if (!(duration_s > 0.0))
        throw ConfigError("keyboard_noise: duration must be positive");
    if (!(sample_rate > 14000.0))
        throw ConfigError("keyboard_noise: sample rate too low for the 7 kHz click band");

    size_t n = static_cast<size_t>(std::llround(duration_s * sample_rate));
    Waveform w;
    w.sample_rate = sample_rate;
    w.samples.assign(n, 0.0);
    if (std::isinf(level_db) && level_db < 0.0)
        return w; // disabled

    Rng rng(derive_seed(seed, 0xC11C5u));

    // Poisson click train: exponential inter-arrivals (~6 clicks/s), each a
    // short burst of gaussian noise under an exponential-decay envelope.
    double t = rng.exponential(1.0 / 6.0);
    bool any = false;
    while (t < duration_s) {
        any = true;
        double click_dur = rng.uniform(0.003, 0.012);
        double amp = rng.uniform(0.5, 1.0);
        size_t start = static_cast<size_t>(t * sample_rate);
        size_t len = static_cast<size_t>(click_dur * sample_rate);
        double tau = static_cast<double>(len) / 4.0;
        for (size_t i = 0; i < len && start + i < n; ++i) {
            double env = std::exp(-static_cast<double>(i) / tau);
            w.samples[start + i] += amp * env * rng.gaussian();
        }
        t += rng.exponential(1.0 / 6.0);
    }
    if (!any) {
        // Very short request: place one click in the middle so the RMS target
        // stays meaningful.
        size_t start = n / 2;
        size_t len = std::min<size_t>(n - start, static_cast<size_t>(0.005 * sample_rate));
        double tau = static_cast<double>(std::max<size_t>(len, 1)) / 4.0;
        for (size_t i = 0; i < len; ++i)
            w.samples[start + i] += std::exp(-static_cast<double>(i) / tau) * rng.gaussian();
    }

    // Keep the clicks strictly sub-ultrasonic: zero-phase lowpass at 7 kHz.
    auto sos = dsp::butterworth_lowpass(8, 7000.0, sample_rate);
    w.samples = dsp::filtfilt(sos, w.samples);

    double rms = std::sqrt(dsp::mean_square(w.samples));
    if (rms > 0.0) {
        double target = std::pow(10.0, level_db / 20.0);
        double s = target / rms;
        for (double& v : w.samples)
            v *= s;
    }
    return w;
}

} // namespace ultrafsk
