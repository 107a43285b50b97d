#include "ultrafsk/modulator.hpp"

#include <cmath>

#include "ultrafsk/errors.hpp"

namespace ultrafsk {

size_t ModemConfig::samples_per_symbol() const {
    double exact = symbol_duration * sample_rate;
    double rounded = std::round(exact);
    if (!(rounded >= 1.0) || std::abs(exact - rounded) > 1e-6)
        throw ConfigError("non-integral symbol: symbol_duration * sample_rate = " +
                          std::to_string(exact) + " must be a positive whole number");
    return static_cast<size_t>(rounded);
}

void ModemConfig::validate() const {
    if (!(sample_rate > 0.0))
        throw ConfigError("invalid config: sample_rate must be positive");
    if (!(band_low < f0 && f0 < f1 && f1 < band_high))
        throw ConfigError("invalid config: need band_low < f0 < f1 < band_high (carrier out of band)");
    if (!(band_high < sample_rate / 2.0))
        throw ConfigError("invalid config: band_high must be below the Nyquist frequency");
    if (!(amplitude >= 0.0 && amplitude <= 1.0))
        throw ConfigError("invalid config: amplitude must lie in [0, 1]");
    if (!(symbol_duration > 0.0))
        throw ConfigError("invalid config: symbol_duration must be positive");
    size_t sps = samples_per_symbol();
    if (ramp_duration < 0.0)
        throw ConfigError("invalid config: ramp_duration must be non-negative");
    if (ramp_duration > 0.0) {
        double ramp_samples = ramp_duration * sample_rate;
        if (ramp_samples > static_cast<double>(sps) / 2.0)
            throw ConfigError("invalid config: ramp_duration exceeds half a symbol");
    }
}

std::string to_string(TransmitterKind kind) {
    switch (kind) {
        case TransmitterKind::ActiveSpeaker: return "active-speaker";
        case TransmitterKind::PassiveSpeaker: return "passive-speaker";
        case TransmitterKind::Laptop: return "laptop";
    }
    return "active-speaker";
}

TransmitterKind transmitter_kind_from_string(const std::string& name) {
    if (name == "active-speaker")
        return TransmitterKind::ActiveSpeaker;
    if (name == "passive-speaker")
        return TransmitterKind::PassiveSpeaker;
    if (name == "laptop")
        return TransmitterKind::Laptop;
    throw ConfigError("unknown transmitter kind '" + name +
                      "' (expected active-speaker, passive-speaker, or laptop)");
}

double bit_rate_to_symbol_duration(double bits_per_second, double sample_rate) {
    if (!(bits_per_second > 0.0))
        throw ConfigError("bit rate must be positive");
    double sps = sample_rate / bits_per_second;
    if (std::abs(sps - std::round(sps)) > 1e-6 || std::round(sps) < 1.0)
        throw ConfigError("non-integral symbol: " + std::to_string(bits_per_second) +
                          " bps gives " + std::to_string(sps) + " samples per symbol");
    return 1.0 / bits_per_second;
}

double max_range(double power_tx, double power_min, double beta) {
    if (!(power_tx > 0.0) || !(power_min > 0.0) || !(beta > 0.0))
        throw DomainError("max_range: powers and exponent must be positive");
    return std::pow(power_tx / power_min, 1.0 / beta);
}

Waveform modulate(const BitVec& bits, const ModemConfig& cfg) {
    cfg.validate();
    size_t sps = cfg.samples_per_symbol();
    size_t ramp = static_cast<size_t>(std::round(cfg.ramp_duration * cfg.sample_rate));

    Waveform w;
    w.sample_rate = cfg.sample_rate;
    w.samples.reserve(bits.size() * sps);

    double phase = 0.0;
    const double two_pi = 2.0 * M_PI;
    for (uint8_t b : bits) {
        if (b > 1)
            throw DomainError("modulate: bits must be 0 or 1");
        double step = two_pi * (b ? cfg.f1 : cfg.f0) / cfg.sample_rate;
        for (size_t i = 0; i < sps; ++i) {
            double env = 1.0;
            if (ramp > 0) {
                if (i < ramp)
                    env = 0.5 * (1.0 - std::cos(M_PI * static_cast<double>(i) / ramp));
                else if (i >= sps - ramp)
                    env = 0.5 * (1.0 - std::cos(M_PI * static_cast<double>(sps - i) / ramp));
            }
            w.samples.push_back(cfg.amplitude * env * std::sin(phase));
            phase += step;
            if (phase >= two_pi)
                phase -= two_pi;
        }
    }
    return w;
}

Waveform sweep(const ModemConfig& cfg, double f_start, double f_end, double duration_s) {
    cfg.validate();
    if (!(f_start >= cfg.band_low && f_start < f_end && f_end <= cfg.band_high))
        throw ConfigError("sweep: endpoints must satisfy band_low <= f_start < f_end <= band_high");
    if (!(duration_s > 0.0))
        throw ConfigError("sweep: duration must be positive");

    size_t n = static_cast<size_t>(std::llround(duration_s * cfg.sample_rate));
    if (n == 0)
        throw ConfigError("sweep: duration shorter than one sample");

    Waveform w;
    w.sample_rate = cfg.sample_rate;
    w.samples.reserve(n);

    double phase = 0.0;
    const double two_pi = 2.0 * M_PI;
    double slope = (f_end - f_start) / duration_s; // Hz per second
    for (size_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / cfg.sample_rate;
        double f = f_start + slope * t;
        w.samples.push_back(cfg.amplitude * std::sin(phase));
        phase += two_pi * f / cfg.sample_rate;
        if (phase >= two_pi)
            phase -= two_pi;
    }
    return w;
}

} // namespace ultrafsk
