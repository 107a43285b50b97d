#include <doctest.h>

#include <cmath>
#include <vector>

#include "ultrafsk/analysis.hpp"
#include "ultrafsk/channel.hpp"
#include "ultrafsk/dsp.hpp"
#include "ultrafsk/errors.hpp"
#include "ultrafsk/frame.hpp"
#include "ultrafsk/modulator.hpp"

using namespace ultrafsk;

namespace {

Waveform tone(double freq, double amp, double duration_s, double fs = 48000.0) {
    Waveform w;
    w.sample_rate = fs;
    size_t n = static_cast<size_t>(std::llround(duration_s * fs));
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i)
        w.samples[i] = amp * std::sin(2.0 * M_PI * freq * static_cast<double>(i) / fs);
    return w;
}

ChannelProfile identity_profile() {
    ChannelProfile p;
    p.distance_m = 1.0;
    p.orientation_deg = 180.0; // table gain 0 dB
    return p;
}

double fft_peak_hz(const Waveform& w, size_t nfft) {
    auto spec = dsp::fft_real(w.samples.data(), w.size(), nfft);
    size_t best = 1;
    for (size_t k = 1; k <= nfft / 2; ++k)
        if (std::abs(spec[k]) > std::abs(spec[best]))
            best = k;
    return static_cast<double>(best) * w.sample_rate / static_cast<double>(nfft);
}

} // namespace

// ================================================================ attenuation

TEST_CASE("attenuate_linear follows the dB-consistent exponential") {
    CHECK(attenuate_linear(2.5, 0.3, 0.0) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(attenuate_linear(2.5, 0.0, 7.0) == doctest::Approx(2.5).epsilon(1e-12));
    // 0.5 dB/cm over 10 cm = 5 dB of intensity loss
    CHECK(attenuate_linear(1.0, 0.5, 10.0) ==
          doctest::Approx(std::pow(10.0, -0.5)).epsilon(1e-9));
    CHECK_THROWS_AS(attenuate_linear(-1.0, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(attenuate_linear(1.0, -0.5, 1.0), DomainError);
    CHECK_THROWS_AS(attenuate_linear(1.0, 0.5, -1.0), DomainError);
}

TEST_CASE("attenuate_db worked example: 60 dB source, 5 dB/m, 1.5 m") {
    CHECK(attenuate_db(60.0, 5.0, 1.5, Occlusion::LineOfSight) ==
          doctest::Approx(52.5).epsilon(1e-10));
    CHECK(attenuate_db(60.0, 5.0, 1.5, Occlusion::Partial) ==
          doctest::Approx(42.5).epsilon(1e-10));
    CHECK(attenuate_db(60.0, 5.0, 1.5, Occlusion::Complete) ==
          doctest::Approx(22.5).epsilon(1e-10));
}

TEST_CASE("linear and logarithmic attenuation agree for matched units") {
    // alpha 0.3 dB/cm over 25 cm == 30 dB/m over 0.25 m
    for (double a0_db : {0.0, 20.0, 60.0}) {
        double a0_lin = std::pow(10.0, a0_db / 10.0);
        double lin = attenuate_linear(a0_lin, 0.3, 25.0);
        double via_db = attenuate_db(a0_db, 30.0, 0.25, Occlusion::LineOfSight);
        CHECK(10.0 * std::log10(lin) == doctest::Approx(via_db).epsilon(1e-9));
    }
}

TEST_CASE("snr_at_distance closed form") {
    CHECK(snr_at_distance(30.0, 2.0, 1.0) == doctest::Approx(30.0).epsilon(1e-12));
    CHECK(snr_at_distance(30.0, 2.0, 2.0) ==
          doctest::Approx(30.0 - 20.0 * std::log10(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(snr_at_distance(30.0, 2.0, 0.0), DomainError);

    // regression fit over the reference SNR-vs-distance grid lands near the
    // 9 m measurement
    std::vector<std::pair<double, double>> table = {
        {1, 35.2}, {2, 32.1}, {3, 29.3}, {4, 26.5}, {5, 23.8},
        {6, 21.2}, {7, 18.7}, {8, 16.3}, {9, 14.0}};
    PathLossFit fit = fit_path_loss(table);
    CHECK(std::abs(snr_at_distance(fit.snr_ref_db, fit.gamma, 9.0) - 14.0) <= 3.0);
}

TEST_CASE("occlusion tiers and names") {
    CHECK(occlusion_penalty_db(Occlusion::LineOfSight) == 0.0);
    CHECK(occlusion_penalty_db(Occlusion::Partial) == 10.0);
    CHECK(occlusion_penalty_db(Occlusion::Complete) == 30.0);
    for (Occlusion o : {Occlusion::LineOfSight, Occlusion::Partial, Occlusion::Complete})
        CHECK(occlusion_from_string(to_string(o)) == o);
    CHECK_THROWS_AS(occlusion_from_string("foggy"), ConfigError);
}

// ================================================================ orientation

TEST_CASE("orientation gain interpolates the table periodically") {
    OrientationGainTable t;
    CHECK(orientation_gain(t, 0.0) == doctest::Approx(-18.0));
    CHECK(orientation_gain(t, 360.0) == doctest::Approx(-18.0));   // periodic
    CHECK(orientation_gain(t, -360.0) == doctest::Approx(-18.0));
    CHECK(orientation_gain(t, 22.5) == doctest::Approx(-14.0));    // midpoint 0/45
    CHECK(orientation_gain(t, 100.0) ==
          doctest::Approx(-4.0 + (100.0 - 90.0) / 45.0 * (-6.0 - -4.0)).epsilon(1e-12));
    CHECK(orientation_gain(t, 337.5) == doctest::Approx((-14.0 + -18.0) / 2.0)); // wraps 315->360

    // table minimum at 0 degrees, maximum inside [180, 225]
    double min_gain = 1e9, max_gain = -1e9;
    double argmax = 0.0;
    for (double th = 0.0; th < 360.0; th += 0.5) {
        double g = orientation_gain(t, th);
        min_gain = std::min(min_gain, g);
        if (g > max_gain) {
            max_gain = g;
            argmax = th;
        }
    }
    CHECK(orientation_gain(t, 0.0) == doctest::Approx(min_gain));
    CHECK(argmax >= 180.0);
    CHECK(argmax <= 225.0);
}

// =============================================================== apply_channel

TEST_CASE("identity channel returns the input unchanged") {
    Waveform w = modulate(build_frame(0x1234), ModemConfig{});
    ChannelResult res = apply_channel(w, identity_profile(), TransmitterSpec{});
    REQUIRE(res.output.size() == w.size());
    CHECK(res.clipped_samples == 0);
    CHECK(res.gain_db == doctest::Approx(0.0).epsilon(1e-12));
    for (size_t i = 0; i < w.size(); ++i)
        CHECK(std::abs(res.output.samples[i] - w.samples[i]) < 1e-9);
}

TEST_CASE("white noise at 30 dB in-band SNR measures within 1 dB") {
    // tone input: the estimator's guard bands see no modulation splatter, so
    // this isolates the channel's noise calibration itself
    Waveform w = tone(19500.0, 0.8, 1.5);
    ChannelProfile p = identity_profile();
    NoiseSource n;
    n.kind = NoiseSource::Kind::WhiteGaussian;
    n.level_db = -30.0;
    p.noise.push_back(n);
    p.seed = 2024;
    ChannelResult res = apply_channel(w, p, TransmitterSpec{});
    double snr = snr_inband(res.output, ModemConfig{});
    CHECK(snr == doctest::Approx(30.0).epsilon(0.034)); // +-1 dB
}

TEST_CASE("a keyed carrier reads within 2 dB of the injected SNR") {
    // keying sidelobes leak a little energy past the estimator's guard bands,
    // so a modulated input reads slightly low; it must stay within 2 dB
    Waveform w = modulate(build_frame(0xBEEF), ModemConfig{});
    ChannelProfile p = identity_profile();
    NoiseSource n;
    n.kind = NoiseSource::Kind::WhiteGaussian;
    n.level_db = -30.0;
    p.noise.push_back(n);
    p.seed = 2024;
    ChannelResult res = apply_channel(w, p, TransmitterSpec{});
    double snr = snr_inband(res.output, ModemConfig{});
    CHECK(snr == doctest::Approx(30.0).epsilon(0.067)); // +-2 dB
}

TEST_CASE("distance drops SNR by the path-loss law") {
    Waveform w = modulate(build_frame(0xBEEF), ModemConfig{});
    ChannelProfile p = identity_profile();
    NoiseSource n;
    n.level_db = -30.0;
    p.noise.push_back(n);
    p.seed = 5;
    p.distance_m = 2.0; // gain -6.02 dB at gamma 2 -> SNR ~ 23.98

    ChannelResult res = apply_channel(w, p, TransmitterSpec{});
    double snr = snr_inband(res.output, ModemConfig{});
    CHECK(std::abs(snr - (30.0 - 20.0 * std::log10(2.0))) <= 1.0);
}

TEST_CASE("doppler offset moves a tone's spectral peak") {
    Waveform w = tone(19500.0, 0.5, 1.0);
    ChannelProfile p = identity_profile();
    p.doppler_offset_hz = 50.0;
    ChannelResult res = apply_channel(w, p, TransmitterSpec{});
    double bin = w.sample_rate / 65536.0;
    CHECK(std::abs(fft_peak_hz(res.output, 65536) - 19550.0) <= bin + 1e-9);
}

TEST_CASE("monotone attenuation in distance and occlusion") {
    Waveform w = modulate(build_frame(0x0F0F), ModemConfig{});
    TransmitterSpec tx;

    double prev = 1e300;
    for (double d : {1.0, 2.0, 4.0, 8.0}) {
        ChannelProfile p = identity_profile();
        p.distance_m = d;
        ChannelResult res = apply_channel(w, p, tx);
        double pw = dsp::fft_band_power(res.output.samples, 48000.0, 18000.0, 22000.0);
        CHECK(pw <= prev * (1.0 + 1e-12));
        prev = pw;
    }

    prev = 1e300;
    for (Occlusion o : {Occlusion::LineOfSight, Occlusion::Partial, Occlusion::Complete}) {
        ChannelProfile p = identity_profile();
        p.occlusion = o;
        ChannelResult res = apply_channel(w, p, tx);
        double pw = dsp::fft_band_power(res.output.samples, 48000.0, 18000.0, 22000.0);
        CHECK(pw <= prev * (1.0 + 1e-12));
        prev = pw;
    }
}

TEST_CASE("frequency-dependent attenuation samples alpha at the reference") {
    Waveform w = tone(19000.0, 0.5, 0.5);
    ChannelProfile p = identity_profile();
    p.distance_m = 2.0;
    p.attenuation.points = {{18000.0, 1.0}, {22000.0, 3.0}}; // rising alpha
    p.alpha_ref_hz = 19000.0;                                // alpha = 1.5 dB/m
    ChannelResult res = apply_channel(w, p, TransmitterSpec{});
    // total gain: -10*2*log10(2) - 1.5*2 = -6.0206 - 3 = -9.0206
    CHECK(res.gain_db == doctest::Approx(-20.0 * std::log10(2.0) - 3.0).epsilon(1e-9));

    // curve endpoints clamp
    CHECK(p.attenuation.at(10000.0) == doctest::Approx(1.0));
    CHECK(p.attenuation.at(23000.0) == doctest::Approx(3.0));
    CHECK(p.attenuation.at(20000.0) == doctest::Approx(2.0));
}

TEST_CASE("sampled occlusion penalties honor the documented ranges") {
    Waveform w = tone(19000.0, 0.3, 0.1);
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        ChannelProfile p = identity_profile();
        p.sample_occlusion = true;
        p.seed = seed;

        p.occlusion = Occlusion::Partial;
        double pen = apply_channel(w, p, TransmitterSpec{}).occlusion_penalty_db;
        CHECK(pen >= 10.0);
        CHECK(pen <= 15.0);

        p.occlusion = Occlusion::Complete;
        pen = apply_channel(w, p, TransmitterSpec{}).occlusion_penalty_db;
        CHECK(pen >= 25.0);
        CHECK(pen <= 30.0);

        p.occlusion = Occlusion::LineOfSight;
        pen = apply_channel(w, p, TransmitterSpec{}).occlusion_penalty_db;
        CHECK(pen == 0.0); // no sampling without the baseline-loss option

        p.los_baseline_loss = true;
        pen = apply_channel(w, p, TransmitterSpec{}).occlusion_penalty_db;
        CHECK(pen >= 2.0);
        CHECK(pen <= 5.0);
    }
}

TEST_CASE("channel output is deterministic per seed") {
    Waveform w = modulate(build_frame(0x7777), ModemConfig{});
    ChannelProfile p = identity_profile();
    NoiseSource n;
    n.level_db = -20.0;
    p.noise.push_back(n);
    p.seed = 31337;

    ChannelResult a = apply_channel(w, p, TransmitterSpec{});
    ChannelResult b = apply_channel(w, p, TransmitterSpec{});
    REQUIRE(a.output.size() == b.output.size());
    for (size_t i = 0; i < a.output.size(); ++i)
        CHECK(a.output.samples[i] == b.output.samples[i]);

    p.seed = 31338;
    ChannelResult c = apply_channel(w, p, TransmitterSpec{});
    size_t diff = 0;
    for (size_t i = 0; i < a.output.size(); ++i)
        diff += a.output.samples[i] != c.output.samples[i];
    CHECK(diff > a.output.size() / 2); // different seed, different noise
}

TEST_CASE("energy is conserved through a 0 dB channel") {
    Waveform w = modulate(build_frame(0x2468), ModemConfig{});
    ChannelResult res = apply_channel(w, identity_profile(), TransmitterSpec{});
    double in = dsp::mean_square(w.samples);
    double out = dsp::mean_square(res.output.samples);
    CHECK(out == doctest::Approx(in).epsilon(0.001));
}

TEST_CASE("clipping is counted and bounded") {
    Waveform w = tone(19000.0, 0.9, 0.1);
    ChannelProfile p = identity_profile();
    p.orientation_table.gains_db = {6.0, 6.0, 6.0, 6.0, 6.0, 6.0, 6.0, 6.0}; // +6 dB
    ChannelResult res = apply_channel(w, p, TransmitterSpec{});
    CHECK(res.clipped_samples > 0);
    for (double s : res.output.samples) {
        CHECK(s <= 1.0);
        CHECK(s >= -1.0);
    }
}

TEST_CASE("apply_channel validates the profile") {
    Waveform w = tone(19000.0, 0.5, 0.1);
    ChannelProfile p = identity_profile();
    p.distance_m = 0.0;
    CHECK_THROWS_AS(apply_channel(w, p, TransmitterSpec{}), ConfigError);

    p = identity_profile();
    p.path_loss_exponent = -1.0;
    CHECK_THROWS_AS(apply_channel(w, p, TransmitterSpec{}), ConfigError);

    p = identity_profile();
    NoiseSource n;
    n.kind = NoiseSource::Kind::BandLimited;
    n.band_low = 20000.0;
    n.band_high = 30000.0; // beyond Nyquist
    p.noise.push_back(n);
    CHECK_THROWS_AS(apply_channel(w, p, TransmitterSpec{}), ConfigError);
}

// ============================================================ keyboard noise

TEST_CASE("keyboard noise: deterministic, low-frequency, level-accurate") {
    Waveform a = keyboard_noise(2.0, 48000.0, -20.0, 42);
    Waveform b = keyboard_noise(2.0, 48000.0, -20.0, 42);
    REQUIRE(a.size() == 96000);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i)
        CHECK(a.samples[i] == b.samples[i]);

    double rms = std::sqrt(dsp::mean_square(a.samples));
    CHECK(20.0 * std::log10(rms) == doctest::Approx(-20.0).epsilon(1e-6));

    double total = dsp::fft_band_power(a.samples, 48000.0, 0.0, 24000.0);
    double below10k = dsp::fft_band_power(a.samples, 48000.0, 0.0, 10000.0);
    double above18k = dsp::fft_band_power(a.samples, 48000.0, 18000.0, 24000.0);
    CHECK(below10k / total >= 0.99);
    CHECK(above18k / total < 0.01);

    Waveform c = keyboard_noise(2.0, 48000.0, -20.0, 43);
    size_t diff = 0;
    for (size_t i = 0; i < a.size(); ++i)
        diff += a.samples[i] != c.samples[i];
    CHECK(diff > 0);
}

TEST_CASE("keyboard noise disabled level yields silence") {
    Waveform w = keyboard_noise(0.5, 48000.0,
                                -std::numeric_limits<double>::infinity(), 7);
    REQUIRE(w.size() == 24000);
    for (double s : w.samples)
        CHECK(s == 0.0);
}

TEST_CASE("keyboard noise validates arguments") {
    CHECK_THROWS_AS(keyboard_noise(0.0, 48000.0, -20.0, 1), ConfigError);
    CHECK_THROWS_AS(keyboard_noise(1.0, 8000.0, -20.0, 1), ConfigError);
}
