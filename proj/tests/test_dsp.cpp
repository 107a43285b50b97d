#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <vector>

#include "oracles.hpp"
#include "ultrafsk/dsp.hpp"
#include "ultrafsk/errors.hpp"
#include "ultrafsk/parallel.hpp"
#include "ultrafsk/rng.hpp"
#include "ultrafsk/waveform.hpp"

using namespace ultrafsk;
using dsp::cplx;

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

// Analog-prototype magnitude of the bandpass Butterworth after bilinear
// prewarping: the bilinear transform maps digital frequency f to
// W = 2 fs tan(pi f / fs) exactly, so the digital response must equal
// |H(jW)|^2 = 1 / (1 + ((W^2 - W0^2) / (B W))^(2n)).
double butter_bp_mag(double f_hz, double lo_hz, double hi_hz, int order, double fs) {
    double wl = 2.0 * fs * std::tan(M_PI * lo_hz / fs);
    double wh = 2.0 * fs * std::tan(M_PI * hi_hz / fs);
    double w = 2.0 * fs * std::tan(M_PI * f_hz / fs);
    double w0sq = wl * wh;
    double bw = wh - wl;
    double ratio = (w * w - w0sq) / (bw * w);
    return 1.0 / std::sqrt(1.0 + std::pow(ratio * ratio, order));
}

double peak_freq(const std::vector<double>& x, double fs) {
    size_t nfft = dsp::next_pow2(x.size());
    auto spec = dsp::fft_real(x.data(), x.size(), nfft);
    size_t best = 1;
    for (size_t k = 1; k <= nfft / 2; ++k)
        if (std::abs(spec[k]) > std::abs(spec[best]))
            best = k;
    return static_cast<double>(best) * fs / static_cast<double>(nfft);
}

} // namespace

// ======================================================================= fft

TEST_CASE("fft matches the direct DFT on random input") {
    Rng rng(42);
    std::vector<cplx> x(64);
    for (auto& v : x)
        v = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    auto expect = oracles::dft(x);
    auto got = x;
    dsp::fft(got);
    for (size_t k = 0; k < x.size(); ++k)
        CHECK(std::abs(got[k] - expect[k]) < 1e-9);
}

TEST_CASE("fft inverse round trips and honors Parseval") {
    Rng rng(7);
    std::vector<cplx> x(256);
    for (auto& v : x)
        v = cplx(rng.gaussian(), 0.0);
    auto spec = x;
    dsp::fft(spec);

    double time_e = 0.0, freq_e = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        time_e += std::norm(x[i]);
        freq_e += std::norm(spec[i]);
    }
    CHECK(time_e == doctest::Approx(freq_e / static_cast<double>(x.size())).epsilon(1e-12));

    dsp::fft(spec, true);
    for (size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(spec[i] - x[i]) < 1e-12);
}

TEST_CASE("fft rejects non-power-of-two sizes") {
    std::vector<cplx> x(100);
    CHECK_THROWS_AS(dsp::fft(x), ConfigError);
}

TEST_CASE("pow2 helpers") {
    CHECK(dsp::prev_pow2(2400) == 2048);
    CHECK(dsp::prev_pow2(2048) == 2048);
    CHECK(dsp::next_pow2(2049) == 4096);
    CHECK(dsp::is_pow2(1));
    CHECK_FALSE(dsp::is_pow2(0));
    CHECK_FALSE(dsp::is_pow2(24000));
}

// =================================================================== windows

TEST_CASE("hamming window shape") {
    auto w = dsp::hamming(64);
    CHECK(w[0] == doctest::Approx(0.08).epsilon(1e-12));
    CHECK(w[63] == doctest::Approx(0.08).epsilon(1e-12));
    for (size_t i = 0; i < 32; ++i)
        CHECK(w[i] == doctest::Approx(w[63 - i]).epsilon(1e-12)); // symmetric
    CHECK(*std::max_element(w.begin(), w.end()) <= 1.0);
}

// ===================================================================== welch

TEST_CASE("welch band power recovers tone power") {
    // amplitude 0.6 tone: mean-square power 0.18
    Waveform w = tone(19500.0, 0.6, 1.0);
    dsp::Psd psd = dsp::welch_psd(w, 4096);
    double p = dsp::band_power(psd, 19000.0, 20000.0);
    CHECK(p == doctest::Approx(0.18).epsilon(0.01));
    // nothing outside the tone's neighborhood
    CHECK(dsp::band_power(psd, 1000.0, 10000.0) < 0.18 * 1e-9);
}

TEST_CASE("fft_band_power is Parseval-exact for a bin-centered tone") {
    Waveform w = tone(18750.0, 0.5, 1.0); // 18750 = 400 bins of 46.875 Hz at nfft 1024... exact at any pow2 >= n
    double p = dsp::fft_band_power(w.samples, w.sample_rate, 18000.0, 19000.0);
    CHECK(p == doctest::Approx(0.125).epsilon(1e-3));
    double total = dsp::fft_band_power(w.samples, w.sample_rate, 0.0, 24000.0);
    CHECK(total == doctest::Approx(dsp::mean_square(w.samples)).epsilon(1e-9));
}

// =================================================================== filters

TEST_CASE("butterworth bandpass magnitude matches the analytic formula") {
    const double fs = 48000.0;
    auto sos = dsp::butterworth_bandpass(4, 18000.0, 22000.0, fs);
    for (double f : {500.0, 1000.0, 5000.0, 12000.0, 17000.0, 18000.0, 19000.0,
                     19500.0, 20000.0, 21000.0, 22000.0, 23000.0, 23500.0}) {
        double got = std::abs(dsp::sos_response(sos, f, fs));
        double expect = butter_bp_mag(f, 18000.0, 22000.0, 4, fs);
        CAPTURE(f);
        CHECK(got == doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("bandpass edges sit at -3 dB and stop bands are deep and monotonic") {
    const double fs = 48000.0;
    auto sos = dsp::butterworth_bandpass(4, 18000.0, 22000.0, fs);
    double lo = 20.0 * std::log10(std::abs(dsp::sos_response(sos, 18000.0, fs)));
    double hi = 20.0 * std::log10(std::abs(dsp::sos_response(sos, 22000.0, fs)));
    CHECK(lo == doctest::Approx(-3.0103).epsilon(1e-3));
    CHECK(hi == doctest::Approx(-3.0103).epsilon(1e-3));

    double at_1k = 20.0 * std::log10(std::abs(dsp::sos_response(sos, 1000.0, fs)));
    CHECK(at_1k < -60.0);

    double prev = std::abs(dsp::sos_response(sos, 17500.0, fs));
    for (double f = 17000.0; f >= 2000.0; f -= 500.0) {
        double cur = std::abs(dsp::sos_response(sos, f, fs));
        CHECK(cur <= prev * (1.0 + 1e-9)); // decreasing away from the band
        prev = cur;
    }
}

TEST_CASE("butterworth lowpass edge and rolloff") {
    const double fs = 48000.0;
    auto sos = dsp::butterworth_lowpass(8, 7000.0, fs);
    CHECK(std::abs(dsp::sos_response(sos, 100.0, fs)) == doctest::Approx(1.0).epsilon(1e-6));
    double edge = 20.0 * std::log10(std::abs(dsp::sos_response(sos, 7000.0, fs)));
    CHECK(edge == doctest::Approx(-3.0103).epsilon(1e-3));
    double at18k = 20.0 * std::log10(std::abs(dsp::sos_response(sos, 18000.0, fs)));
    CHECK(at18k < -60.0);
}

TEST_CASE("filtfilt preserves in-band tone power and kills out-of-band") {
    auto sos = dsp::butterworth_bandpass(4, 18000.0, 22000.0, 48000.0);

    Waveform inband = tone(19000.0, 0.5, 0.5);
    auto y = dsp::filtfilt(sos, inband.samples);
    // ignore edge transients: compare the middle
    size_t a = y.size() / 4, b = 3 * y.size() / 4;
    std::vector<double> mid_in(inband.samples.begin() + a, inband.samples.begin() + b);
    std::vector<double> mid_out(y.begin() + a, y.begin() + b);
    double ratio_db = 10.0 * std::log10(dsp::mean_square(mid_out) / dsp::mean_square(mid_in));
    CHECK(std::abs(ratio_db) < 0.5);

    Waveform low = tone(1000.0, 0.5, 0.5);
    auto z = dsp::filtfilt(sos, low.samples);
    std::vector<double> mid_z(z.begin() + a, z.begin() + b);
    double atten_db = 10.0 * std::log10(dsp::mean_square(mid_z) / dsp::mean_square(mid_in));
    CHECK(atten_db < -60.0);

    std::vector<double> zeros(1000, 0.0);
    auto zz = dsp::filtfilt(sos, zeros);
    for (double v : zz)
        CHECK(v == 0.0);
}

TEST_CASE("filtfilt is zero-phase: tone peak position is not delayed") {
    // A short burst in the middle must stay centered after filtering.
    Waveform w;
    w.sample_rate = 48000.0;
    w.samples.assign(9600, 0.0);
    for (size_t i = 4000; i < 5600; ++i)
        w.samples[i] = 0.5 * std::sin(2.0 * M_PI * 19500.0 * static_cast<double>(i) / 48000.0);
    auto sos = dsp::butterworth_bandpass(4, 18000.0, 22000.0, 48000.0);
    auto y = dsp::filtfilt(sos, w.samples);

    // centroid of energy before and after
    auto centroid = [](const std::vector<double>& x) {
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            num += static_cast<double>(i) * x[i] * x[i];
            den += x[i] * x[i];
        }
        return num / den;
    };
    CHECK(std::abs(centroid(y) - centroid(w.samples)) < 16.0); // well under a symbol
}

// ============================================================ hilbert shift

TEST_CASE("frequency_shift moves a tone by the requested offset") {
    Waveform w = tone(19500.0, 0.5, 0.5);
    auto shifted = dsp::frequency_shift(w.samples, 50.0, w.sample_rate);
    REQUIRE(shifted.size() == w.samples.size());
    double peak = peak_freq(shifted, w.sample_rate);
    CHECK(peak == doctest::Approx(19550.0).epsilon(0.0002));

    auto down = dsp::frequency_shift(w.samples, -100.0, w.sample_rate);
    CHECK(peak_freq(down, w.sample_rate) == doctest::Approx(19400.0).epsilon(0.0002));
}

TEST_CASE("frequency_shift of zero is bit-exact identity") {
    Waveform w = tone(18500.0, 0.7, 0.25);
    auto same = dsp::frequency_shift(w.samples, 0.0, w.sample_rate);
    REQUIRE(same.size() == w.samples.size());
    CHECK(std::memcmp(same.data(), w.samples.data(), same.size() * sizeof(double)) == 0);
}

TEST_CASE("frequency_shift preserves energy of an in-band tone") {
    Waveform w = tone(19000.0, 0.5, 0.5);
    auto y = dsp::frequency_shift(w.samples, 75.0, w.sample_rate);
    CHECK(dsp::mean_square(y) == doctest::Approx(dsp::mean_square(w.samples)).epsilon(1e-3));
}

// ====================================================================== stft

TEST_CASE("stft/istft weighted overlap-add reconstructs the signal") {
    Rng rng(99);
    Waveform w;
    w.sample_rate = 48000.0;
    w.samples.resize(10000);
    for (auto& v : w.samples)
        v = rng.uniform(-0.9, 0.9);

    dsp::Stft s = dsp::stft(w, 1024, 256);
    auto back = dsp::istft(s, w.samples);
    REQUIRE(back.size() == w.samples.size());
    double err = 0.0;
    for (size_t i = 0; i < back.size(); ++i)
        err += (back[i] - w.samples[i]) * (back[i] - w.samples[i]);
    err = std::sqrt(err / static_cast<double>(back.size()));
    CHECK(err < 1e-9);
}

TEST_CASE("stft throws on too-short input") {
    Waveform w;
    w.sample_rate = 48000.0;
    w.samples.resize(100);
    CHECK_THROWS_AS(dsp::stft(w, 1024, 256), TooShortError);
}

TEST_CASE("stft frame count and bin spacing") {
    Waveform w = tone(19500.0, 0.5, 1.0);
    dsp::Stft s = dsp::stft(w, 2048, 512);
    CHECK(s.num_bins() == 1025);
    CHECK(s.bin_hz() == doctest::Approx(48000.0 / 2048.0));
    CHECK(s.num_frames() == (48000 - 2048) / 512 + 1);
}

// ================================================================= parabolic

TEST_CASE("parabolic interpolation recovers a known vertex") {
    // parabola y = -(x - 0.3)^2 sampled at -1, 0, +1
    auto y = [](double x) { return -(x - 0.3) * (x - 0.3); };
    double off = dsp::parabolic_offset(y(-1.0), y(0.0), y(1.0));
    CHECK(off == doctest::Approx(0.3).epsilon(1e-12));

    CHECK(dsp::parabolic_offset(1.0, 1.0, 1.0) == 0.0);           // flat: degenerate
    CHECK(std::abs(dsp::parabolic_offset(5.0, 0.0, 0.0)) <= 0.5); // clamped
}

// ======================================================================= rng

TEST_CASE("rng is deterministic and well-scaled") {
    Rng a(1234), b(1234);
    for (int i = 0; i < 1000; ++i)
        CHECK(a.next() == b.next());

    Rng r(77);
    double mean = 0.0, var = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double g = r.gaussian();
        mean += g;
        var += g * g;
    }
    mean /= n;
    var = var / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));

    for (int i = 0; i < 1000; ++i) {
        double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(r.integer(7) < 7);
    }

    CHECK(derive_seed(1, 2) != derive_seed(2, 1));
    CHECK(derive_seed(5, 0) == derive_seed(5, 0));
}

// ================================================================== parallel

TEST_CASE("parallel_for visits every index exactly once") {
    std::vector<int> hits(5000, 0);
    parallel_for(hits.size(), [&](size_t i) { hits[i] += 1; }, 4);
    for (int h : hits)
        CHECK(h == 1);
}

TEST_CASE("parallel_for propagates exceptions") {
    CHECK_THROWS_AS(
        parallel_for(100, [](size_t i) {
            if (i == 50)
                throw DomainError("boom");
        }, 3),
        DomainError);
}
