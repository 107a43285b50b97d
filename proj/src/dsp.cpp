#include "ultrafsk/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "ultrafsk/errors.hpp"

namespace ultrafsk::dsp {

// ================================================================== FFT core

bool is_pow2(size_t n) { return n > 0 && (n & (n - 1)) == 0; }

size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

size_t prev_pow2(size_t n) {
    if (n == 0)
        throw DomainError("prev_pow2: n must be positive");
    size_t p = 1;
    while (p * 2 <= n)
        p <<= 1;
    return p;
}

namespace {

// Twiddle factors exp(-2 pi i k / n) for k in [0, n/2). Cached per thread so
// concurrent Monte Carlo workers never contend.
const std::vector<cplx>& twiddles(size_t n) {
    thread_local std::unordered_map<size_t, std::vector<cplx>> cache;
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    std::vector<cplx> tw(n / 2);
    for (size_t k = 0; k < n / 2; ++k)
        tw[k] = std::polar(1.0, -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n));
    return cache.emplace(n, std::move(tw)).first->second;
}

} // namespace

void fft(std::vector<cplx>& a, bool inverse) {
    size_t n = a.size();
    if (n <= 1)
        return;
    if (!is_pow2(n))
        throw ConfigError("fft: size must be a power of two, got " + std::to_string(n));

    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }

    const auto& tw = twiddles(n);
    for (size_t len = 2; len <= n; len <<= 1) {
        size_t stride = n / len;
        for (size_t base = 0; base < n; base += len) {
            for (size_t k = 0; k < len / 2; ++k) {
                cplx w = tw[k * stride];
                if (inverse)
                    w = std::conj(w);
                cplx u = a[base + k];
                cplx v = a[base + k + len / 2] * w;
                a[base + k] = u + v;
                a[base + k + len / 2] = u - v;
            }
        }
    }

    if (inverse) {
        double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a)
            x *= inv;
    }
}

std::vector<cplx> fft_real(const double* x, size_t n, size_t nfft) {
    if (!is_pow2(nfft))
        throw ConfigError("fft_real: nfft must be a power of two");
    std::vector<cplx> a(nfft, cplx(0.0, 0.0));
    size_t m = std::min(n, nfft);
    for (size_t i = 0; i < m; ++i)
        a[i] = cplx(x[i], 0.0);
    fft(a);
    return a;
}

// =================================================================== windows

std::vector<double> hamming(size_t n) {
    std::vector<double> w(n, 1.0);
    if (n < 2)
        return w;
    for (size_t i = 0; i < n; ++i)
        w[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                                      static_cast<double>(n - 1));
    return w;
}

namespace {

// Periodic (DFT-even) variant for spectral estimation: a bin-centered tone
// transforms to exactly three nonzero bins, so silent bands stay silent.
std::vector<double> hamming_periodic(size_t n) {
    std::vector<double> w(n, 1.0);
    if (n < 2)
        return w;
    for (size_t i = 0; i < n; ++i)
        w[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                                      static_cast<double>(n));
    return w;
}

} // namespace

// ===================================================================== Welch

Psd welch_psd(const Waveform& w, size_t nfft) {
    if (!is_pow2(nfft) || nfft < 4)
        throw ConfigError("welch_psd: nfft must be a power of two >= 4");
    if (w.sample_rate <= 0.0)
        throw ConfigError("welch_psd: sample rate must be positive");
    if (w.size() < nfft)
        throw TooShortError("welch_psd: signal shorter than one analysis frame (" +
                            std::to_string(w.size()) + " < " + std::to_string(nfft) + ")");

    size_t hop = nfft / 2;
    size_t nframes = 1 + (w.size() - nfft) / hop;
    std::vector<double> win = hamming_periodic(nfft);
    double wss = 0.0;
    for (double v : win)
        wss += v * v;

    Psd psd;
    psd.pxx.assign(nfft / 2 + 1, 0.0);
    psd.bin_hz = w.sample_rate / static_cast<double>(nfft);
    psd.sample_rate = w.sample_rate;

    std::vector<cplx> buf(nfft);
    for (size_t f = 0; f < nframes; ++f) {
        const double* seg = w.samples.data() + f * hop;
        for (size_t i = 0; i < nfft; ++i)
            buf[i] = cplx(seg[i] * win[i], 0.0);
        fft(buf);
        for (size_t k = 0; k <= nfft / 2; ++k)
            psd.pxx[k] += std::norm(buf[k]);
    }

    double scale = 1.0 / (static_cast<double>(nframes) * w.sample_rate * wss);
    for (size_t k = 0; k <= nfft / 2; ++k) {
        double one_sided = (k == 0 || k == nfft / 2) ? 1.0 : 2.0;
        psd.pxx[k] *= scale * one_sided;
    }
    return psd;
}

double band_power(const Psd& psd, double lo_hz, double hi_hz) {
    if (!(lo_hz < hi_hz))
        throw ConfigError("band_power: band low must be below band high");
    double power = 0.0;
    for (size_t k = 0; k < psd.pxx.size(); ++k) {
        double f = static_cast<double>(k) * psd.bin_hz;
        if (f >= lo_hz && f < hi_hz)
            power += psd.pxx[k] * psd.bin_hz;
    }
    return power;
}

double fft_band_power(const std::vector<double>& x, double sample_rate,
                      double lo_hz, double hi_hz) {
    if (x.empty())
        return 0.0;
    if (!(lo_hz < hi_hz))
        throw ConfigError("fft_band_power: band low must be below band high");
    size_t nfft = next_pow2(x.size());
    std::vector<cplx> X = fft_real(x.data(), x.size(), nfft);
    double bin = sample_rate / static_cast<double>(nfft);
    // Parseval: sum |X_k|^2 / (nfft * n) equals the mean square over n samples.
    double scale = 1.0 / (static_cast<double>(nfft) * static_cast<double>(x.size()));
    double power = 0.0;
    for (size_t k = 0; k <= nfft / 2; ++k) {
        double f = static_cast<double>(k) * bin;
        if (f >= lo_hz && f < hi_hz) {
            double one_sided = (k == 0 || k == nfft / 2) ? 1.0 : 2.0;
            power += one_sided * std::norm(X[k]) * scale;
        }
    }
    return power;
}

double mean_square(const std::vector<double>& x) {
    if (x.empty())
        return 0.0;
    double acc = 0.0;
    for (double v : x)
        acc += v * v;
    return acc / static_cast<double>(x.size());
}

// =================================================================== filters

namespace {

// Analog Butterworth prototype poles (cutoff 1 rad/s), left half plane.
std::vector<cplx> prototype_poles(int order) {
    std::vector<cplx> poles;
    poles.reserve(order);
    for (int k = 1; k <= order; ++k) {
        double theta = M_PI * (2.0 * k + order - 1.0) / (2.0 * order);
        poles.push_back(std::polar(1.0, theta));
    }
    return poles;
}

cplx bilinear(cplx s, double fs2) { // fs2 = 2 * sample_rate
    return (fs2 + s) / (fs2 - s);
}

// Group a conjugate-symmetric pole set into denominators of second-order
// sections. Complex poles pair with their own conjugate; leftover real poles
// pair among themselves (one may sit alone in a first-order tail section).
std::vector<Biquad> sections_from_poles(const std::vector<cplx>& zpoles) {
    constexpr double kImagTol = 1e-10;
    std::vector<cplx> complex_poles;
    std::vector<double> real_poles;
    for (const cplx& p : zpoles) {
        if (p.imag() > kImagTol)
            complex_poles.push_back(p);
        else if (p.imag() >= -kImagTol)
            real_poles.push_back(p.real());
    }
    std::sort(real_poles.begin(), real_poles.end());

    std::vector<Biquad> sos;
    for (const cplx& p : complex_poles) {
        Biquad q;
        q.a1 = -2.0 * p.real();
        q.a2 = std::norm(p);
        sos.push_back(q);
    }
    for (size_t i = 0; i + 1 < real_poles.size(); i += 2) {
        Biquad q;
        q.a1 = -(real_poles[i] + real_poles[i + 1]);
        q.a2 = real_poles[i] * real_poles[i + 1];
        sos.push_back(q);
    }
    if (real_poles.size() % 2 == 1) {
        Biquad q;
        q.a1 = -real_poles.back();
        q.a2 = 0.0;
        sos.push_back(q);
    }
    return sos;
}

void normalize_gain(std::vector<Biquad>& sos, double f_ref, double sample_rate) {
    cplx h(1.0, 0.0);
    for (const Biquad& q : sos) {
        cplx z1 = std::polar(1.0, -2.0 * M_PI * f_ref / sample_rate);
        cplx z2 = z1 * z1;
        h *= (q.b0 + q.b1 * z1 + q.b2 * z2) / (1.0 + q.a1 * z1 + q.a2 * z2);
    }
    double g = std::abs(h);
    if (g <= 0.0 || !std::isfinite(g))
        throw ConfigError("butterworth: degenerate gain normalization");
    double per_section = std::pow(1.0 / g, 1.0 / static_cast<double>(sos.size()));
    for (Biquad& q : sos) {
        q.b0 *= per_section;
        q.b1 *= per_section;
        q.b2 *= per_section;
    }
}

} // namespace

std::vector<Biquad> butterworth_bandpass(int order, double lo_hz, double hi_hz,
                                         double sample_rate) {
    if (order < 1 || order > 12)
        throw ConfigError("butterworth_bandpass: order must be in [1, 12]");
    double nyquist = sample_rate / 2.0;
    if (!(lo_hz > 0.0 && lo_hz < hi_hz && hi_hz < nyquist))
        throw ConfigError("butterworth_bandpass: need 0 < lo < hi < nyquist (lo=" +
                          std::to_string(lo_hz) + ", hi=" + std::to_string(hi_hz) +
                          ", fs=" + std::to_string(sample_rate) + ")");

    double fs2 = 2.0 * sample_rate;
    double w1 = fs2 * std::tan(M_PI * lo_hz / sample_rate);
    double w2 = fs2 * std::tan(M_PI * hi_hz / sample_rate);
    double w0 = std::sqrt(w1 * w2);
    double bw = w2 - w1;

    // Lowpass prototype -> bandpass: s_lp = (s^2 + w0^2) / (bw * s). Each
    // prototype pole p yields the two roots of s^2 - p*bw*s + w0^2.
    std::vector<cplx> zpoles;
    zpoles.reserve(2 * order);
    for (const cplx& p : prototype_poles(order)) {
        cplx pb = p * bw;
        cplx disc = std::sqrt(pb * pb - 4.0 * w0 * w0);
        zpoles.push_back(bilinear((pb + disc) / 2.0, fs2));
        zpoles.push_back(bilinear((pb - disc) / 2.0, fs2));
    }

    std::vector<Biquad> sos = sections_from_poles(zpoles);
    // order zeros at z=1 (from s=0) and order at z=-1 (from s=inf): one pair
    // per section, (z-1)(z+1) -> {1, 0, -1}.
    for (Biquad& q : sos) {
        q.b0 = 1.0;
        q.b1 = 0.0;
        q.b2 = -1.0;
    }

    double f_center = (sample_rate / M_PI) * std::atan(w0 / fs2);
    normalize_gain(sos, f_center, sample_rate);
    return sos;
}

std::vector<Biquad> butterworth_lowpass(int order, double cutoff_hz, double sample_rate) {
    if (order < 1 || order > 12)
        throw ConfigError("butterworth_lowpass: order must be in [1, 12]");
    if (!(cutoff_hz > 0.0 && cutoff_hz < sample_rate / 2.0))
        throw ConfigError("butterworth_lowpass: need 0 < cutoff < nyquist");

    double fs2 = 2.0 * sample_rate;
    double wc = fs2 * std::tan(M_PI * cutoff_hz / sample_rate);

    std::vector<cplx> zpoles;
    zpoles.reserve(order);
    for (const cplx& p : prototype_poles(order))
        zpoles.push_back(bilinear(p * wc, fs2));

    std::vector<Biquad> sos = sections_from_poles(zpoles);
    // All zeros at z = -1: {1, 2, 1} per full section, {1, 1, 0} for a
    // first-order tail (odd orders).
    for (Biquad& q : sos) {
        bool first_order = (q.a2 == 0.0);
        q.b0 = 1.0;
        q.b1 = first_order ? 1.0 : 2.0;
        q.b2 = first_order ? 0.0 : 1.0;
    }
    normalize_gain(sos, 0.0, sample_rate);
    return sos;
}

cplx sos_response(const std::vector<Biquad>& sos, double f_hz, double sample_rate) {
    cplx z1 = std::polar(1.0, -2.0 * M_PI * f_hz / sample_rate);
    cplx z2 = z1 * z1;
    cplx h(1.0, 0.0);
    for (const Biquad& q : sos)
        h *= (q.b0 + q.b1 * z1 + q.b2 * z2) / (1.0 + q.a1 * z1 + q.a2 * z2);
    return h;
}

std::vector<double> sosfilt(const std::vector<Biquad>& sos, const std::vector<double>& x) {
    std::vector<double> y = x;
    for (const Biquad& q : sos) {
        double s1 = 0.0, s2 = 0.0;
        for (double& v : y) {
            double in = v;
            double out = q.b0 * in + s1;
            s1 = q.b1 * in - q.a1 * out + s2;
            s2 = q.b2 * in - q.a2 * out;
            v = out;
        }
    }
    return y;
}

std::vector<double> filtfilt(const std::vector<Biquad>& sos, const std::vector<double>& x) {
    size_t n = x.size();
    if (n == 0)
        return {};
    size_t pad = std::min(n - 1, static_cast<size_t>(128));

    // Odd reflection at both ends.
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (size_t i = 0; i < pad; ++i)
        ext.push_back(2.0 * x.front() - x[pad - i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (size_t i = 0; i < pad; ++i)
        ext.push_back(2.0 * x.back() - x[n - 2 - i]);

    std::vector<double> y = sosfilt(sos, ext);
    std::reverse(y.begin(), y.end());
    y = sosfilt(sos, y);
    std::reverse(y.begin(), y.end());

    return std::vector<double>(y.begin() + static_cast<long>(pad),
                               y.begin() + static_cast<long>(pad + n));
}

// ============================================================= Hilbert shift

std::vector<double> frequency_shift(const std::vector<double>& x, double shift_hz,
                                    double sample_rate) {
    if (shift_hz == 0.0 || x.empty())
        return x;
    size_t n = x.size();
    size_t nfft = next_pow2(n);
    std::vector<cplx> spec = fft_real(x.data(), n, nfft);

    // Analytic signal: zero the negative frequencies, double the positive.
    for (size_t k = 1; k < nfft / 2; ++k)
        spec[k] *= 2.0;
    for (size_t k = nfft / 2 + 1; k < nfft; ++k)
        spec[k] = cplx(0.0, 0.0);
    fft(spec, true);

    std::vector<double> y(n);
    double w = 2.0 * M_PI * shift_hz / sample_rate;
    for (size_t i = 0; i < n; ++i) {
        cplx rot = std::polar(1.0, w * static_cast<double>(i));
        y[i] = (spec[i] * rot).real();
    }
    return y;
}

// ====================================================================== STFT

Stft stft(const Waveform& w, size_t fft_size, size_t hop) {
    if (!is_pow2(fft_size) || fft_size < 4)
        throw ConfigError("stft: fft_size must be a power of two >= 4");
    if (hop == 0)
        throw ConfigError("stft: hop must be positive");
    if (w.size() < fft_size)
        throw TooShortError("stft: signal shorter than one analysis frame (" +
                            std::to_string(w.size()) + " < " + std::to_string(fft_size) + ")");

    Stft out;
    out.fft_size = fft_size;
    out.hop = hop;
    out.sample_rate = w.sample_rate;
    out.signal_len = w.size();

    size_t nframes = 1 + (w.size() - fft_size) / hop;
    out.frames.reserve(nframes);
    std::vector<double> win = hamming(fft_size);
    std::vector<cplx> buf(fft_size);
    for (size_t f = 0; f < nframes; ++f) {
        const double* seg = w.samples.data() + f * hop;
        for (size_t i = 0; i < fft_size; ++i)
            buf[i] = cplx(seg[i] * win[i], 0.0);
        fft(buf);
        out.frames.emplace_back(buf.begin(), buf.begin() + static_cast<long>(fft_size / 2 + 1));
    }
    return out;
}

std::vector<double> istft(const Stft& s, const std::vector<double>& tail_source) {
    if (tail_source.size() != s.signal_len)
        throw LengthMismatchError("istft: tail source length must match the analyzed signal");

    std::vector<double> num(s.signal_len, 0.0), den(s.signal_len, 0.0);
    std::vector<double> win = hamming(s.fft_size);
    std::vector<cplx> buf(s.fft_size);

    for (size_t f = 0; f < s.num_frames(); ++f) {
        const auto& half = s.frames[f];
        for (size_t k = 0; k <= s.fft_size / 2; ++k)
            buf[k] = half[k];
        for (size_t k = s.fft_size / 2 + 1; k < s.fft_size; ++k)
            buf[k] = std::conj(half[s.fft_size - k]);
        fft(buf, true);
        size_t base = f * s.hop;
        for (size_t i = 0; i < s.fft_size && base + i < s.signal_len; ++i) {
            num[base + i] += win[i] * buf[i].real();
            den[base + i] += win[i] * win[i];
        }
    }

    std::vector<double> y = tail_source;
    for (size_t i = 0; i < s.signal_len; ++i)
        if (den[i] > 1e-12)
            y[i] = num[i] / den[i];
    return y;
}

double parabolic_offset(double mag_left, double mag_center, double mag_right) {
    double denom = mag_left - 2.0 * mag_center + mag_right;
    if (!std::isfinite(denom) || std::abs(denom) < 1e-300)
        return 0.0;
    double delta = 0.5 * (mag_left - mag_right) / denom;
    return std::clamp(delta, -0.5, 0.5);
}

} // namespace ultrafsk::dsp
