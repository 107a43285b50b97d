#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "ultrafsk/waveform.hpp"

namespace ultrafsk::dsp {

using cplx = std::complex<double>;

// ------------------------------------------------------------------ FFT core

bool is_pow2(size_t n);
size_t next_pow2(size_t n);      // smallest power of two >= n (n >= 1)
size_t prev_pow2(size_t n);      // largest power of two <= n (n >= 1)

// In-place iterative radix-2 transform. Size must be a power of two.
// inverse=true applies the 1/N factor.
void fft(std::vector<cplx>& a, bool inverse = false);

// FFT of a real signal zero-padded (or truncated) to nfft (power of two).
std::vector<cplx> fft_real(const double* x, size_t n, size_t nfft);

// ------------------------------------------------------------------- windows

// Symmetric Hamming window, w[i] = 0.54 - 0.46 cos(2 pi i / (n-1)).
std::vector<double> hamming(size_t n);

// --------------------------------------------------------------------- Welch

// One-sided Welch power estimate: Hamming window, 50% overlap. pxx[k] is
// power density at bin k (integrates to mean square power over frequency);
// band_power sums pxx * bin_hz over f in [lo_hz, hi_hz).
struct Psd {
    std::vector<double> pxx; // nfft/2 + 1 entries
    double bin_hz = 0.0;
    double sample_rate = 0.0;
};
Psd welch_psd(const Waveform& w, size_t nfft);
double band_power(const Psd& psd, double lo_hz, double hi_hz);

// Exact (Parseval) band power of a buffer via one full-length FFT; used for
// deterministic noise scaling. Returns mean-square power of frequency content
// in [lo_hz, hi_hz).
double fft_band_power(const std::vector<double>& x, double sample_rate,
                      double lo_hz, double hi_hz);

// Mean square of the whole buffer.
double mean_square(const std::vector<double>& x);

// ------------------------------------------------------------------ filters

// One second-order section, direct form II transposed. Denominator a0 == 1.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

// Butterworth designs via bilinear transform with frequency prewarping.
// `order` is the analog prototype order (bandpass yields 2*order poles).
std::vector<Biquad> butterworth_bandpass(int order, double lo_hz, double hi_hz,
                                         double sample_rate);
std::vector<Biquad> butterworth_lowpass(int order, double cutoff_hz, double sample_rate);

// Cascade response at frequency f (for tests and normalization checks).
cplx sos_response(const std::vector<Biquad>& sos, double f_hz, double sample_rate);

// Causal filtering through the cascade.
std::vector<double> sosfilt(const std::vector<Biquad>& sos, const std::vector<double>& x);

// Zero-phase filtering: forward pass, reverse, forward again, reverse.
// Odd-reflection padding at both ends tames edge transients.
std::vector<double> filtfilt(const std::vector<Biquad>& sos, const std::vector<double>& x);

// ------------------------------------------------------------- Hilbert shift

// Shift all frequency content of x by shift_hz (single sideband: analytic
// signal times a complex exponential, real part). shift_hz == 0 returns x
// unchanged, bit for bit.
std::vector<double> frequency_shift(const std::vector<double>& x, double shift_hz,
                                    double sample_rate);

// ---------------------------------------------------------------------- STFT

struct Stft {
    size_t fft_size = 0;
    size_t hop = 0;
    double sample_rate = 0.0;
    size_t signal_len = 0;                  // samples of the analyzed signal
    std::vector<std::vector<cplx>> frames;  // each fft_size/2 + 1 one-sided bins

    size_t num_frames() const { return frames.size(); }
    size_t num_bins() const { return fft_size / 2 + 1; }
    double bin_hz() const { return sample_rate / static_cast<double>(fft_size); }
    double frame_center_s(size_t f) const {
        return (static_cast<double>(f) * hop + fft_size / 2.0) / sample_rate;
    }
};

// Hamming-windowed short-time transform. Throws TooShortError if the signal
// holds fewer than fft_size samples.
Stft stft(const Waveform& w, size_t fft_size, size_t hop);

// Weighted overlap-add inverse (synthesis window = analysis window, with
// window-square-sum normalization). Samples past the last full frame are
// copied from `tail_source` (same length as the original signal).
std::vector<double> istft(const Stft& s, const std::vector<double>& tail_source);

// Offset of a spectral peak from its center bin, via a parabola through the
// three log magnitudes. Clamped to [-0.5, 0.5]; 0 on degenerate input.
double parabolic_offset(double mag_left, double mag_center, double mag_right);

} // namespace ultrafsk::dsp
