#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ultrafsk/frame.hpp"
#include "ultrafsk/modulator.hpp"
#include "ultrafsk/waveform.hpp"

namespace ultrafsk {

struct ReceiverConfig {
    ModemConfig modem;
    // 0 means auto: largest power of two <= samples per symbol.
    size_t fft_size = 0;
    // 0 means auto: fft_size / 4 (75% overlap).
    size_t hop = 0;
    double classify_tolerance_hz = 200.0; // max |peak - carrier| accepted
    double noise_estimate_duration = 0.5; // leading seconds assumed signal-free
    double kalman_process_var = 1.0;      // q, Hz^2
    double kalman_measurement_var = 100.0; // r, Hz^2
    int filter_order = 4;                 // Butterworth bandpass order
    double peak_floor_db = 6.0;           // peak must clear frame median by this

    size_t resolved_fft_size() const;
    size_t resolved_hop() const;
    double frames_per_symbol() const; // samples_per_symbol / hop, may be fractional

    // Checks modem validity plus: hop <= fft_size <= samples-per-symbol and
    // classify_tolerance_hz < |f1 - f0| / 2 (disjoint decision regions).
    void validate() const;
};

enum class Bit : uint8_t { Zero = 0, One = 1, Erasure = 2 };

struct Decision {
    Bit bit = Bit::Erasure;
    double freq_hz = 0.0;    // refined peak (or smoothed) frequency; 0 when floored
    double magnitude = 0.0;  // linear peak magnitude
};

// One decision per analysis frame before alignment, one per symbol after.
struct SymbolStream {
    std::vector<Decision> decisions;
    size_t size() const { return decisions.size(); }
};

struct IntegrityFailure {
    size_t symbol_index = 0;  // where the failing frame's preamble started
    FrameError error = FrameError::None; // BadCrc, or None when erasures blocked parsing
    bool erasure = false;     // true when unresolved symbols prevented a parse
};

struct DecodeReport {
    std::vector<uint16_t> payloads;       // every CRC-valid payload, in order
    long sync_offset_samples = -1;        // sample position of first accepted preamble, -1 if none
    double estimated_snr_db = 0.0;        // in-band SNR estimate of the input
    SymbolStream symbols;                 // aligned, one decision per symbol
    size_t align_offset_frames = 0;       // chosen STFT-frame offset
    std::vector<IntegrityFailure> errors; // rejected frame candidates
};

// Zero-phase Butterworth bandpass (forward-backward, no group delay).
Waveform bandpass(const Waveform& w, double low_hz, double high_hz, int order);

// Average magnitude spectrum (fft_size/2+1 bins) of the leading `duration_s`
// of the recording; the receiver's noise estimate for spectral subtraction.
std::vector<double> noise_profile(const Waveform& w, double duration_s,
                                  size_t fft_size, size_t hop);

// Per STFT frame: magnitude = max(0, |X| - noise), phase kept; rebuilt by
// weighted overlap-add to the input length.
Waveform spectral_subtract(const Waveform& w, const std::vector<double>& noise,
                           size_t fft_size, size_t hop);

// Hamming-windowed sliding FFT; per frame the dominant in-band peak is
// refined by 3-point parabolic interpolation and classified against f0/f1
// within classify_tolerance_hz. Frames whose peak fails to clear the frame's
// median in-band magnitude by peak_floor_db become erasures.
SymbolStream stft_peaks(const Waveform& w, const ReceiverConfig& cfg);

// Scalar constant-value Kalman filter over peak frequencies (process variance
// q, measurement variance r). Innovations beyond |f1-f0|/2 are treated as
// symbol transitions when the next measurement confirms them (state reset),
// as outliers otherwise (prior kept). Erasures propagate the prior without
// update and stay erasures. Decisions are re-derived from the smoothed state.
SymbolStream kalman_smooth(const SymbolStream& stream, const ReceiverConfig& cfg);

struct AlignResult {
    SymbolStream symbols;
    size_t offset_frames = 0;
};

// Majority vote over the frames of each symbol period, for every candidate
// start offset in [0, ceil(frames-per-symbol)); keeps the offset with the
// highest total agreement (ties to the smallest offset). When the winning
// offset is nonzero, the frames before it are emitted as a leading partial
// symbol (index 0) so a transmission starting at sample zero keeps its first
// bit; with no frames or a vote tie that slot is an erasure.
AlignResult align_symbols(const SymbolStream& stream, const ReceiverConfig& cfg);

// First index (at or after `from`) where six decisions read 1,0,1,0,1,0.
std::optional<size_t> find_preamble(const SymbolStream& symbols, size_t from = 0);

// Full receiver: bandpass -> noise estimate -> spectral subtraction ->
// stft_peaks -> kalman_smooth -> align_symbols -> preamble scan ->
// parse_frame. The scan consumes 30 symbols per CRC-valid frame and advances
// one symbol past candidates that fail integrity (so a junk hit cannot
// swallow a real frame).
DecodeReport decode(const Waveform& w, const ReceiverConfig& cfg);

// Hamming distance / length. Throws LengthMismatchError on unequal lengths.
double ber(const BitVec& truth, const BitVec& decoded);

// Message-level BER over 16-bit payload lists: payload i is compared
// bitwise against truth i; missing payloads count all 16 bits as errors.
double message_ber(const std::vector<uint16_t>& truth, const std::vector<uint16_t>& decoded);

} // namespace ultrafsk
