#pragma once

#include <string>

#include "ultrafsk/analysis.hpp"

namespace ultrafsk {

// 24-bit BMP of the spectrogram: time (s) along x, frequency (kHz) along y,
// magnitude mapped over a dark-to-bright ramp, axes labeled with a built-in
// 5x7 bitmap font. Throws IoError on write failure.
void write_spectrogram_bmp(const Spectrogram& sg, const std::string& path);

// CSV grid: header row "time_s" then one column per frequency bin (Hz);
// one row per frame, 4 decimal places.
void write_spectrogram_csv(const Spectrogram& sg, const std::string& path);

} // namespace ultrafsk
