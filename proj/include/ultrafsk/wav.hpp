#pragma once

#include <string>

#include "ultrafsk/waveform.hpp"

namespace ultrafsk {

// RIFF/WAVE, mono, 16-bit signed little-endian PCM. Any sample with
// magnitude > 1 raises IoError (clipping on write is an error, not
// saturation).
void wav_write(const std::string& path, const Waveform& w);

// Reads mono 16-bit PCM WAV at 48000 or 44100 Hz (anything else is IoError;
// 44100 input adapts downstream configs — no resampling is performed).
Waveform wav_read(const std::string& path);

} // namespace ultrafsk
