#pragma once

#include <cstddef>
#include <vector>

namespace ultrafsk {

// Mono audio buffer. Samples are nominally in [-1, 1]; doubles throughout so
// analysis tolerances are not eaten by float rounding.
struct Waveform {
    std::vector<double> samples;
    double sample_rate = 48000.0;

    size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    double duration_s() const {
        return sample_rate > 0.0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

} // namespace ultrafsk
