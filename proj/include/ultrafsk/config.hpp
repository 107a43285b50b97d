#pragma once

#include <string>

#include "ultrafsk/channel.hpp"
#include "ultrafsk/demodulator.hpp"
#include "ultrafsk/modulator.hpp"

// Forward declaration keeps nlohmann/json out of most translation units.
#include <json.hpp>

namespace ultrafsk {

inline constexpr const char* kVersion = "0.1.0";
// Environment variable naming a default config file (the only env coupling).
inline constexpr const char* kConfigEnvVar = "ULTRAFSK_CONFIG";

// Aggregated tool configuration: JSON sections "modem", "channel",
// "receiver". Every key optional; unknown keys rejected. The receiver's
// embedded modem always mirrors `modem`. Transmitter settings (tx_power_db,
// tx_kind) ride in the channel section.
struct ToolConfig {
    ModemConfig modem;
    ChannelProfile channel;
    ReceiverConfig receiver;
    TransmitterSpec tx;
    // True once channel.alpha_ref_hz was set explicitly; otherwise finalize()
    // keeps it pinned to the carrier midpoint.
    bool alpha_ref_explicit = false;

    // Re-sync derived fields (receiver.modem, channel.alpha_ref_hz default).
    void finalize();
};

// Parse JSON text / file into a default-initialized ToolConfig.
// Throws ConfigError on malformed JSON, unknown keys, or bad values;
// IoError when the file cannot be read.
ToolConfig config_from_json(const nlohmann::json& j);
ToolConfig load_config_file(const std::string& path);
// Apply one JSON document on top of an existing config (file-then-flags).
void merge_config_json(ToolConfig& cfg, const nlohmann::json& j);

// Full resolved configuration (every effective value), for run manifests.
nlohmann::ordered_json config_to_json(const ToolConfig& cfg);

} // namespace ultrafsk
