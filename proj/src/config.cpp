#include "ultrafsk/config.hpp"

#include <fstream>
#include <set>
#include <string>

#include "ultrafsk/errors.hpp"

namespace ultrafsk {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& section, const std::string& key) {
    throw ConfigError("unknown config key '" + section + "." + key + "'");
}

double num(const json& v, const std::string& where) {
    if (!v.is_number())
        throw ConfigError("config value '" + where + "' must be a number");
    return v.get<double>();
}

bool boolean(const json& v, const std::string& where) {
    if (!v.is_boolean())
        throw ConfigError("config value '" + where + "' must be a boolean");
    return v.get<bool>();
}

void parse_modem(ModemConfig& m, const json& j) {
    bool saw_rate = false, saw_duration = false;
    double rate = 0.0;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "f0_hz") m.f0 = num(*it, "modem.f0_hz");
        else if (k == "f1_hz") m.f1 = num(*it, "modem.f1_hz");
        else if (k == "symbol_duration_s") { m.symbol_duration = num(*it, "modem.symbol_duration_s"); saw_duration = true; }
        else if (k == "bit_rate_bps") { rate = num(*it, "modem.bit_rate_bps"); saw_rate = true; }
        else if (k == "sample_rate_hz") m.sample_rate = num(*it, "modem.sample_rate_hz");
        else if (k == "band_low_hz") m.band_low = num(*it, "modem.band_low_hz");
        else if (k == "band_high_hz") m.band_high = num(*it, "modem.band_high_hz");
        else if (k == "amplitude") m.amplitude = num(*it, "modem.amplitude");
        else if (k == "ramp_duration_s") m.ramp_duration = num(*it, "modem.ramp_duration_s");
        else bad_key("modem", k);
    }
    if (saw_rate && saw_duration)
        throw ConfigError("config: modem.bit_rate_bps and modem.symbol_duration_s are exclusive");
    if (saw_rate)
        m.symbol_duration = bit_rate_to_symbol_duration(rate, m.sample_rate);
}

NoiseSource parse_noise_source(const json& j, size_t index) {
    NoiseSource s;
    std::string where = "channel.noise[" + std::to_string(index) + "]";
    if (!j.is_object())
        throw ConfigError("config: " + where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "kind") {
            std::string kind = it->is_string() ? it->get<std::string>() : "";
            if (kind == "white-gaussian") s.kind = NoiseSource::Kind::WhiteGaussian;
            else if (kind == "band-limited") s.kind = NoiseSource::Kind::BandLimited;
            else throw ConfigError("config: " + where + ".kind must be white-gaussian or band-limited");
        } else if (k == "band_hz") {
            if (!it->is_array() || it->size() != 2)
                throw ConfigError("config: " + where + ".band_hz must be [low, high]");
            s.band_low = num((*it)[0], where + ".band_hz[0]");
            s.band_high = num((*it)[1], where + ".band_hz[1]");
        } else if (k == "level_db") {
            s.level_db = num(*it, where + ".level_db");
        } else {
            bad_key(where, k);
        }
    }
    if (s.kind == NoiseSource::Kind::BandLimited && !(s.band_low < s.band_high))
        throw ConfigError("config: " + where + " is band-limited but has no band_hz");
    return s;
}

void parse_channel(ChannelProfile& c, TransmitterSpec& tx, bool& alpha_explicit, const json& j) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "distance_m") c.distance_m = num(*it, "channel.distance_m");
        else if (k == "path_loss_exponent") c.path_loss_exponent = num(*it, "channel.path_loss_exponent");
        else if (k == "attenuation_db_per_m") {
            if (it->is_number()) {
                c.attenuation = AttenuationCurve::constant(it->get<double>());
            } else if (it->is_array()) {
                AttenuationCurve curve;
                for (const auto& pt : *it) {
                    if (!pt.is_array() || pt.size() != 2)
                        throw ConfigError("config: channel.attenuation_db_per_m entries must be [hz, db_per_m]");
                    curve.points.emplace_back(num(pt[0], "channel.attenuation_db_per_m hz"),
                                              num(pt[1], "channel.attenuation_db_per_m value"));
                }
                for (size_t i = 1; i < curve.points.size(); ++i)
                    if (curve.points[i].first <= curve.points[i - 1].first)
                        throw ConfigError("config: channel.attenuation_db_per_m points must ascend in hz");
                c.attenuation = curve;
            } else {
                throw ConfigError("config: channel.attenuation_db_per_m must be a number or [[hz, db_per_m], ...]");
            }
        }
        else if (k == "alpha_ref_hz") { c.alpha_ref_hz = num(*it, "channel.alpha_ref_hz"); alpha_explicit = true; }
        else if (k == "occlusion") {
            if (!it->is_string())
                throw ConfigError("config: channel.occlusion must be a string");
            c.occlusion = occlusion_from_string(it->get<std::string>());
        }
        else if (k == "sample_occlusion") c.sample_occlusion = boolean(*it, "channel.sample_occlusion");
        else if (k == "los_baseline_loss") c.los_baseline_loss = boolean(*it, "channel.los_baseline_loss");
        else if (k == "orientation_deg") c.orientation_deg = num(*it, "channel.orientation_deg");
        else if (k == "orientation_table_db") {
            if (!it->is_array() || it->size() != 8)
                throw ConfigError("config: channel.orientation_table_db must hold 8 gains (0,45,...,315 deg)");
            for (size_t i = 0; i < 8; ++i)
                c.orientation_table.gains_db[i] = num((*it)[i], "channel.orientation_table_db");
        }
        else if (k == "doppler_offset_hz") c.doppler_offset_hz = num(*it, "channel.doppler_offset_hz");
        else if (k == "seed") {
            if (!it->is_number_unsigned() && !it->is_number_integer())
                throw ConfigError("config: channel.seed must be an integer");
            c.seed = it->get<uint64_t>();
        }
        else if (k == "noise") {
            if (!it->is_array())
                throw ConfigError("config: channel.noise must be an array of sources");
            c.noise.clear();
            for (size_t i = 0; i < it->size(); ++i)
                c.noise.push_back(parse_noise_source((*it)[i], i));
        }
        else if (k == "noise_ref_band_hz") {
            if (!it->is_array() || it->size() != 2)
                throw ConfigError("config: channel.noise_ref_band_hz must be [low, high]");
            c.noise_ref_low_hz = num((*it)[0], "channel.noise_ref_band_hz[0]");
            c.noise_ref_high_hz = num((*it)[1], "channel.noise_ref_band_hz[1]");
        }
        else if (k == "tx_power_db") tx.power_db = num(*it, "channel.tx_power_db");
        else if (k == "tx_kind") {
            if (!it->is_string())
                throw ConfigError("config: channel.tx_kind must be a string");
            tx.kind = transmitter_kind_from_string(it->get<std::string>());
        }
        else bad_key("channel", k);
    }
}

void parse_receiver(ReceiverConfig& r, const json& j) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "fft_size") {
            double v = num(*it, "receiver.fft_size");
            r.fft_size = static_cast<size_t>(v);
        }
        else if (k == "hop") r.hop = static_cast<size_t>(num(*it, "receiver.hop"));
        else if (k == "classify_tolerance_hz") r.classify_tolerance_hz = num(*it, "receiver.classify_tolerance_hz");
        else if (k == "noise_estimate_duration_s") r.noise_estimate_duration = num(*it, "receiver.noise_estimate_duration_s");
        else if (k == "kalman_process_var") r.kalman_process_var = num(*it, "receiver.kalman_process_var");
        else if (k == "kalman_measurement_var") r.kalman_measurement_var = num(*it, "receiver.kalman_measurement_var");
        else if (k == "filter_order") r.filter_order = static_cast<int>(num(*it, "receiver.filter_order"));
        else if (k == "peak_floor_db") r.peak_floor_db = num(*it, "receiver.peak_floor_db");
        else bad_key("receiver", k);
    }
}

} // namespace

void ToolConfig::finalize() {
    receiver.modem = modem;
    if (!alpha_ref_explicit)
        channel.alpha_ref_hz = modem.midpoint_hz();
}

void merge_config_json(ToolConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object())
        throw ConfigError("config: top level must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "modem") parse_modem(cfg.modem, *it);
        else if (k == "channel") parse_channel(cfg.channel, cfg.tx, cfg.alpha_ref_explicit, *it);
        else if (k == "receiver") parse_receiver(cfg.receiver, *it);
        else bad_key("(top level)", k);
    }
    cfg.finalize();
}

ToolConfig config_from_json(const nlohmann::json& j) {
    ToolConfig cfg;
    merge_config_json(cfg, j);
    return cfg;
}

ToolConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw IoError("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: malformed JSON in '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

nlohmann::ordered_json config_to_json(const ToolConfig& cfg) {
    nlohmann::ordered_json j;
    j["modem"] = {
        {"f0_hz", cfg.modem.f0},
        {"f1_hz", cfg.modem.f1},
        {"symbol_duration_s", cfg.modem.symbol_duration},
        {"sample_rate_hz", cfg.modem.sample_rate},
        {"band_low_hz", cfg.modem.band_low},
        {"band_high_hz", cfg.modem.band_high},
        {"amplitude", cfg.modem.amplitude},
        {"ramp_duration_s", cfg.modem.ramp_duration},
    };
    nlohmann::ordered_json atten = nlohmann::ordered_json::array();
    for (const auto& pt : cfg.channel.attenuation.points)
        atten.push_back({pt.first, pt.second});
    nlohmann::ordered_json noise = nlohmann::ordered_json::array();
    for (const NoiseSource& s : cfg.channel.noise) {
        nlohmann::ordered_json src;
        src["kind"] = s.kind == NoiseSource::Kind::WhiteGaussian ? "white-gaussian" : "band-limited";
        if (s.kind == NoiseSource::Kind::BandLimited)
            src["band_hz"] = {s.band_low, s.band_high};
        src["level_db"] = s.level_db;
        noise.push_back(src);
    }
    j["channel"] = {
        {"distance_m", cfg.channel.distance_m},
        {"path_loss_exponent", cfg.channel.path_loss_exponent},
        {"attenuation_db_per_m", atten},
        {"alpha_ref_hz", cfg.channel.alpha_ref_hz},
        {"occlusion", to_string(cfg.channel.occlusion)},
        {"sample_occlusion", cfg.channel.sample_occlusion},
        {"los_baseline_loss", cfg.channel.los_baseline_loss},
        {"orientation_deg", cfg.channel.orientation_deg},
        {"orientation_table_db", cfg.channel.orientation_table.gains_db},
        {"doppler_offset_hz", cfg.channel.doppler_offset_hz},
        {"seed", cfg.channel.seed},
        {"noise", noise},
        {"noise_ref_band_hz", {cfg.channel.noise_ref_low_hz, cfg.channel.noise_ref_high_hz}},
        {"tx_power_db", cfg.tx.power_db},
        {"tx_kind", to_string(cfg.tx.kind)},
    };
    j["receiver"] = {
        {"fft_size", cfg.receiver.resolved_fft_size()},
        {"hop", cfg.receiver.resolved_hop()},
        {"classify_tolerance_hz", cfg.receiver.classify_tolerance_hz},
        {"noise_estimate_duration_s", cfg.receiver.noise_estimate_duration},
        {"kalman_process_var", cfg.receiver.kalman_process_var},
        {"kalman_measurement_var", cfg.receiver.kalman_measurement_var},
        {"filter_order", cfg.receiver.filter_order},
        {"peak_floor_db", cfg.receiver.peak_floor_db},
    };
    return j;
}

} // namespace ultrafsk
