// Command line front end: encode / decode / channel / ber-curve / sweep /
// detect / spectrogram. Exit codes: 0 success, 2 bad configuration or usage,
// 3 file trouble, 4 nothing found (no payloads, no detections).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ultrafsk/analysis.hpp"
#include "ultrafsk/channel.hpp"
#include "ultrafsk/config.hpp"
#include "ultrafsk/demodulator.hpp"
#include "ultrafsk/errors.hpp"
#include "ultrafsk/frame.hpp"
#include "ultrafsk/modulator.hpp"
#include "ultrafsk/render.hpp"
#include "ultrafsk/rng.hpp"
#include "ultrafsk/wav.hpp"

using namespace ultrafsk;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kLeadInSeconds = 0.5;   // silence ahead of the first frame
constexpr double kFrameGapSeconds = 0.1; // between frames and after the last

// ------------------------------------------------------------------ helpers

std::vector<uint8_t> parse_hex_bytes(const std::string& hex) {
    std::string clean;
    for (char c : hex)
        if (!std::isspace(static_cast<unsigned char>(c)))
            clean.push_back(c);
    if (clean.size() % 2 != 0)
        throw ConfigError("hex payload must have an even number of digits");
    std::vector<uint8_t> out;
    for (size_t i = 0; i < clean.size(); i += 2) {
        auto nib = [&](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            throw ConfigError(std::string("bad hex digit '") + c + "'");
        };
        out.push_back(static_cast<uint8_t>(nib(clean[i]) * 16 + nib(clean[i + 1])));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::string cur;
    auto flush = [&]() {
        if (cur.empty())
            throw ConfigError(std::string("empty entry in ") + what);
        try {
            out.push_back(std::stod(cur));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse '" + cur + "' in " + what);
        }
        cur.clear();
    };
    for (char c : text) {
        if (c == ',')
            flush();
        else if (!std::isspace(static_cast<unsigned char>(c)))
            cur.push_back(c);
    }
    flush();
    return out;
}

// "18000-18500,18500-19000" -> [(18000,18500), (18500,19000)]
std::vector<std::pair<double, double>> parse_band_list(const std::string& text) {
    std::vector<std::pair<double, double>> out;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t comma = text.find(',', pos);
        std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                       : comma - pos);
        size_t dash = item.find('-', 1); // skip a possible leading sign
        if (dash == std::string::npos)
            throw ConfigError("band '" + item + "' must look like LOW-HIGH");
        try {
            out.emplace_back(std::stod(item.substr(0, dash)), std::stod(item.substr(dash + 1)));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse band '" + item + "'");
        }
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    if (out.empty())
        throw ConfigError("no bands given");
    return out;
}

std::string hex4(uint16_t v) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%04X", v);
    return buf;
}

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

Waveform silence(double duration_s, double fs) {
    Waveform w;
    w.sample_rate = fs;
    w.samples.assign(static_cast<size_t>(std::llround(duration_s * fs)), 0.0);
    return w;
}

void append(Waveform& acc, const Waveform& part) {
    acc.samples.insert(acc.samples.end(), part.samples.begin(), part.samples.end());
}

Waveform render_message(const std::vector<uint16_t>& payloads, const ModemConfig& modem) {
    Waveform out = silence(kLeadInSeconds, modem.sample_rate);
    for (size_t i = 0; i < payloads.size(); ++i) {
        if (i > 0)
            append(out, silence(kFrameGapSeconds, modem.sample_rate));
        append(out, modulate(build_frame(payloads[i]), modem));
    }
    append(out, silence(kFrameGapSeconds, modem.sample_rate));
    return out;
}

// -------------------------------------------------------------- config flow

// Base configuration: --config beats ULTRAFSK_CONFIG beats defaults.
ToolConfig base_config(const std::string& config_path) {
    if (!config_path.empty())
        return load_config_file(config_path);
    if (const char* env = std::getenv(kConfigEnvVar); env && *env)
        return load_config_file(env);
    ToolConfig cfg;
    cfg.finalize();
    return cfg;
}

void write_manifest(const std::string& primary_out, const std::string& command,
                    const ToolConfig& cfg, uint64_t seed,
                    const std::vector<std::string>& outputs,
                    const ordered_json& results = ordered_json::object()) {
    ordered_json m;
    m["command"] = command;
    m["tool_version"] = kVersion;
    m["seed"] = seed;
    m["outputs"] = outputs;
    if (!results.empty())
        m["results"] = results;
    m["config_resolved"] = config_to_json(cfg);
    std::string path = primary_out + ".manifest.json";
    std::ofstream f(path, std::ios::trunc);
    if (!f)
        throw IoError("cannot write manifest '" + path + "'");
    f << m.dump(2) << "\n";
    if (!f)
        throw IoError("short write to manifest '" + path + "'");
}

// ------------------------------------------------------------- subcommands

struct EncodeArgs {
    std::string config, message, hex, out;
    double bit_rate = 0.0, symbol_duration = 0.0, amplitude = 0.0;
    double f0 = 0.0, f1 = 0.0, ramp = 0.0, sample_rate = 0.0;
    CLI::App* cmd = nullptr;
};

int run_encode(const EncodeArgs& a) {
    ToolConfig cfg = base_config(a.config);
    json over;
    if (a.cmd->count("--bit-rate")) over["modem"]["bit_rate_bps"] = a.bit_rate;
    if (a.cmd->count("--symbol-duration")) over["modem"]["symbol_duration_s"] = a.symbol_duration;
    if (a.cmd->count("--amplitude")) over["modem"]["amplitude"] = a.amplitude;
    if (a.cmd->count("--f0")) over["modem"]["f0_hz"] = a.f0;
    if (a.cmd->count("--f1")) over["modem"]["f1_hz"] = a.f1;
    if (a.cmd->count("--ramp-duration")) over["modem"]["ramp_duration_s"] = a.ramp;
    if (a.cmd->count("--sample-rate")) over["modem"]["sample_rate_hz"] = a.sample_rate;
    if (!over.empty())
        merge_config_json(cfg, over);

    std::vector<uint8_t> bytes;
    if (a.cmd->count("--hex"))
        bytes = parse_hex_bytes(a.hex);
    else if (a.cmd->count("--message"))
        bytes.assign(a.message.begin(), a.message.end());
    else
        throw ConfigError("encode needs --message or --hex");
    if (bytes.empty())
        throw ConfigError("nothing to encode");

    std::vector<uint16_t> payloads = payloads_from_bytes(bytes);
    Waveform w = render_message(payloads, cfg.modem);
    wav_write(a.out, w);
    write_manifest(a.out, "encode", cfg, cfg.channel.seed, {a.out});

    double dur = static_cast<double>(w.size()) / w.sample_rate;
    std::cout << "encoded " << payloads.size() << " frame(s), " << w.size()
              << " samples, " << fixed4(dur) << " s\n";
    for (uint16_t p : payloads)
        std::cout << "  payload 0x" << hex4(p) << "\n";
    return 0;
}

struct DecodeArgs {
    std::string config, in, report, truth;
    double bit_rate = 0.0, symbol_duration = 0.0, tolerance = 0.0;
    size_t fft = 0, hop = 0;
    CLI::App* cmd = nullptr;
};

int run_decode(const DecodeArgs& a) {
    ToolConfig cfg = base_config(a.config);
    json over;
    if (a.cmd->count("--bit-rate")) over["modem"]["bit_rate_bps"] = a.bit_rate;
    if (a.cmd->count("--symbol-duration")) over["modem"]["symbol_duration_s"] = a.symbol_duration;
    if (a.cmd->count("--fft-size")) over["receiver"]["fft_size"] = a.fft;
    if (a.cmd->count("--hop")) over["receiver"]["hop"] = a.hop;
    if (a.cmd->count("--tolerance")) over["receiver"]["classify_tolerance_hz"] = a.tolerance;
    if (!over.empty())
        merge_config_json(cfg, over);

    Waveform w = wav_read(a.in);
    if (w.sample_rate != cfg.modem.sample_rate) {
        cfg.modem.sample_rate = w.sample_rate; // 44100 in, keep symbol timing
        cfg.finalize();
    }
    DecodeReport rep = decode(w, cfg.receiver);

    ordered_json out;
    out["input"] = a.in;
    ordered_json hexes = ordered_json::array();
    for (uint16_t p : rep.payloads)
        hexes.push_back(hex4(p));
    out["payloads_hex"] = hexes;
    out["sync_offset_samples"] = rep.sync_offset_samples;
    out["align_offset_frames"] = rep.align_offset_frames;
    out["estimated_snr_db"] = rep.estimated_snr_db;
    out["symbols"] = rep.symbols.size();
    ordered_json errs = ordered_json::array();
    for (const IntegrityFailure& e : rep.errors) {
        ordered_json one;
        one["symbol_index"] = e.symbol_index;
        one["kind"] = e.erasure                            ? "erasure"
                      : e.error == FrameError::BadPreamble ? "bad-preamble"
                                                           : "bad-crc";
        errs.push_back(one);
    }
    out["errors"] = errs;
    if (a.cmd->count("--truth")) {
        std::vector<uint16_t> truth = payloads_from_bytes(parse_hex_bytes(a.truth));
        out["truth_hex"] = a.truth;
        out["message_ber"] = message_ber(truth, rep.payloads);
    }

    std::cout << out.dump(2) << "\n";
    if (a.cmd->count("--report")) {
        std::ofstream f(a.report, std::ios::trunc);
        if (!f)
            throw IoError("cannot write report '" + a.report + "'");
        f << out.dump(2) << "\n";
        write_manifest(a.report, "decode", cfg, cfg.channel.seed, {a.report});
    }
    return rep.payloads.empty() ? 4 : 0;
}

struct ChannelArgs {
    std::string config, in, out, occlusion, tx_kind;
    double distance = 0.0, exponent = 0.0, attenuation = 0.0, alpha_ref = 0.0;
    double orientation = 0.0, doppler = 0.0, noise_level = 0.0, tx_power = 0.0;
    uint64_t seed = 0;
    bool sample_occ = false, los_baseline = false;
    CLI::App* cmd = nullptr;
};

int run_channel(const ChannelArgs& a) {
    ToolConfig cfg = base_config(a.config);
    json over;
    auto& ch = over["channel"];
    if (a.cmd->count("--distance")) ch["distance_m"] = a.distance;
    if (a.cmd->count("--path-loss-exponent")) ch["path_loss_exponent"] = a.exponent;
    if (a.cmd->count("--attenuation")) ch["attenuation_db_per_m"] = a.attenuation;
    if (a.cmd->count("--alpha-ref")) ch["alpha_ref_hz"] = a.alpha_ref;
    if (a.cmd->count("--occlusion")) ch["occlusion"] = a.occlusion;
    if (a.cmd->count("--sample-occlusion")) ch["sample_occlusion"] = true;
    if (a.cmd->count("--los-baseline-loss")) ch["los_baseline_loss"] = true;
    if (a.cmd->count("--orientation")) ch["orientation_deg"] = a.orientation;
    if (a.cmd->count("--doppler")) ch["doppler_offset_hz"] = a.doppler;
    if (a.cmd->count("--seed")) ch["seed"] = a.seed;
    if (a.cmd->count("--noise-level"))
        ch["noise"] = json::array({{{"kind", "white-gaussian"}, {"level_db", a.noise_level}}});
    if (a.cmd->count("--tx-power")) ch["tx_power_db"] = a.tx_power;
    if (a.cmd->count("--tx-kind")) ch["tx_kind"] = a.tx_kind;
    if (!ch.is_null())
        merge_config_json(cfg, over);

    Waveform w = wav_read(a.in);
    ChannelResult res = apply_channel(w, cfg.channel, cfg.tx);
    wav_write(a.out, res.output);

    ordered_json results;
    results["gain_db"] = res.gain_db;
    results["occlusion_penalty_db"] = res.occlusion_penalty_db;
    results["received_level_db"] = res.received_level_db;
    results["clipped_samples"] = res.clipped_samples;
    write_manifest(a.out, "channel", cfg, cfg.channel.seed, {a.out}, results);

    std::cout << "gain " << fixed4(res.gain_db) << " dB, received level "
              << fixed4(res.received_level_db) << " dB, " << res.clipped_samples
              << " clipped sample(s)\n";
    return 0;
}

struct BerCurveArgs {
    std::string config, rates = "5,20,50", distances = "1,2,3,4,5,6,7,8,9", out;
    int trials = 200;
    uint64_t seed = 1;
    double noise_level = -30.0;
    CLI::App* cmd = nullptr;
};

int run_ber_curve(const BerCurveArgs& a) {
    ToolConfig cfg = base_config(a.config);
    std::vector<double> rates = parse_double_list(a.rates, "--rates");
    std::vector<double> dists = parse_double_list(a.distances, "--distances");
    if (a.trials <= 0)
        throw ConfigError("--trials must be positive");

    // Monte Carlo needs a noise floor to be meaningful; inject one if the
    // profile has none.
    ChannelProfile base = cfg.channel;
    if (base.noise.empty() || a.cmd->count("--noise-level")) {
        NoiseSource n;
        n.level_db = a.noise_level;
        base.noise.assign(1, n);
    }

    std::string csv = "distance_m,bit_rate_bps,trials,ber,snr_db\n";
    size_t cell_index = 0;
    for (double d : dists) {
        for (double rate : rates) {
            ReceiverConfig rx = cfg.receiver;
            rx.modem.symbol_duration = bit_rate_to_symbol_duration(rate, rx.modem.sample_rate);

            uint64_t cell_seed = splitmix64(a.seed ^ static_cast<uint64_t>(cell_index));
            size_t bit_errors = 0;
            double snr_db = 0.0;
            for (int t = 0; t < a.trials; ++t) {
                uint64_t trial_seed = splitmix64(cell_seed + static_cast<uint64_t>(t));
                Rng rng(trial_seed);
                auto payload = static_cast<uint16_t>(rng.integer(65536));

                Waveform tx = silence(kLeadInSeconds, rx.modem.sample_rate);
                append(tx, modulate(build_frame(payload), rx.modem));

                ChannelProfile p = base;
                p.distance_m = d;
                p.seed = trial_seed;
                ChannelResult res = apply_channel(tx, p, cfg.tx);
                if (t == 0)
                    snr_db = snr_inband(res.output, rx.modem);

                DecodeReport rep = decode(res.output, rx);
                double mb = message_ber({payload}, rep.payloads);
                bit_errors += static_cast<size_t>(std::llround(mb * 16.0));
            }
            double cell_ber = static_cast<double>(bit_errors) /
                              (16.0 * static_cast<double>(a.trials));
            csv += fixed4(d);
            csv += ",";
            csv += fixed4(rate);
            csv += ",";
            csv += std::to_string(a.trials);
            csv += ",";
            csv += fixed4(cell_ber);
            csv += ",";
            csv += fixed4(snr_db);
            csv += "\n";
            std::cout << "distance " << d << " m, " << rate << " bps: ber "
                      << fixed4(cell_ber) << ", snr " << fixed4(snr_db) << " dB\n";
            ++cell_index;
        }
    }

    std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot write '" + a.out + "'");
    f << csv;
    if (!f)
        throw IoError("short write to '" + a.out + "'");
    ToolConfig used = cfg;
    used.channel = base;
    write_manifest(a.out, "ber-curve", used, a.seed, {a.out});
    return 0;
}

struct SweepArgs {
    std::string config, preset, bands, distances, out;
    double duration = 1.0;
    uint64_t seed = 0;
    CLI::App* cmd = nullptr;
};

int run_sweep(const SweepArgs& a) {
    ToolConfig cfg = base_config(a.config);
    std::vector<std::pair<double, double>> bands;
    std::vector<double> dists;
    if (a.cmd->count("--preset")) {
        if (a.preset == "low3") {
            bands = {{18000.0, 18500.0}, {18500.0, 19000.0}, {19000.0, 19500.0}};
            dists = {1, 2, 3, 4, 5, 6, 7, 8, 9};
        } else if (a.preset == "steps7") {
            for (int i = 0; i < 7; ++i)
                bands.emplace_back(18000.0 + 500.0 * i, 18500.0 + 500.0 * i);
            dists = {1, 4};
        } else {
            throw ConfigError("unknown preset '" + a.preset + "' (low3 or steps7)");
        }
    } else if (!a.cmd->count("--bands") || !a.cmd->count("--distances")) {
        throw ConfigError("sweep needs --preset or both --bands and --distances");
    }
    // explicit flags override the preset's grid
    if (a.cmd->count("--bands"))
        bands = parse_band_list(a.bands);
    if (a.cmd->count("--distances"))
        dists = parse_double_list(a.distances, "--distances");

    ChannelProfile base = cfg.channel;
    if (a.cmd->count("--seed"))
        base.seed = a.seed;
    if (base.noise.empty()) {
        NoiseSource n;
        n.level_db = -30.0;
        base.noise.push_back(n);
    }

    SweepReport rep = sweep_characterize(cfg.modem, base, cfg.tx, bands, dists, a.duration);
    std::string csv = "band_low_hz,band_high_hz,distance_m,snr_db\n";
    for (const SweepRow& row : rep) {
        csv += fixed4(row.band_low_hz);
        csv += ",";
        csv += fixed4(row.band_high_hz);
        csv += ",";
        csv += fixed4(row.distance_m);
        csv += ",";
        csv += fixed4(row.snr_db);
        csv += "\n";
    }
    std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot write '" + a.out + "'");
    f << csv;
    if (!f)
        throw IoError("short write to '" + a.out + "'");
    ToolConfig used = cfg;
    used.channel = base;
    write_manifest(a.out, "sweep", used, base.seed, {a.out});
    std::cout << rep.size() << " row(s) written to " << a.out << "\n";
    return 0;
}

struct DetectArgs {
    std::string config, in, band, out;
    double threshold = 12.0;
    size_t fft = 2048, hop = 512;
    CLI::App* cmd = nullptr;
};

int run_detect(const DetectArgs& a) {
    ToolConfig cfg = base_config(a.config);
    std::pair<double, double> band = {cfg.modem.band_low, cfg.modem.band_high};
    if (a.cmd->count("--band")) {
        std::vector<double> v = parse_double_list(a.band, "--band");
        if (v.size() != 2)
            throw ConfigError("--band needs LOW,HIGH");
        band = {v[0], v[1]};
    }

    Waveform w = wav_read(a.in);
    std::vector<Detection> dets = detect_ultrasonic(w, band, a.threshold, a.fft, a.hop);

    ordered_json out = ordered_json::array();
    for (const Detection& d : dets) {
        ordered_json one;
        one["t_start_s"] = d.t_start_s;
        one["t_end_s"] = d.t_end_s;
        one["peak_hz"] = d.peak_hz;
        out.push_back(one);
    }
    std::cout << out.dump(2) << "\n";
    if (a.cmd->count("--out")) {
        std::ofstream f(a.out, std::ios::trunc);
        if (!f)
            throw IoError("cannot write '" + a.out + "'");
        f << out.dump(2) << "\n";
        write_manifest(a.out, "detect", cfg, cfg.channel.seed, {a.out});
    }
    return dets.empty() ? 4 : 0;
}

struct SpectrogramArgs {
    std::string config, in, out, csv;
    size_t fft = 2048, hop = 512;
    CLI::App* cmd = nullptr;
};

int run_spectrogram(const SpectrogramArgs& a) {
    ToolConfig cfg = base_config(a.config);
    Waveform w = wav_read(a.in);
    Spectrogram sg = spectrogram(w, a.fft, a.hop);
    write_spectrogram_bmp(sg, a.out);
    std::vector<std::string> outputs = {a.out};
    if (a.cmd->count("--csv")) {
        write_spectrogram_csv(sg, a.csv);
        outputs.push_back(a.csv);
    }
    write_manifest(a.out, "spectrogram", cfg, cfg.channel.seed, outputs);
    std::cout << sg.magnitudes_db.size() << " frames x "
              << (sg.magnitudes_db.empty() ? 0 : sg.magnitudes_db[0].size())
              << " bins -> " << a.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ultrasonic B-FSK modem and acoustic channel workbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    EncodeArgs enc;
    enc.cmd = app.add_subcommand("encode", "render a message to a WAV transmission");
    enc.cmd->add_option("--config", enc.config, "JSON config file");
    enc.cmd->add_option("--message", enc.message, "text payload");
    enc.cmd->add_option("--hex", enc.hex, "hex payload bytes");
    enc.cmd->add_option("--out", enc.out, "output WAV path")->required();
    enc.cmd->add_option("--bit-rate", enc.bit_rate, "bits per second");
    enc.cmd->add_option("--symbol-duration", enc.symbol_duration, "seconds per symbol");
    enc.cmd->add_option("--amplitude", enc.amplitude, "carrier amplitude [0,1]");
    enc.cmd->add_option("--f0", enc.f0, "bit-0 carrier (Hz)");
    enc.cmd->add_option("--f1", enc.f1, "bit-1 carrier (Hz)");
    enc.cmd->add_option("--ramp-duration", enc.ramp, "raised-cosine ramp (s)");
    enc.cmd->add_option("--sample-rate", enc.sample_rate, "sample rate (Hz)");

    DecodeArgs dec;
    dec.cmd = app.add_subcommand("decode", "demodulate a WAV recording");
    dec.cmd->add_option("--config", dec.config, "JSON config file");
    dec.cmd->add_option("--in", dec.in, "input WAV path")->required();
    dec.cmd->add_option("--report", dec.report, "also write the JSON report here");
    dec.cmd->add_option("--truth", dec.truth, "expected payload bytes (hex) for BER");
    dec.cmd->add_option("--bit-rate", dec.bit_rate, "bits per second");
    dec.cmd->add_option("--symbol-duration", dec.symbol_duration, "seconds per symbol");
    dec.cmd->add_option("--fft-size", dec.fft, "analysis FFT size");
    dec.cmd->add_option("--hop", dec.hop, "analysis hop (samples)");
    dec.cmd->add_option("--tolerance", dec.tolerance, "classify tolerance (Hz)");

    ChannelArgs cha;
    cha.cmd = app.add_subcommand("channel", "push a WAV through the simulated channel");
    cha.cmd->add_option("--config", cha.config, "JSON config file");
    cha.cmd->add_option("--in", cha.in, "input WAV path")->required();
    cha.cmd->add_option("--out", cha.out, "output WAV path")->required();
    cha.cmd->add_option("--distance", cha.distance, "distance (m)");
    cha.cmd->add_option("--path-loss-exponent", cha.exponent, "spreading exponent");
    cha.cmd->add_option("--attenuation", cha.attenuation, "absorption (dB/m)");
    cha.cmd->add_option("--alpha-ref", cha.alpha_ref, "absorption eval frequency (Hz)");
    cha.cmd->add_option("--occlusion", cha.occlusion,
                        "line-of-sight | partial | complete");
    cha.cmd->add_flag("--sample-occlusion", cha.sample_occ, "sample the penalty range");
    cha.cmd->add_flag("--los-baseline-loss", cha.los_baseline,
                      "2-5 dB baseline loss when unoccluded");
    cha.cmd->add_option("--orientation", cha.orientation, "facing angle (deg)");
    cha.cmd->add_option("--doppler", cha.doppler, "carrier offset (Hz)");
    cha.cmd->add_option("--noise-level", cha.noise_level,
                        "white noise level (dB rel. in-band signal)");
    cha.cmd->add_option("--seed", cha.seed, "noise seed");
    cha.cmd->add_option("--tx-power", cha.tx_power, "transmit level (dB)");
    cha.cmd->add_option("--tx-kind", cha.tx_kind,
                        "active-speaker | passive-speaker | laptop");

    BerCurveArgs berc;
    berc.cmd = app.add_subcommand("ber-curve", "Monte Carlo BER over a rate/distance grid");
    berc.cmd->add_option("--config", berc.config, "JSON config file");
    berc.cmd->add_option("--rates", berc.rates, "bit rates, comma separated (bps)");
    berc.cmd->add_option("--distances", berc.distances, "distances, comma separated (m)");
    berc.cmd->add_option("--trials", berc.trials, "frames per cell");
    berc.cmd->add_option("--seed", berc.seed, "base seed");
    berc.cmd->add_option("--noise-level", berc.noise_level, "white noise level (dB)");
    berc.cmd->add_option("--out", berc.out, "output CSV path")->required();

    SweepArgs swp;
    swp.cmd = app.add_subcommand("sweep", "band/distance SNR characterization");
    swp.cmd->add_option("--config", swp.config, "JSON config file");
    swp.cmd->add_option("--preset", swp.preset, "low3 | steps7");
    swp.cmd->add_option("--bands", swp.bands, "LOW-HIGH pairs, comma separated (Hz)");
    swp.cmd->add_option("--distances", swp.distances, "distances, comma separated (m)");
    swp.cmd->add_option("--duration", swp.duration, "probe length per cell (s)");
    swp.cmd->add_option("--seed", swp.seed, "noise seed");
    swp.cmd->add_option("--out", swp.out, "output CSV path")->required();

    DetectArgs det;
    det.cmd = app.add_subcommand("detect", "find ultrasonic activity in a recording");
    det.cmd->add_option("--config", det.config, "JSON config file");
    det.cmd->add_option("--in", det.in, "input WAV path")->required();
    det.cmd->add_option("--band", det.band, "LOW,HIGH (Hz); default modem band");
    det.cmd->add_option("--threshold", det.threshold, "dB above median to trigger");
    det.cmd->add_option("--fft", det.fft, "FFT size");
    det.cmd->add_option("--hop", det.hop, "hop (samples)");
    det.cmd->add_option("--out", det.out, "also write detections JSON here");

    SpectrogramArgs spg;
    spg.cmd = app.add_subcommand("spectrogram", "render a recording to BMP/CSV");
    spg.cmd->add_option("--config", spg.config, "JSON config file");
    spg.cmd->add_option("--in", spg.in, "input WAV path")->required();
    spg.cmd->add_option("--out", spg.out, "output BMP path")->required();
    spg.cmd->add_option("--csv", spg.csv, "also write the magnitude grid as CSV");
    spg.cmd->add_option("--fft", spg.fft, "FFT size");
    spg.cmd->add_option("--hop", spg.hop, "hop (samples)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (enc.cmd->parsed()) return run_encode(enc);
        if (dec.cmd->parsed()) return run_decode(dec);
        if (cha.cmd->parsed()) return run_channel(cha);
        if (berc.cmd->parsed()) return run_ber_curve(berc);
        if (swp.cmd->parsed()) return run_sweep(swp);
        if (det.cmd->parsed()) return run_detect(det);
        if (spg.cmd->parsed()) return run_spectrogram(spg);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2; // no subcommand (require_subcommand should have caught this)
}
