#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ultrafsk/channel.hpp"
#include "ultrafsk/demodulator.hpp"
#include "ultrafsk/frame.hpp"
#include "ultrafsk/modulator.hpp"
#include "ultrafsk/wav.hpp"

using namespace ultrafsk;

namespace {

Waveform silence(double duration_s, double fs) {
    Waveform w;
    w.sample_rate = fs;
    w.samples.assign(static_cast<size_t>(std::llround(duration_s * fs)), 0.0);
    return w;
}

void append(Waveform& acc, const Waveform& part) {
    acc.samples.insert(acc.samples.end(), part.samples.begin(), part.samples.end());
}

// lead-in for the noise estimator, frames separated by short gaps
Waveform encode_message(const std::vector<uint16_t>& payloads, const ModemConfig& cfg) {
    Waveform out = silence(0.5, cfg.sample_rate);
    for (size_t i = 0; i < payloads.size(); ++i) {
        if (i > 0)
            append(out, silence(0.1, cfg.sample_rate));
        append(out, modulate(build_frame(payloads[i]), cfg));
    }
    append(out, silence(0.1, cfg.sample_rate));
    return out;
}

} // namespace

TEST_CASE("transmit through a quiet room and read it back") {
    ReceiverConfig rx;
    ChannelProfile room;
    room.distance_m = 2.0;
    room.orientation_deg = 180.0;
    NoiseSource hiss;
    hiss.level_db = -30.0;
    room.noise.push_back(hiss);
    room.seed = 2024;

    Waveform tx = encode_message({0xBEEF}, rx.modem);
    ChannelResult res = apply_channel(tx, room, TransmitterSpec{});
    DecodeReport rep = decode(res.output, rx);
    REQUIRE(rep.payloads.size() == 1);
    CHECK(rep.payloads[0] == 0xBEEF);
    // estimated SNR should be in a plausible window for this geometry
    CHECK(rep.estimated_snr_db > 10.0);
    CHECK(rep.estimated_snr_db < 60.0);
}

TEST_CASE("a multi-frame text message survives the full chain") {
    std::vector<uint8_t> text = {'H', 'E', 'L', 'L', 'O', '!'};
    std::vector<uint16_t> payloads = payloads_from_bytes(text);
    REQUIRE(payloads.size() == 3);

    ReceiverConfig rx;
    ChannelProfile room;
    room.distance_m = 1.0;
    room.orientation_deg = 180.0;
    NoiseSource hiss;
    hiss.level_db = -35.0;
    room.noise.push_back(hiss);
    room.seed = 7;

    Waveform tx = encode_message(payloads, rx.modem);
    ChannelResult res = apply_channel(tx, room, TransmitterSpec{});
    DecodeReport rep = decode(res.output, rx);
    REQUIRE(rep.payloads == payloads);
    CHECK(bytes_from_payloads(rep.payloads) == text);
}

TEST_CASE("the chain is deterministic end to end") {
    ReceiverConfig rx;
    ChannelProfile room;
    room.distance_m = 3.0;
    room.orientation_deg = 180.0;
    NoiseSource hiss;
    hiss.level_db = -25.0;
    room.noise.push_back(hiss);
    room.seed = 99;

    Waveform tx = encode_message({0x1234, 0xABCD}, rx.modem);
    ChannelResult a = apply_channel(tx, room, TransmitterSpec{});
    ChannelResult b = apply_channel(tx, room, TransmitterSpec{});
    REQUIRE(a.output.size() == b.output.size());
    for (size_t i = 0; i < a.output.size(); ++i)
        REQUIRE(a.output.samples[i] == b.output.samples[i]);

    DecodeReport ra = decode(a.output, rx);
    DecodeReport rb = decode(b.output, rx);
    CHECK(ra.payloads == rb.payloads);
    CHECK(ra.estimated_snr_db == rb.estimated_snr_db);
    CHECK(ra.sync_offset_samples == rb.sync_offset_samples);
}

TEST_CASE("amplitude ramps do not break decoding") {
    ReceiverConfig rx;
    rx.modem.ramp_duration = 0.005;
    Waveform tx = encode_message({0x0FF0}, rx.modem);
    DecodeReport rep = decode(tx, rx);
    REQUIRE(rep.payloads.size() == 1);
    CHECK(rep.payloads[0] == 0x0FF0);
}

TEST_CASE("the 44100 Hz path works end to end through a file") {
    ReceiverConfig rx;
    rx.modem.sample_rate = 44100.0; // 0.05 s -> 2205 samples per symbol
    Waveform tx = encode_message({0x5AA5}, rx.modem);

    std::string path = "/tmp/ultrafsk_test_cd_rate.wav";
    wav_write(path, tx);
    Waveform back = wav_read(path);
    std::remove(path.c_str());
    CHECK(back.sample_rate == 44100.0);

    DecodeReport rep = decode(back, rx);
    REQUIRE(rep.payloads.size() == 1);
    CHECK(rep.payloads[0] == 0x5AA5);
}

TEST_CASE("an occluded, misoriented link still demodulates when quiet") {
    ReceiverConfig rx = ReceiverConfig{};
    rx.modem.symbol_duration = 0.2; // slow and robust
    ChannelProfile rough;
    rough.distance_m = 4.0;
    rough.occlusion = Occlusion::Partial;
    rough.orientation_deg = 90.0; // -4 dB lobe
    NoiseSource hiss;
    hiss.level_db = -35.0;
    rough.noise.push_back(hiss);
    rough.seed = 5;

    Waveform tx = encode_message({0xCAFE}, rx.modem);
    ChannelResult res = apply_channel(tx, rough, TransmitterSpec{});
    DecodeReport rep = decode(res.output, rx);
    REQUIRE(rep.payloads.size() == 1);
    CHECK(rep.payloads[0] == 0xCAFE);
}
