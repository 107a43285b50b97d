#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ultrafsk/analysis.hpp"
#include "ultrafsk/errors.hpp"
#include "ultrafsk/render.hpp"
#include "ultrafsk/wav.hpp"

using namespace ultrafsk;

namespace {

std::string tmp_path(const std::string& name) {
    return std::string("/tmp/ultrafsk_test_") + name;
}

std::vector<uint8_t> slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    return std::vector<uint8_t>((std::istreambuf_iterator<char>(f)),
                                std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<long>(bytes.size()));
}

} // namespace

// ======================================================================= wav

TEST_CASE("wav survives a write/read round trip to 16-bit precision") {
    Waveform w;
    w.sample_rate = 48000.0;
    for (int i = 0; i < 4800; ++i)
        w.samples.push_back(0.7 * std::sin(2.0 * M_PI * 19000.0 * i / 48000.0));

    std::string path = tmp_path("roundtrip.wav");
    wav_write(path, w);
    Waveform back = wav_read(path);
    CHECK(back.sample_rate == 48000.0);
    REQUIRE(back.size() == w.size());
    // write scales by 32767, read divides by 32768: error <= (|s| + 1/2)/32768
    for (size_t i = 0; i < w.size(); ++i)
        CHECK(std::abs(back.samples[i] - w.samples[i]) <= 1.5 / 32768.0 + 1e-12);
    std::remove(path.c_str());
}

TEST_CASE("out-of-range samples refuse to serialize") {
    Waveform w;
    w.sample_rate = 48000.0;
    w.samples = {0.0, 0.5, 1.2, 0.1};
    CHECK_THROWS_AS(wav_write(tmp_path("clip.wav"), w), IoError);
    w.samples = {0.0, -1.0000001};
    CHECK_THROWS_AS(wav_write(tmp_path("clip.wav"), w), IoError);
    // exactly +-1 is legal
    w.samples = {1.0, -1.0};
    wav_write(tmp_path("edge.wav"), w);
    Waveform back = wav_read(tmp_path("edge.wav"));
    CHECK(back.samples[0] == doctest::Approx(32767.0 / 32768.0));
    std::remove(tmp_path("edge.wav").c_str());
}

TEST_CASE("44100 Hz files read back; other rates are refused") {
    Waveform w;
    w.sample_rate = 44100.0;
    w.samples.assign(4410, 0.25);
    std::string path = tmp_path("cd.wav");
    wav_write(path, w);
    Waveform back = wav_read(path);
    CHECK(back.sample_rate == 44100.0);
    std::remove(path.c_str());

    Waveform bad;
    bad.sample_rate = 8000.0;
    bad.samples.assign(800, 0.1);
    std::string badpath = tmp_path("telephone.wav");
    wav_write(badpath, bad); // writing is fine; reading back is not
    CHECK_THROWS_AS(wav_read(badpath), IoError);
    std::remove(badpath.c_str());
}

TEST_CASE("garbage and truncated files raise IoError") {
    std::string garbage = tmp_path("garbage.wav");
    spit(garbage, {'h', 'e', 'l', 'l', 'o', ' ', 'w', 'o', 'r', 'l', 'd', '!'});
    CHECK_THROWS_AS(wav_read(garbage), IoError);
    std::remove(garbage.c_str());

    // valid file cut mid-data
    Waveform w;
    w.sample_rate = 48000.0;
    w.samples.assign(1000, 0.3);
    std::string whole = tmp_path("whole.wav");
    wav_write(whole, w);
    std::vector<uint8_t> bytes = slurp(whole);
    bytes.resize(bytes.size() / 2);
    std::string cut = tmp_path("cut.wav");
    spit(cut, bytes);
    CHECK_THROWS_AS(wav_read(cut), IoError);
    std::remove(whole.c_str());
    std::remove(cut.c_str());

    CHECK_THROWS_AS(wav_read("/nonexistent/nope.wav"), IoError);
}

// ==================================================================== render

TEST_CASE("spectrogram renders to a plausible BMP and CSV") {
    Waveform w;
    w.sample_rate = 48000.0;
    for (int i = 0; i < 48000; ++i)
        w.samples.push_back(0.5 * std::sin(2.0 * M_PI * 19500.0 * i / 48000.0));
    Spectrogram sg = spectrogram(w, 1024, 256);

    std::string bmp = tmp_path("sg.bmp");
    write_spectrogram_bmp(sg, bmp);
    std::vector<uint8_t> bytes = slurp(bmp);
    REQUIRE(bytes.size() > 54);
    CHECK(bytes[0] == 'B');
    CHECK(bytes[1] == 'M');
    uint32_t file_size = static_cast<uint32_t>(bytes[2]) | (bytes[3] << 8) |
                         (bytes[4] << 16) | (static_cast<uint32_t>(bytes[5]) << 24);
    CHECK(file_size == bytes.size());
    std::remove(bmp.c_str());

    std::string csv = tmp_path("sg.csv");
    write_spectrogram_csv(sg, csv);
    std::ifstream f(csv);
    std::string header;
    REQUIRE(std::getline(f, header));
    CHECK(header.substr(0, 6) == "time_s");
    size_t rows = 0;
    std::string line;
    while (std::getline(f, line))
        if (!line.empty())
            ++rows;
    CHECK(rows == sg.magnitudes_db.size());
    std::remove(csv.c_str());
}

TEST_CASE("render failures surface as IoError") {
    Waveform w;
    w.sample_rate = 48000.0;
    w.samples.assign(4096, 0.1);
    Spectrogram sg = spectrogram(w, 1024, 256);
    CHECK_THROWS_AS(write_spectrogram_bmp(sg, "/nonexistent/dir/x.bmp"), IoError);
    CHECK_THROWS_AS(write_spectrogram_csv(sg, "/nonexistent/dir/x.csv"), IoError);
}
