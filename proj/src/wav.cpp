#include "ultrafsk/wav.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "ultrafsk/errors.hpp"

namespace ultrafsk {

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 24) & 0xFF));
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
}

void put_tag(std::vector<uint8_t>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

uint32_t read_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const uint8_t* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

} // namespace

void wav_write(const std::string& path, const Waveform& w) {
    if (!(w.sample_rate > 0.0))
        throw IoError("wav_write: sample rate must be positive");
    for (double s : w.samples)
        if (!(std::abs(s) <= 1.0))
            throw IoError("wav_write: sample out of range [-1, 1] — clipping is an error, "
                          "not saturation");

    uint32_t rate = static_cast<uint32_t>(std::llround(w.sample_rate));
    uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);

    std::vector<uint8_t> out;
    out.reserve(44 + data_bytes);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_bytes);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);       // PCM fmt chunk size
    put_u16(out, 1);        // PCM
    put_u16(out, 1);        // mono
    put_u32(out, rate);
    put_u32(out, rate * 2); // byte rate
    put_u16(out, 2);        // block align
    put_u16(out, 16);       // bits per sample
    put_tag(out, "data");
    put_u32(out, data_bytes);
    for (double s : w.samples) {
        int32_t v = static_cast<int32_t>(std::lround(s * 32767.0));
        auto pcm = static_cast<int16_t>(v);
        out.push_back(static_cast<uint8_t>(pcm & 0xFF));
        out.push_back(static_cast<uint8_t>((pcm >> 8) & 0xFF));
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("wav_write: cannot open '" + path + "' for writing");
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<long>(out.size()));
    if (!f)
        throw IoError("wav_write: short write to '" + path + "'");
}

Waveform wav_read(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("wav_read: cannot open '" + path + "'");
    std::vector<uint8_t> buf((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
    if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
        std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
        throw IoError("wav_read: '" + path + "' is not a RIFF/WAVE file");

    bool have_fmt = false;
    uint16_t channels = 0, bits = 0, format = 0;
    uint32_t rate = 0;
    size_t data_off = 0, data_len = 0;

    size_t pos = 12;
    while (pos + 8 <= buf.size()) {
        const uint8_t* hdr = buf.data() + pos;
        uint32_t chunk_len = read_u32(hdr + 4);
        size_t body = pos + 8;
        if (body + chunk_len > buf.size())
            throw IoError("wav_read: truncated chunk in '" + path + "'");
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (chunk_len < 16)
                throw IoError("wav_read: malformed fmt chunk");
            format = read_u16(buf.data() + body);
            channels = read_u16(buf.data() + body + 2);
            rate = read_u32(buf.data() + body + 4);
            bits = read_u16(buf.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            data_off = body;
            data_len = chunk_len;
        }
        pos = body + chunk_len + (chunk_len & 1); // chunks are word-aligned
    }

    if (!have_fmt || data_off == 0)
        throw IoError("wav_read: missing fmt or data chunk in '" + path + "'");
    if (format != 1 || bits != 16 || channels != 1)
        throw IoError("wav_read: unsupported format in '" + path +
                      "' (need mono 16-bit PCM)");
    if (rate != 48000 && rate != 44100)
        throw IoError("wav_read: unsupported sample rate " + std::to_string(rate) +
                      " in '" + path + "' (48000 or 44100)");

    Waveform w;
    w.sample_rate = static_cast<double>(rate);
    size_t n = data_len / 2;
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
        auto v = static_cast<int16_t>(read_u16(buf.data() + data_off + 2 * i));
        w.samples[i] = static_cast<double>(v) / 32768.0;
    }
    return w;
}

} // namespace ultrafsk
