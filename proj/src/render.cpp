#include "ultrafsk/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <vector>

#include "ultrafsk/errors.hpp"

namespace ultrafsk {

namespace {

// ------------------------------------------------------------- tiny 5x7 font
// Row bits left-to-right in the low five bits (bit 4 = leftmost column).
struct Glyph {
    char ch;
    uint8_t rows[7];
};

constexpr Glyph kFont[] = {
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'k', {0x10, 0x10, 0x12, 0x14, 0x18, 0x14, 0x12}},
    {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'z', {0x00, 0x00, 0x1F, 0x02, 0x04, 0x08, 0x1F}},
    {'s', {0x00, 0x00, 0x0F, 0x10, 0x0E, 0x01, 0x1E}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
};

const Glyph* find_glyph(char c) {
    for (const Glyph& g : kFont)
        if (g.ch == c)
            return &g;
    return nullptr;
}

struct Canvas {
    size_t width = 0, height = 0;
    std::vector<uint8_t> rgb; // row-major, top-down, 3 bytes per pixel

    Canvas(size_t w, size_t h, uint8_t r, uint8_t g, uint8_t b)
        : width(w), height(h), rgb(w * h * 3) {
        for (size_t i = 0; i < w * h; ++i) {
            rgb[3 * i] = r;
            rgb[3 * i + 1] = g;
            rgb[3 * i + 2] = b;
        }
    }

    void set(size_t x, size_t y, uint8_t r, uint8_t g, uint8_t b) {
        if (x >= width || y >= height)
            return;
        size_t i = (y * width + x) * 3;
        rgb[i] = r;
        rgb[i + 1] = g;
        rgb[i + 2] = b;
    }

    void text(size_t x, size_t y, const std::string& s, uint8_t r, uint8_t g, uint8_t b) {
        size_t cx = x;
        for (char c : s) {
            const Glyph* gl = find_glyph(c);
            if (gl) {
                for (size_t row = 0; row < 7; ++row)
                    for (size_t col = 0; col < 5; ++col)
                        if (gl->rows[row] & (0x10u >> col))
                            set(cx + col, y + row, r, g, b);
            }
            cx += 6;
        }
    }
};

// Dark-to-bright magnitude ramp (navy -> violet -> orange -> near-white).
void colormap(double t, uint8_t& r, uint8_t& g, uint8_t& b) {
    t = std::clamp(t, 0.0, 1.0);
    constexpr double stops[4][3] = {
        {10, 12, 40}, {110, 30, 120}, {230, 120, 40}, {252, 245, 200}};
    double pos = t * 3.0;
    int i = std::min(2, static_cast<int>(pos));
    double f = pos - i;
    r = static_cast<uint8_t>(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]));
    g = static_cast<uint8_t>(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]));
    b = static_cast<uint8_t>(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]));
}

void write_bmp(const std::string& path, const Canvas& canvas) {
    size_t row_bytes = (canvas.width * 3 + 3) & ~size_t{3};
    size_t pixel_bytes = row_bytes * canvas.height;
    uint32_t file_size = static_cast<uint32_t>(54 + pixel_bytes);

    std::vector<uint8_t> out;
    out.reserve(file_size);
    auto u16 = [&out](uint16_t v) {
        out.push_back(static_cast<uint8_t>(v & 0xFF));
        out.push_back(static_cast<uint8_t>(v >> 8));
    };
    auto u32 = [&out](uint32_t v) {
        for (int i = 0; i < 4; ++i)
            out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xFF));
    };
    out.push_back('B');
    out.push_back('M');
    u32(file_size);
    u32(0);
    u32(54);
    u32(40); // BITMAPINFOHEADER
    u32(static_cast<uint32_t>(canvas.width));
    u32(static_cast<uint32_t>(canvas.height));
    u16(1);
    u16(24);
    u32(0);
    u32(static_cast<uint32_t>(pixel_bytes));
    u32(2835);
    u32(2835);
    u32(0);
    u32(0);

    // BMP rows run bottom-up, pixels BGR.
    for (size_t y = canvas.height; y-- > 0;) {
        size_t start = out.size();
        for (size_t x = 0; x < canvas.width; ++x) {
            size_t i = (y * canvas.width + x) * 3;
            out.push_back(canvas.rgb[i + 2]);
            out.push_back(canvas.rgb[i + 1]);
            out.push_back(canvas.rgb[i]);
        }
        while (out.size() - start < row_bytes)
            out.push_back(0);
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("write_bmp: cannot open '" + path + "' for writing");
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<long>(out.size()));
    if (!f)
        throw IoError("write_bmp: short write to '" + path + "'");
}

std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

// A readable tick step close to range/target.
double nice_step(double range, int target) {
    double raw = range / std::max(target, 1);
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (raw <= m * mag)
            return m * mag;
    return 10.0 * mag;
}

} // namespace

void write_spectrogram_bmp(const Spectrogram& sg, const std::string& path) {
    if (sg.magnitudes_db.empty() || sg.magnitudes_db[0].empty())
        throw IoError("write_spectrogram_bmp: empty spectrogram");

    size_t nframes = sg.magnitudes_db.size();
    size_t nbins = sg.magnitudes_db[0].size();

    const size_t left = 56, bottom = 22, top = 8, right = 10;
    size_t plot_w = std::clamp<size_t>(nframes, 360, 960);
    size_t plot_h = std::clamp<size_t>(nbins, 240, 480);
    Canvas canvas(left + plot_w + right, top + plot_h + bottom, 24, 24, 28);

    double lo = 1e300, hi = -1e300;
    for (const auto& row : sg.magnitudes_db)
        for (double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (hi <= lo)
        hi = lo + 1.0;

    // Nearest-neighbor resample of the grid; frequency grows upward.
    for (size_t py = 0; py < plot_h; ++py) {
        size_t bin = (plot_h - 1 - py) * (nbins - 1) / std::max<size_t>(plot_h - 1, 1);
        for (size_t px = 0; px < plot_w; ++px) {
            size_t frame = px * (nframes - 1) / std::max<size_t>(plot_w - 1, 1);
            double t = (sg.magnitudes_db[frame][bin] - lo) / (hi - lo);
            uint8_t r, g, b;
            colormap(t, r, g, b);
            canvas.set(left + px, top + py, r, g, b);
        }
    }

    const uint8_t ax = 210, ay = 210, az = 210;
    double t_max = sg.time_axis_s.empty() ? 0.0 : sg.time_axis_s.back();
    double f_max = sg.freq_axis_hz.empty() ? 0.0 : sg.freq_axis_hz.back();

    // Frequency ticks (kHz), right-aligned labels plus a tick mark.
    double f_step = nice_step(f_max, 6);
    for (double f = 0.0; f <= f_max + 1e-9; f += f_step) {
        size_t py = plot_h - 1 - static_cast<size_t>(f / f_max * (plot_h - 1));
        std::string label = format_fixed(f / 1000.0, 1) + "kHz";
        canvas.text(2, top + py - 3, label, ax, ay, az);
        for (size_t d = 0; d < 4; ++d)
            canvas.set(left - 1 - d, top + py, ax, ay, az);
    }
    // Time ticks (s).
    if (t_max > 0.0) {
        double t_step = nice_step(t_max, 8);
        for (double t = 0.0; t <= t_max + 1e-9; t += t_step) {
            size_t px = static_cast<size_t>(t / t_max * (plot_w - 1));
            canvas.text(left + px - 8, top + plot_h + 8, format_fixed(t, 1) + "s", ax, ay, az);
            for (size_t d = 0; d < 4; ++d)
                canvas.set(left + px, top + plot_h + d, ax, ay, az);
        }
    }

    write_bmp(path, canvas);
}

void write_spectrogram_csv(const Spectrogram& sg, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("write_spectrogram_csv: cannot open '" + path + "' for writing");
    f << "time_s";
    for (double hz : sg.freq_axis_hz)
        f << "," << format_fixed(hz, 4);
    f << "\n";
    for (size_t row = 0; row < sg.magnitudes_db.size(); ++row) {
        f << format_fixed(sg.time_axis_s[row], 4);
        for (double v : sg.magnitudes_db[row])
            f << "," << format_fixed(v, 4);
        f << "\n";
    }
    if (!f)
        throw IoError("write_spectrogram_csv: short write to '" + path + "'");
}

} // namespace ultrafsk
