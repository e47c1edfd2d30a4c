#include "lsdp/image.hpp"

#include "lsdp/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>

namespace lsdp {

ImageBuffer::ImageBuffer(int width, int height, Rgb fill)
    : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw DomainError("image dimensions must be at least 1x1");
    }
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

ImageBuffer::ImageBuffer(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < 1 || height < 1) {
        throw DomainError("image dimensions must be at least 1x1");
    }
    if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw DomainError("pixel count does not match width x height");
    }
}

// ---------------------------------------------------------------------------
// PPM
// ---------------------------------------------------------------------------

namespace {

class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    void skip_whitespace_and_comments() {
        while (pos_ < bytes_.size()) {
            const auto c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(c)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long read_uint(const char* what) {
        skip_whitespace_and_comments();
        long value = 0;
        std::size_t digits = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000'000L) throw FormatError(std::string("PPM ") + what + " too large");
            ++pos_;
            ++digits;
        }
        if (digits == 0) throw FormatError(std::string("PPM header: expected ") + what);
        return value;
    }

    std::size_t pos() const { return pos_; }
    void advance() { ++pos_; }
    bool at_end() const { return pos_ >= bytes_.size(); }
    std::uint8_t peek() const { return bytes_[pos_]; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

ImageBuffer decode_ppm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
        throw FormatError("not a binary PPM (missing P6 magic)");
    }
    HeaderReader reader(bytes.subspan(2));
    const long width = reader.read_uint("width");
    const long height = reader.read_uint("height");
    const long maxval = reader.read_uint("maxval");
    if (width < 1 || height < 1) throw FormatError("PPM dimensions must be positive");
    if (maxval != 255) throw FormatError("only maxval 255 is supported");
    // Exactly one whitespace byte separates the header from the raster.
    if (reader.at_end() || !std::isspace(reader.peek())) {
        throw FormatError("PPM header not terminated by whitespace");
    }
    reader.advance();

    const std::size_t offset = 2 + reader.pos();
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() - offset < count * 3) {
        throw FormatError("PPM pixel data truncated: expected " + std::to_string(count * 3) +
                          " bytes, found " + std::to_string(bytes.size() - offset));
    }
    std::vector<Rgb> pixels(count);
    const std::uint8_t* src = bytes.data() + offset;
    for (std::size_t i = 0; i < count; ++i) {
        pixels[i] = {src[3 * i], src[3 * i + 1], src[3 * i + 2]};
    }
    return ImageBuffer(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

std::vector<std::uint8_t> encode_ppm(const ImageBuffer& img) {
    const std::string header =
        "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(header.size() + img.pixels().size() * 3);
    for (const Rgb& p : img.pixels()) {
        out.push_back(p.r);
        out.push_back(p.g);
        out.push_back(p.b);
    }
    return out;
}

ImageBuffer load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open image: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IOError("read failed: " + path.string());
    try {
        return decode_ppm(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_image(const ImageBuffer& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IOError("cannot open for writing: " + path.string());
    const auto bytes = encode_ppm(img);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IOError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Resampling
// ---------------------------------------------------------------------------

namespace {

std::uint8_t to_channel(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Continuous coordinates: pixel (i, j) covers [i, i+1) x [j, j+1).
Rgb sample_nearest(const ImageBuffer& img, double sx, double sy) {
    const int x = std::clamp(static_cast<int>(std::floor(sx)), 0, img.width() - 1);
    const int y = std::clamp(static_cast<int>(std::floor(sy)), 0, img.height() - 1);
    return img.at(x, y);
}

Rgb sample_bilinear(const ImageBuffer& img, double sx, double sy) {
    const double fx = sx - 0.5;
    const double fy = sy - 0.5;
    const double x0f = std::floor(fx);
    const double y0f = std::floor(fy);
    const double tx = fx - x0f;
    const double ty = fy - y0f;
    const int x0 = std::clamp(static_cast<int>(x0f), 0, img.width() - 1);
    const int y0 = std::clamp(static_cast<int>(y0f), 0, img.height() - 1);
    const int x1 = std::clamp(static_cast<int>(x0f) + 1, 0, img.width() - 1);
    const int y1 = std::clamp(static_cast<int>(y0f) + 1, 0, img.height() - 1);

    const Rgb& a = img.at(x0, y0);
    const Rgb& b = img.at(x1, y0);
    const Rgb& c = img.at(x0, y1);
    const Rgb& d = img.at(x1, y1);
    const auto mix = [&](std::uint8_t pa, std::uint8_t pb, std::uint8_t pc, std::uint8_t pd) {
        const double top = pa + (pb - pa) * tx;
        const double bottom = pc + (pd - pc) * tx;
        return to_channel(top + (bottom - top) * ty);
    };
    return {mix(a.r, b.r, c.r, d.r), mix(a.g, b.g, c.g, d.g), mix(a.b, b.b, c.b, d.b)};
}

Rgb sample(const ImageBuffer& img, double sx, double sy, Interpolation interp) {
    return interp == Interpolation::NearestNeighbor ? sample_nearest(img, sx, sy)
                                                    : sample_bilinear(img, sx, sy);
}

ImageBuffer rotate_quarter_turns(const ImageBuffer& img, int turns) {
    const int w = img.width();
    const int h = img.height();
    switch (turns) {
        case 1: {
            ImageBuffer out(h, w);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) out.at(y, w - 1 - x) = img.at(x, y);
            return out;
        }
        case 2: {
            ImageBuffer out(w, h);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) out.at(w - 1 - x, h - 1 - y) = img.at(x, y);
            return out;
        }
        case 3: {
            ImageBuffer out(h, w);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) out.at(h - 1 - y, x) = img.at(x, y);
            return out;
        }
        default:
            return img;
    }
}

}  // namespace

ImageBuffer rotate(const ImageBuffer& img, double degrees, Interpolation interp, Rgb fill) {
    double reduced = std::fmod(degrees, 360.0);
    if (reduced < 0) reduced += 360.0;
    if (reduced == 0.0 || reduced == 90.0 || reduced == 180.0 || reduced == 270.0) {
        return rotate_quarter_turns(img, static_cast<int>(reduced) / 90);
    }

    const double theta = reduced * std::numbers::pi / 180.0;
    const double cs = std::cos(theta);
    const double sn = std::sin(theta);
    const double w = img.width();
    const double h = img.height();
    const int out_w = std::max(1, static_cast<int>(std::ceil(std::abs(w * cs) + std::abs(h * sn) - 1e-9)));
    const int out_h = std::max(1, static_cast<int>(std::ceil(std::abs(w * sn) + std::abs(h * cs) - 1e-9)));

    ImageBuffer out(out_w, out_h, fill);
    const double ocx = out_w / 2.0;
    const double ocy = out_h / 2.0;
    const double icx = w / 2.0;
    const double icy = h / 2.0;

#pragma omp parallel for schedule(static)
    for (int y = 0; y < out_h; ++y) {
        const double v = y + 0.5 - ocy;
        for (int x = 0; x < out_w; ++x) {
            const double u = x + 0.5 - ocx;
            // Inverse mapping of the counter-clockwise (y-down) rotation.
            const double sx = u * cs - v * sn + icx;
            const double sy = u * sn + v * cs + icy;
            if (sx < 0.0 || sy < 0.0 || sx >= w || sy >= h) continue;
            out.at(x, y) = sample(img, sx, sy, interp);
        }
    }
    return out;
}

ImageBuffer scale(const ImageBuffer& img, double factor, Interpolation interp) {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw DomainError("scale factor must be positive and finite");
    }
    const long out_w = std::lround(img.width() * factor);
    const long out_h = std::lround(img.height() * factor);
    if (out_w < 1 || out_h < 1) {
        throw DegenerateOutput("scaling " + std::to_string(img.width()) + "x" +
                               std::to_string(img.height()) + " by " + std::to_string(factor) +
                               " leaves no pixels");
    }
    if (factor == 1.0) return img;

    ImageBuffer out(static_cast<int>(out_w), static_cast<int>(out_h));
    const double rx = static_cast<double>(img.width()) / static_cast<double>(out_w);
    const double ry = static_cast<double>(img.height()) / static_cast<double>(out_h);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < static_cast<int>(out_h); ++y) {
        const double sy = (y + 0.5) * ry;
        for (int x = 0; x < static_cast<int>(out_w); ++x) {
            out.at(x, y) = sample(img, (x + 0.5) * rx, sy, interp);
        }
    }
    return out;
}

}  // namespace lsdp
