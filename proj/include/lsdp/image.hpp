#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace lsdp {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Owned 8-bit RGB raster, row-major. Dimensions are always at least 1x1.
class ImageBuffer {
public:
    ImageBuffer(int width, int height, Rgb fill = {});
    ImageBuffer(int width, int height, std::vector<Rgb> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
    Rgb& at(int x, int y) { return pixels_[index(x, y)]; }

    std::span<const Rgb> pixels() const noexcept { return pixels_; }
    std::span<Rgb> pixels() noexcept { return pixels_; }

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<Rgb> pixels_;
};

enum class Interpolation { NearestNeighbor, Bilinear };

/// Reads a binary PPM (P6, maxval 255). Throws IOError or FormatError.
ImageBuffer load_image(const std::filesystem::path& path);

/// Writes a binary PPM (P6, maxval 255) with a minimal "P6\n<w> <h>\n255\n" header.
void save_image(const ImageBuffer& img, const std::filesystem::path& path);

ImageBuffer decode_ppm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_ppm(const ImageBuffer& img);

/// Rotates counter-clockwise (as displayed, y pointing down) about the image
/// center. The output canvas is the axis-aligned bounding box of the rotated
/// rectangle; samples falling outside the source take `fill`. Exact quarter
/// turns are pure pixel permutations regardless of `interp`.
ImageBuffer rotate(const ImageBuffer& img, double degrees,
                   Interpolation interp = Interpolation::Bilinear, Rgb fill = {});

/// Resamples to round(w*s) x round(h*s). Throws DegenerateOutput when either
/// output dimension would be zero, DomainError when s is not positive.
ImageBuffer scale(const ImageBuffer& img, double factor,
                  Interpolation interp = Interpolation::Bilinear);

}  // namespace lsdp
