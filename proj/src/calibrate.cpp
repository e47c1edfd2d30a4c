#include "lsdp/dither.hpp"

#include "lsdp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace lsdp {

namespace {

constexpr int kSupersample = 4;

// Anti-aliased half-plane: white where (p - center) . normal >= offset.
ImageBuffer render_step_edge(int side, double degrees, double offset) {
    const double theta = degrees * std::numbers::pi / 180.0;
    const double nx = std::cos(theta);
    const double ny = std::sin(theta);
    const double c = side / 2.0;
    ImageBuffer img(side, side);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            int inside = 0;
            for (int sy = 0; sy < kSupersample; ++sy) {
                for (int sx = 0; sx < kSupersample; ++sx) {
                    const double px = x + (sx + 0.5) / kSupersample - c;
                    const double py = y + (sy + 0.5) / kSupersample - c;
                    if (px * nx + py * ny >= offset) ++inside;
                }
            }
            const auto v = static_cast<std::uint8_t>(
                std::lround(255.0 * inside / (kSupersample * kSupersample)));
            img.at(x, y) = {v, v, v};
        }
    }
    return img;
}

// Additive Gaussian noise via Box-Muller on the raw engine output.
void add_noise(ImageBuffer& img, double sigma, std::uint64_t seed) {
    if (!(sigma > 0.0)) return;
    std::mt19937_64 rng(seed);
    const auto unit = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    const auto noisy = [&](std::uint8_t v) {
        const double u1 = unit();
        const double u2 = unit();
        const double g = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        return static_cast<std::uint8_t>(std::clamp(std::lround(v + sigma * g), 0L, 255L));
    };
    for (Rgb& p : img.pixels()) {
        const std::uint8_t r = noisy(p.r);
        const std::uint8_t g = noisy(p.g);
        const std::uint8_t b = noisy(p.b);
        p = {r, g, b};
    }
}

double max_min_distance(const ImageBuffer& img, int block_size) {
    const BlockImage blocks = block_average(img, block_size);
    std::uint32_t best = 0;
    for (int gy = 2; gy + 2 <= blocks.bheight - 2; ++gy) {
        for (int gx = 2; gx + 2 <= blocks.bwidth - 2; ++gx) {
            best = std::max(best, min_neighbor_distance(blocks, gx, gy));
        }
    }
    return best;
}

constexpr double kEdgeOffsets[] = {0.0, 0.25, 0.5, 0.75, 1.0, 1.5};

}  // namespace

ThresholdCalibration calibrate_threshold(const CalibrationOptions& opt) {
    if (opt.block_size < 1) throw DomainError("block size must be >= 1");
    if (!(opt.angle_step > 0.0)) throw DomainError("angle step must be positive");
    if (!(opt.noise_sigma >= 0.0)) throw DomainError("noise sigma must be non-negative");
    if (opt.image_side < min_detectable_side(opt.block_size) * 2) {
        throw ImageTooSmall("calibration image too small for the block size");
    }

    ThresholdCalibration result;

    // Axis-aligned edges with sensor-like noise: the floor the threshold must clear.
    std::uint64_t variant = 0;
    for (const double angle : {0.0, 90.0}) {
        for (const double offset : kEdgeOffsets) {
            ImageBuffer img = render_step_edge(opt.image_side, angle, offset);
            add_noise(img, opt.noise_sigma, opt.seed + variant++);
            result.edge_bound = std::max(result.edge_bound, max_min_distance(img, opt.block_size));
        }
    }

    // White quadrant whose corner sits on a block boundary, noise-free.
    const int corner = (opt.image_side / (2 * opt.block_size)) * opt.block_size;
    ImageBuffer quadrant(opt.image_side, opt.image_side);
    for (int y = corner; y < opt.image_side; ++y)
        for (int x = corner; x < opt.image_side; ++x) quadrant.at(x, y) = {255, 255, 255};
    result.corner_bound = max_min_distance(quadrant, opt.block_size);

    result.recommended = result.corner_bound > result.edge_bound
                             ? std::round(0.5 * (result.edge_bound + result.corner_bound))
                             : std::numeric_limits<double>::quiet_NaN();

    // Noise-free edges over all angles, for the report only.
    for (double a = 0.0; a < 180.0; a += opt.angle_step) result.edge_angles.push_back(a);
    result.edge_bounds.assign(result.edge_angles.size(), 0.0);
    const int count = static_cast<int>(result.edge_angles.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
        const double angle = result.edge_angles[static_cast<std::size_t>(i)];
        double worst = 0.0;
        for (const double offset : kEdgeOffsets) {
            worst = std::max(worst, max_min_distance(render_step_edge(opt.image_side, angle, offset),
                                                     opt.block_size));
        }
        result.edge_bounds[static_cast<std::size_t>(i)] = worst;
    }
    return result;
}

}  // namespace lsdp
