#include "lsdp/synthetic.hpp"

#include "lsdp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace lsdp {

namespace {

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer over a simple combination.
    std::uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::array<std::array<int, kSyntheticPaletteSize>, kSyntheticCategories> kPalettes = {{
    {0, 2, 4, 6},
    {1, 3, 5, 7},
    {8, 0, 3, 6},
    {9, 2, 5, 7},
    {1, 4, 8, 9},
}};

struct Speckle {
    double x;
    double y;
    double radius;
    Rgb color;
};

void paint_disc(ImageBuffer& img, const Speckle& s) {
    constexpr int kSub = 4;
    const int x0 = std::max(0, static_cast<int>(std::floor(s.x - s.radius)));
    const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(s.x + s.radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(s.y - s.radius)));
    const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(s.y + s.radius)));
    const double r2 = s.radius * s.radius;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            int covered = 0;
            for (int sy = 0; sy < kSub; ++sy) {
                for (int sx = 0; sx < kSub; ++sx) {
                    const double dx = x + (sx + 0.5) / kSub - s.x;
                    const double dy = y + (sy + 0.5) / kSub - s.y;
                    if (dx * dx + dy * dy <= r2) ++covered;
                }
            }
            if (covered == 0) continue;
            const double a = static_cast<double>(covered) / (kSub * kSub);
            Rgb& p = img.at(x, y);
            p.r = std::max(p.r, static_cast<std::uint8_t>(std::lround(s.color.r * a)));
            p.g = std::max(p.g, static_cast<std::uint8_t>(std::lround(s.color.g * a)));
            p.b = std::max(p.b, static_cast<std::uint8_t>(std::lround(s.color.b * a)));
        }
    }
}

}  // namespace

Rgb synthetic_hue(int index, double value) {
    const double h = 36.0 * (((index % 10) + 10) % 10) + 18.0;
    const double sector = h / 60.0;
    const int i = static_cast<int>(std::floor(sector));
    const double f = sector - i;
    const double v = std::clamp(value, 0.0, 1.0);
    double r = 0, g = 0, b = 0;
    switch (i) {
        case 0: r = 1; g = f; b = 0; break;
        case 1: r = 1 - f; g = 1; b = 0; break;
        case 2: r = 0; g = 1; b = f; break;
        case 3: r = 0; g = 1 - f; b = 1; break;
        case 4: r = f; g = 0; b = 1; break;
        default: r = 1; g = 0; b = 1 - f; break;
    }
    const auto ch = [v](double c) { return static_cast<std::uint8_t>(std::lround(255.0 * v * c)); };
    return {ch(r), ch(g), ch(b)};
}

std::array<int, kSyntheticPaletteSize> synthetic_palette(int category) {
    if (category < 0 || category >= kSyntheticCategories) {
        throw DomainError("synthetic category must lie in [0, " + std::to_string(kSyntheticCategories) + ")");
    }
    return kPalettes[static_cast<std::size_t>(category)];
}

std::vector<int> synthetic_assignment(int category, int instance, const SyntheticStyle& style) {
    if (instance < 0) throw DomainError("instance must be non-negative");
    if (style.rings < 1 || style.rings > 8) throw DomainError("ring count must lie in [1, 8]");
    synthetic_palette(category);

    int total = 1;
    for (int i = 0; i < style.rings; ++i) total *= kSyntheticPaletteSize;
    std::vector<int> order(static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i) order[static_cast<std::size_t>(i)] = i;
    std::mt19937_64 rng(mix_seed(0xA551'6E00ULL, static_cast<std::uint64_t>(category)));
    for (int i = total - 1; i > 0; --i) {
        std::swap(order[static_cast<std::size_t>(i)],
                  order[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(i + 1))]);
    }
    int code = order[static_cast<std::size_t>(instance % total)];
    std::vector<int> assignment(static_cast<std::size_t>(style.rings));
    for (int& a : assignment) {
        a = code % kSyntheticPaletteSize;
        code /= kSyntheticPaletteSize;
    }
    return assignment;
}

ImageBuffer render_synthetic(int category, int instance, const SyntheticStyle& style) {
    if (style.side < 16) throw DomainError("synthetic side must be >= 16");
    if (!(style.min_speckle_radius > 0.0) || style.max_speckle_radius < style.min_speckle_radius) {
        throw DomainError("invalid speckle radius range");
    }
    const auto palette = synthetic_palette(category);
    const auto assignment = synthetic_assignment(category, instance, style);

    std::mt19937_64 rng(mix_seed(static_cast<std::uint64_t>(category) << 32,
                                 static_cast<std::uint64_t>(instance)));
    ImageBuffer img(style.side, style.side);
    const double c = style.side / 2.0;
    const double outer = style.outer_radius_fraction * style.side;
    const double half_width = 0.5 * style.ring_width_fraction * style.side;
    const double log_min = std::log(style.min_speckle_radius);
    const double log_max = std::log(style.max_speckle_radius);

    std::vector<Speckle> placed;
    for (int ring = 0; ring < style.rings; ++ring) {
        // Ring centers sit mid-way through equal-area annuli of the outer disc.
        const double radius = outer * std::sqrt((ring + 0.5) / (style.rings - 0.5));
        const double r_in = std::max(0.0, radius - half_width);
        const double r_out = radius + half_width;
        const double area = std::numbers::pi * (r_out * r_out - r_in * r_in);
        const int attempts = std::max(4, static_cast<int>(std::lround(area * style.density)));
        const int hue = palette[static_cast<std::size_t>(assignment[static_cast<std::size_t>(ring)])];

        for (int a = 0; a < attempts; ++a) {
            // Uniform over the annulus area.
            const double rr = std::sqrt(r_in * r_in + unit(rng) * (r_out * r_out - r_in * r_in));
            const double phi = 2.0 * std::numbers::pi * unit(rng);
            const double size = std::exp(log_min + unit(rng) * (log_max - log_min));
            const double value = 0.7 + 0.3 * unit(rng);
            Speckle s{c + rr * std::cos(phi), c + rr * std::sin(phi), size, synthetic_hue(hue, value)};
            const bool clear = std::none_of(placed.begin(), placed.end(), [&](const Speckle& o) {
                const double gap = s.radius + o.radius + 3.0;
                return (s.x - o.x) * (s.x - o.x) + (s.y - o.y) * (s.y - o.y) < gap * gap;
            });
            if (clear) placed.push_back(s);
        }
    }
    for (const Speckle& s : placed) paint_disc(img, s);
    return img;
}

std::vector<ImageBuffer> synthetic_similars(int category, int count, const SyntheticStyle& style) {
    std::vector<ImageBuffer> out;
    out.reserve(static_cast<std::size_t>(std::max(0, count)));
    for (int i = 1; i <= count; ++i) out.push_back(render_synthetic(category, i, style));
    return out;
}

ImageBuffer render_block_mosaic(std::uint64_t seed, int side, int block_size, int pitch) {
    if (block_size < 1 || pitch < 4 * block_size || side < pitch) {
        throw DomainError("mosaic needs pitch >= 4 * block size and side >= pitch");
    }
    std::mt19937_64 rng(mix_seed(0x5EED'0000ULL, seed));
    ImageBuffer img(side, side);
    const int square = 2 * block_size;
    // Block-aligned offset that centers the square in its cell.
    const int offset = ((pitch - square) / 2 / block_size) * block_size;
    for (int cy = 0; cy + pitch <= side; cy += pitch) {
        for (int cx = 0; cx + pitch <= side; cx += pitch) {
            if (unit(rng) < 0.4) continue;
            const Rgb color = synthetic_hue(static_cast<int>(rng() % 10), 0.75 + 0.25 * unit(rng));
            for (int y = 0; y < square; ++y)
                for (int x = 0; x < square; ++x) img.at(cx + offset + x, cy + offset + y) = color;
        }
    }
    return img;
}

}  // namespace lsdp
