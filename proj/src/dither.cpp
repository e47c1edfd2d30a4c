#include "lsdp/dither.hpp"

#include "lsdp/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <json.hpp>
#include <sstream>
#include <string>

namespace lsdp {

void DetectorConfig::validate() const {
    if (block_size < 1) throw DomainError("block size must be >= 1");
    if (!(threshold >= 0.0)) throw DomainError("threshold must be non-negative");
    if (nms_window < 1 || nms_window % 2 == 0) throw DomainError("nms window must be odd and >= 1");
}

std::uint64_t cdpc_pattern_count(int z) {
    if (z < 4) throw DomainError("pattern count needs at least 4 colors, got " + std::to_string(z));
    if (z > 65536) throw DomainError("color depth too large for a 64-bit pattern count");
    const auto choose = [](std::uint64_t n, std::uint64_t r) {
        std::uint64_t result = 1;
        for (std::uint64_t i = 1; i <= r; ++i) result = result * (n - r + i) / i;
        return result;
    };
    const auto n = static_cast<std::uint64_t>(z);
    std::uint64_t count = choose(n, 4) + choose(n, 2);
    for (std::uint64_t r = 0; r <= 2; ++r) count += choose(n, r) * (n - r);
    return count;
}

BlockImage block_average(const ImageBuffer& img, int block_size) {
    if (block_size < 1) throw DomainError("block size must be >= 1");
    if (img.width() < block_size || img.height() < block_size) {
        throw ImageTooSmall("image " + std::to_string(img.width()) + "x" +
                            std::to_string(img.height()) + " cannot hold one block of " +
                            std::to_string(block_size) + "-pixel blocks");
    }
    BlockImage out;
    out.block_size = block_size;
    out.bwidth = img.width() / block_size;
    out.bheight = img.height() / block_size;
    out.blocks.resize(static_cast<std::size_t>(out.bwidth) * static_cast<std::size_t>(out.bheight));

    const unsigned n = static_cast<unsigned>(block_size * block_size);
#pragma omp parallel for schedule(static)
    for (int by = 0; by < out.bheight; ++by) {
        for (int bx = 0; bx < out.bwidth; ++bx) {
            unsigned r = 0, g = 0, b = 0;
            for (int y = by * block_size; y < (by + 1) * block_size; ++y) {
                for (int x = bx * block_size; x < (bx + 1) * block_size; ++x) {
                    const Rgb& p = img.at(x, y);
                    r += p.r;
                    g += p.g;
                    b += p.b;
                }
            }
            // Round half up.
            out.blocks[static_cast<std::size_t>(by) * out.bwidth + bx] = {
                static_cast<std::uint8_t>((2 * r + n) / (2 * n)),
                static_cast<std::uint8_t>((2 * g + n) / (2 * n)),
                static_cast<std::uint8_t>((2 * b + n) / (2 * n))};
        }
    }
    return out;
}

DitherPattern pattern_at(const BlockImage& blocks, int gx, int gy) {
    if (gx < 0 || gy < 0 || gx > blocks.bwidth - 2 || gy > blocks.bheight - 2) {
        throw OutOfBounds("pattern (" + std::to_string(gx) + ", " + std::to_string(gy) +
                          ") outside a " + std::to_string(blocks.bwidth) + "x" +
                          std::to_string(blocks.bheight) + " block grid");
    }
    return {gx, gy,
            {blocks.at(gx, gy), blocks.at(gx + 1, gy), blocks.at(gx, gy + 1),
             blocks.at(gx + 1, gy + 1)}};
}

namespace {

inline std::uint32_t color_distance(const Rgb& a, const Rgb& b) {
    return static_cast<std::uint32_t>(std::abs(a.r - b.r) + std::abs(a.g - b.g) +
                                      std::abs(a.b - b.b));
}

bool has_full_neighborhood(const BlockImage& blocks, int gx, int gy) {
    const int pw = blocks.bwidth - 1;
    const int ph = blocks.bheight - 1;
    return gx >= 2 && gy >= 2 && gx + 2 <= pw - 1 && gy + 2 <= ph - 1;
}

void require_detectable(const BlockImage& blocks) {
    // A full neighborhood needs a 5x5 pattern grid, i.e. 6x6 blocks.
    if (blocks.bwidth < 6 || blocks.bheight < 6) {
        throw ImageTooSmall("block grid " + std::to_string(blocks.bwidth) + "x" +
                            std::to_string(blocks.bheight) +
                            " has no pattern with a full 8-neighborhood (need 6x6 blocks)");
    }
}

}  // namespace

std::uint32_t pattern_distance(const DitherPattern& a, const DitherPattern& b) {
    std::uint32_t d = 0;
    for (std::size_t i = 0; i < 4; ++i) d += color_distance(a.elements[i], b.elements[i]);
    return d;
}

std::uint32_t min_neighbor_distance(const BlockImage& blocks, int gx, int gy) {
    const DitherPattern center = pattern_at(blocks, gx, gy);
    std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
    for (const auto& off : kNeighborOffsets) {
        best = std::min(best, pattern_distance(center, pattern_at(blocks, gx + off[0], gy + off[1])));
    }
    return best;
}

int min_detectable_side(int block_size) { return 6 * block_size; }

// ---------------------------------------------------------------------------
// Saliency
// ---------------------------------------------------------------------------

SaliencyMap compute_saliency_serial(const BlockImage& blocks, double threshold) {
    require_detectable(blocks);
    SaliencyMap map{blocks.bwidth - 1, blocks.bheight - 1, {}};
    map.strength.assign(static_cast<std::size_t>(map.width) * map.height, 0);
    for (int gy = 0; gy < map.height; ++gy) {
        for (int gx = 0; gx < map.width; ++gx) {
            if (!has_full_neighborhood(blocks, gx, gy)) continue;
            const DitherPattern center = pattern_at(blocks, gx, gy);
            std::uint32_t sum = 0;
            bool salient = true;
            for (const auto& off : kNeighborOffsets) {
                const std::uint32_t d =
                    pattern_distance(center, pattern_at(blocks, gx + off[0], gy + off[1]));
                if (!(d > threshold)) {
                    salient = false;
                    break;
                }
                sum += d;
            }
            if (salient) map.strength[static_cast<std::size_t>(gy) * map.width + gx] = sum;
        }
    }
    return map;
}

SaliencyMap compute_saliency(const BlockImage& blocks, double threshold) {
    require_detectable(blocks);
    const int bw = blocks.bwidth;
    const int bh = blocks.bheight;
    const int pw = bw - 1;
    const int ph = bh - 1;

    // Four offsets cover all eight neighbors: D(p, p - o) is the box sum of the
    // difference map for +o evaluated at p - o.
    constexpr std::array<std::array<int, 2>, 4> kHalfOffsets = {{{2, 0}, {0, 2}, {2, 2}, {2, -2}}};

    // box[k] holds, for pattern p, D(p, p + kHalfOffsets[k]) where defined.
    std::array<std::vector<std::uint32_t>, 4> box;
    for (std::size_t k = 0; k < kHalfOffsets.size(); ++k) {
        const int dx = kHalfOffsets[k][0];
        const int dy = kHalfOffsets[k][1];
        std::vector<std::uint32_t> diff(static_cast<std::size_t>(bw) * bh, 0);
#pragma omp parallel for schedule(static)
        for (int by = std::max(0, -dy); by < std::min(bh, bh - dy); ++by) {
            for (int bx = 0; bx < bw - dx; ++bx) {
                diff[static_cast<std::size_t>(by) * bw + bx] =
                    color_distance(blocks.at(bx, by), blocks.at(bx + dx, by + dy));
            }
        }
        box[k].assign(static_cast<std::size_t>(pw) * ph, 0);
        auto& dst = box[k];
#pragma omp parallel for schedule(static)
        for (int gy = std::max(0, -dy); gy < std::min(ph, ph - dy); ++gy) {
            const std::uint32_t* row0 = diff.data() + static_cast<std::size_t>(gy) * bw;
            const std::uint32_t* row1 = row0 + bw;
            for (int gx = 0; gx < pw - dx; ++gx) {
                dst[static_cast<std::size_t>(gy) * pw + gx] =
                    row0[gx] + row0[gx + 1] + row1[gx] + row1[gx + 1];
            }
        }
    }

    SaliencyMap map{pw, ph, {}};
    map.strength.assign(static_cast<std::size_t>(pw) * ph, 0);
    const auto at = [pw](const std::vector<std::uint32_t>& v, int gx, int gy) {
        return v[static_cast<std::size_t>(gy) * pw + gx];
    };

#pragma omp parallel for schedule(static)
    for (int gy = 2; gy <= ph - 3; ++gy) {
        for (int gx = 2; gx <= pw - 3; ++gx) {
            const std::array<std::uint32_t, 8> d = {
                at(box[0], gx, gy),          // (+2, 0)
                at(box[0], gx - 2, gy),      // (-2, 0)
                at(box[1], gx, gy),          // (0, +2)
                at(box[1], gx, gy - 2),      // (0, -2)
                at(box[2], gx, gy),          // (+2, +2)
                at(box[2], gx - 2, gy - 2),  // (-2, -2)
                at(box[3], gx, gy),          // (+2, -2)
                at(box[3], gx - 2, gy + 2),  // (-2, +2)
            };
            std::uint32_t sum = 0;
            bool salient = true;
            for (const std::uint32_t v : d) {
                salient = salient && (v > threshold);
                sum += v;
            }
            if (salient) map.strength[static_cast<std::size_t>(gy) * pw + gx] = sum;
        }
    }
    return map;
}

// ---------------------------------------------------------------------------
// Non-maximal suppression
// ---------------------------------------------------------------------------

namespace {

bool survives(const SaliencyMap& saliency, int gx, int gy, int radius) {
    const std::uint32_t s = saliency.at(gx, gy);
    for (int y = std::max(0, gy - radius); y <= std::min(saliency.height - 1, gy + radius); ++y) {
        for (int x = std::max(0, gx - radius); x <= std::min(saliency.width - 1, gx + radius); ++x) {
            if (x == gx && y == gy) continue;
            const std::uint32_t other = saliency.at(x, y);
            if (other > s) return false;
            // Equal strength: the smaller (y, x) wins.
            if (other == s && (y < gy || (y == gy && x < gx))) return false;
        }
    }
    return true;
}

FeaturePoint make_feature(const BlockImage& blocks, const SaliencyMap& saliency, int gx, int gy) {
    return {gx, gy, saliency.at(gx, gy), pattern_at(blocks, gx, gy).elements};
}

}  // namespace

std::vector<FeaturePoint> suppress_non_maxima_serial(const BlockImage& blocks,
                                                     const SaliencyMap& saliency, int window) {
    if (window < 1 || window % 2 == 0) throw DomainError("nms window must be odd and >= 1");
    const int radius = window / 2;
    std::vector<FeaturePoint> out;
    for (int gy = 0; gy < saliency.height; ++gy) {
        for (int gx = 0; gx < saliency.width; ++gx) {
            if (saliency.at(gx, gy) == 0) continue;
            if (survives(saliency, gx, gy, radius)) out.push_back(make_feature(blocks, saliency, gx, gy));
        }
    }
    return out;
}

std::vector<FeaturePoint> suppress_non_maxima(const BlockImage& blocks, const SaliencyMap& saliency,
                                              int window) {
    if (window < 1 || window % 2 == 0) throw DomainError("nms window must be odd and >= 1");
    const int radius = window / 2;
    std::vector<std::vector<FeaturePoint>> rows(static_cast<std::size_t>(saliency.height));
#pragma omp parallel for schedule(dynamic, 4)
    for (int gy = 0; gy < saliency.height; ++gy) {
        for (int gx = 0; gx < saliency.width; ++gx) {
            if (saliency.at(gx, gy) == 0) continue;
            if (survives(saliency, gx, gy, radius)) {
                rows[static_cast<std::size_t>(gy)].push_back(make_feature(blocks, saliency, gx, gy));
            }
        }
    }
    std::vector<FeaturePoint> out;
    for (auto& row : rows) out.insert(out.end(), row.begin(), row.end());
    return out;
}

std::vector<FeaturePoint> detect_features(const ImageBuffer& img, const DetectorConfig& cfg) {
    cfg.validate();
    const BlockImage blocks = block_average(img, cfg.block_size);
    return suppress_non_maxima(blocks, compute_saliency(blocks, cfg.threshold), cfg.nms_window);
}

std::vector<FeaturePoint> detect_features_serial(const ImageBuffer& img, const DetectorConfig& cfg) {
    cfg.validate();
    const BlockImage blocks = block_average(img, cfg.block_size);
    return suppress_non_maxima_serial(blocks, compute_saliency_serial(blocks, cfg.threshold),
                                      cfg.nms_window);
}

// ---------------------------------------------------------------------------
// JSON lines
// ---------------------------------------------------------------------------

std::string features_to_jsonl(const std::vector<FeaturePoint>& features) {
    std::string out;
    for (const FeaturePoint& f : features) {
        nlohmann::json elements = nlohmann::json::array();
        for (const Rgb& c : f.elements) elements.push_back({c.r, c.g, c.b});
        const nlohmann::json line = {
            {"gx", f.grid_x}, {"gy", f.grid_y}, {"strength", f.strength}, {"elements", elements}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

std::vector<FeaturePoint> features_from_jsonl(const std::string& text) {
    std::vector<FeaturePoint> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            FeaturePoint f;
            f.grid_x = j.at("gx").get<int>();
            f.grid_y = j.at("gy").get<int>();
            f.strength = j.at("strength").get<std::uint32_t>();
            const auto& elements = j.at("elements");
            if (!elements.is_array() || elements.size() != 4) throw FormatError("need 4 elements");
            for (std::size_t i = 0; i < 4; ++i) {
                const auto& c = elements[i];
                if (!c.is_array() || c.size() != 3) throw FormatError("element must be [r,g,b]");
                f.elements[i] = {c[0].get<std::uint8_t>(), c[1].get<std::uint8_t>(),
                                 c[2].get<std::uint8_t>()};
            }
            out.push_back(f);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("bad feature line: ") + e.what());
        }
    }
    return out;
}

}  // namespace lsdp
