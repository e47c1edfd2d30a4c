#pragma once

#include "lsdp/chroma.hpp"
#include "lsdp/dither.hpp"
#include "lsdp/geometry.hpp"

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace lsdp {

/// k x L matrix (distance bins x color bins), max-normalized so the largest
/// cell is exactly 1 whenever any feature was counted.
class SpatialChromaticHistogram {
public:
    SpatialChromaticHistogram(int k, int levels);

    int k() const noexcept { return k_; }
    int levels() const noexcept { return levels_; }
    int feature_count() const noexcept { return feature_count_; }
    void set_feature_count(int n) noexcept { feature_count_ = n; }

    /// 1-based distance bin, 0-based color bin.
    double& at(int bin, int color) { return values_[index(bin, color)]; }
    double at(int bin, int color) const { return values_[index(bin, color)]; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    /// Divides every cell by the matrix maximum (no-op on an all-zero matrix).
    void normalize_by_max();

    friend bool operator==(const SpatialChromaticHistogram&, const SpatialChromaticHistogram&) = default;

private:
    std::size_t index(int bin, int color) const {
        return static_cast<std::size_t>(bin - 1) * static_cast<std::size_t>(levels_) +
               static_cast<std::size_t>(color);
    }

    int k_;
    int levels_;
    int feature_count_ = 0;
    std::vector<double> values_;
};

/// A feature as the descriptor sees it: a position and four element colors.
/// Positions may be real-valued so synthetic point sets can be transformed exactly.
struct PlacedPattern {
    Point2 position;
    std::array<Rgb, 4> elements{};
};

std::vector<PlacedPattern> to_placed(std::span<const FeaturePoint> features);

SpatialChromaticHistogram build_descriptor(std::span<const PlacedPattern> patterns, int k,
                                           const QuantizerConfig& cfg);
SpatialChromaticHistogram build_descriptor(std::span<const FeaturePoint> features, int k,
                                           const QuantizerConfig& cfg);

/// L1 distance over cells. Throws ShapeMismatch on differing (k, L).
double descriptor_distance(const SpatialChromaticHistogram& a, const SpatialChromaticHistogram& b);

/// Row-major, distance-bin major: cell (bin, color) sits at (bin-1)*L + color.
std::vector<double> flatten(const SpatialChromaticHistogram& h);

struct DescriptorConfig {
    DetectorConfig detector;
    int k = 4;
    QuantizerConfig quantizer;

    void validate() const;
};

/// Detect then describe.
SpatialChromaticHistogram describe_image(const ImageBuffer& img, const DescriptorConfig& cfg);

/// Describes many images; images are processed concurrently, results stay in input order.
std::vector<SpatialChromaticHistogram> describe_images(std::span<const ImageBuffer> images,
                                                       const DescriptorConfig& cfg);
std::vector<SpatialChromaticHistogram> describe_images_serial(std::span<const ImageBuffer> images,
                                                              const DescriptorConfig& cfg);

// JSON: {"k":int,"levels":int,"feature_count":int,"values":[[real x L] x k]}
std::string descriptor_to_json(const SpatialChromaticHistogram& h);
SpatialChromaticHistogram descriptor_from_json(const std::string& text);
/// Header "bin,c0,...,c{L-1}" then one row per distance bin.
std::string descriptor_to_csv(const SpatialChromaticHistogram& h);

}  // namespace lsdp
