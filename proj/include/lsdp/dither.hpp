#pragma once

#include "lsdp/image.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace lsdp {

/// Midpoint between the worst axis-aligned step edge under sigma=10 channel
/// noise (68) and a black/white corner (765), at 2-pixel blocks. Slanted edges
/// can score above the corner and are not separable by any threshold.
/// Reproduce with `lsdp calibrate-threshold`.
inline constexpr double kDefaultThreshold = 417.0;
inline constexpr int kDefaultBlockSize = 2;
inline constexpr int kDefaultNmsWindow = 5;

/// Block-mean image: each entry is the rounded mean color of an l x l pixel block.
struct BlockImage {
    int bwidth = 0;
    int bheight = 0;
    int block_size = 0;
    std::vector<Rgb> blocks;

    const Rgb& at(int bx, int by) const {
        return blocks[static_cast<std::size_t>(by) * static_cast<std::size_t>(bwidth) +
                      static_cast<std::size_t>(bx)];
    }
};

/// 2x2 arrangement of block colors, elements in row-major order.
struct DitherPattern {
    int grid_x = 0;
    int grid_y = 0;
    std::array<Rgb, 4> elements{};

    friend bool operator==(const DitherPattern&, const DitherPattern&) = default;
};

struct FeaturePoint {
    int grid_x = 0;
    int grid_y = 0;
    /// Sum of the eight neighbor distances.
    std::uint32_t strength = 0;
    std::array<Rgb, 4> elements{};

    friend bool operator==(const FeaturePoint&, const FeaturePoint&) = default;
};

struct DetectorConfig {
    int block_size = kDefaultBlockSize;
    double threshold = kDefaultThreshold;
    /// Side of the suppression window in pattern-grid units; must be odd.
    int nms_window = kDefaultNmsWindow;

    /// Throws DomainError on an invalid configuration.
    void validate() const;
};

/// Number of order-free 4-element patterns over z reduced colors (z >= 4).
std::uint64_t cdpc_pattern_count(int z);

/// Trailing pixel rows/columns that do not fill a block are dropped. Throws
/// ImageTooSmall when not even one block fits.
BlockImage block_average(const ImageBuffer& img, int block_size);

DitherPattern pattern_at(const BlockImage& blocks, int gx, int gy);

/// Sum of absolute channel differences over the four elements.
std::uint32_t pattern_distance(const DitherPattern& a, const DitherPattern& b);

/// Offsets (in blocks) of the eight neighbor patterns: a 3x3 tiling of
/// disjoint patterns around the center one.
inline constexpr std::array<std::array<int, 2>, 8> kNeighborOffsets = {{
    {-2, -2}, {0, -2}, {2, -2},
    {-2, 0},           {2, 0},
    {-2, 2},  {0, 2},  {2, 2},
}};

/// Candidate strengths over the pattern grid ((bwidth-1) x (bheight-1)).
/// Zero marks a position that is not a candidate.
struct SaliencyMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> strength;

    std::uint32_t at(int gx, int gy) const {
        return strength[static_cast<std::size_t>(gy) * static_cast<std::size_t>(width) +
                        static_cast<std::size_t>(gx)];
    }
};

/// OpenMP kernel built on per-offset block difference maps.
SaliencyMap compute_saliency(const BlockImage& blocks, double threshold);
/// Straight evaluation of pattern_distance for every neighbor; reference for the kernel.
SaliencyMap compute_saliency_serial(const BlockImage& blocks, double threshold);

/// Keeps candidates that dominate every other candidate inside the centered
/// window; equal strengths go to the smaller (grid_y, grid_x). Output sorted by
/// (grid_y, grid_x).
std::vector<FeaturePoint> suppress_non_maxima(const BlockImage& blocks, const SaliencyMap& saliency,
                                              int window);
std::vector<FeaturePoint> suppress_non_maxima_serial(const BlockImage& blocks,
                                                     const SaliencyMap& saliency, int window);

/// Full detector: block averaging, saliency, threshold, non-maximal suppression.
/// Throws ImageTooSmall when no pattern has a complete neighborhood.
std::vector<FeaturePoint> detect_features(const ImageBuffer& img, const DetectorConfig& cfg);
std::vector<FeaturePoint> detect_features_serial(const ImageBuffer& img, const DetectorConfig& cfg);

/// Smallest image side (pixels) that detect_features accepts.
int min_detectable_side(int block_size);

/// One JSON object per line: {"gx":..,"gy":..,"strength":..,"elements":[[r,g,b]x4]}.
std::string features_to_jsonl(const std::vector<FeaturePoint>& features);
std::vector<FeaturePoint> features_from_jsonl(const std::string& text);

// ---------------------------------------------------------------------------
// Threshold calibration
// ---------------------------------------------------------------------------

struct CalibrationOptions {
    int block_size = kDefaultBlockSize;
    int image_side = 96;
    /// Gaussian noise added to the axis-aligned edge images (channel units).
    double noise_sigma = 10.0;
    std::uint64_t seed = 0;
    /// Step of the informational noise-free edge sweep, degrees.
    double angle_step = 5.0;
};

struct ThresholdCalibration {
    /// Largest min-over-neighbors distance on noisy axis-aligned step edges.
    double edge_bound = 0.0;
    /// Largest min-over-neighbors distance on the axis-aligned corner image.
    double corner_bound = 0.0;
    /// Rounded midpoint of (edge_bound, corner_bound); NaN when the interval is empty.
    double recommended = 0.0;
    /// Noise-free step edges over [0, 180): slanted edges can exceed the corner
    /// bound, so these are reported but do not constrain the threshold.
    std::vector<double> edge_angles;
    std::vector<double> edge_bounds;
};

/// Reports the threshold interval that rejects every noisy axis-aligned
/// step-edge pattern while keeping a black/white corner.
ThresholdCalibration calibrate_threshold(const CalibrationOptions& options = {});

/// Smallest of the eight neighbor distances for the pattern at (gx, gy), which
/// must have a full neighborhood.
std::uint32_t min_neighbor_distance(const BlockImage& blocks, int gx, int gy);

}  // namespace lsdp
