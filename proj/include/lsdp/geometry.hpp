#pragma once

#include <span>
#include <vector>

namespace lsdp {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Center of gravity of a point set, in the units of the points (pattern grid).
struct Centroid {
    double x = 0.0;
    double y = 0.0;
};

/// Upper edges of k distance bins, equally spaced in squared distance so each
/// bin covers an annulus of the same area.
class DistanceBins {
public:
    DistanceBins(int k, double max_sq);

    int k() const noexcept { return static_cast<int>(upper_edges_.size()); }
    double max_sq() const noexcept { return upper_edges_.back(); }
    /// Edge n (1-based) is n * max_sq / k.
    const std::vector<double>& upper_edges() const noexcept { return upper_edges_; }

private:
    std::vector<double> upper_edges_;
};

Centroid centroid(std::span<const Point2> points);

inline double squared_distance(Point2 p, Centroid c) {
    const double dx = p.x - c.x;
    const double dy = p.y - c.y;
    return dx * dx + dy * dy;
}

/// Throws DegenerateSpread when every distance is zero.
DistanceBins make_bins(std::span<const double> sq_distances, int k);

/// Relative slack used by assign_bin so that values a few ulps past an edge
/// (from rounding in rotated or scaled coordinates) stay in the lower bin.
inline constexpr double kBinEdgeTolerance = 1e-9;

/// 1-based bin index: the smallest n with d_sq <= edge n. Zero lands in bin 1,
/// max_sq in bin k. Throws OutOfRange for d_sq beyond max_sq (or negative).
int assign_bin(double d_sq, const DistanceBins& bins);

}  // namespace lsdp
