#include "lsdp/geometry.hpp"

#include "lsdp/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lsdp {

DistanceBins::DistanceBins(int k, double max_sq) {
    if (k < 1) throw DomainError("bin count must be >= 1");
    if (!(max_sq > 0.0) || !std::isfinite(max_sq)) {
        throw DegenerateSpread("maximum squared distance must be positive");
    }
    upper_edges_.resize(static_cast<std::size_t>(k));
    // Closed form of the running sum Bin(n) = Bin(n-1) + max/k.
    for (int n = 1; n <= k; ++n) {
        upper_edges_[static_cast<std::size_t>(n - 1)] = max_sq * n / k;
    }
    upper_edges_.back() = max_sq;
}

Centroid centroid(std::span<const Point2> points) {
    if (points.empty()) throw EmptyPointSet("centroid of an empty point set");
    double sx = 0.0;
    double sy = 0.0;
    for (const Point2& p : points) {
        sx += p.x;
        sy += p.y;
    }
    const double n = static_cast<double>(points.size());
    return {sx / n, sy / n};
}

DistanceBins make_bins(std::span<const double> sq_distances, int k) {
    if (sq_distances.empty()) throw EmptyPointSet("no distances to bin");
    if (k < 1) throw DomainError("bin count must be >= 1");
    const double max_sq = *std::max_element(sq_distances.begin(), sq_distances.end());
    if (!(max_sq > 0.0)) throw DegenerateSpread("all points coincide with the centroid");
    return DistanceBins(k, max_sq);
}

int assign_bin(double d_sq, const DistanceBins& bins) {
    const double max_sq = bins.max_sq();
    const double slack = kBinEdgeTolerance * max_sq;
    if (!(d_sq >= 0.0) || d_sq > max_sq + slack) {
        throw OutOfRange("squared distance " + std::to_string(d_sq) + " outside [0, " +
                         std::to_string(max_sq) + "]");
    }
    const auto& edges = bins.upper_edges();
    for (std::size_t n = 0; n < edges.size(); ++n) {
        if (d_sq <= edges[n] + slack) return static_cast<int>(n) + 1;
    }
    return bins.k();
}

}  // namespace lsdp
