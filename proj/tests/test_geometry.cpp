#include "lsdp/error.hpp"
#include "lsdp/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace lsdp;

TEST_CASE("centroid") {
    const std::vector<Point2> square = {{0, 0}, {2, 0}, {0, 2}, {2, 2}};
    CHECK(centroid(square).x == 1.0);
    CHECK(centroid(square).y == 1.0);
    const std::vector<Point2> one = {{7, 3}};
    CHECK(centroid(one).x == 7.0);
    CHECK(centroid(one).y == 3.0);
    const std::vector<Point2> three = {{1, 2}, {3, 4}, {5, 6}};
    CHECK(centroid(three).x == 3.0);
    CHECK(centroid(three).y == 4.0);
    CHECK_THROWS_AS(centroid(std::vector<Point2>{}), EmptyPointSet);
}

TEST_CASE("squared distance") {
    CHECK(squared_distance({3, 4}, {0, 0}) == 25.0);
    CHECK(squared_distance({2, 5}, {2, 5}) == 0.0);
    CHECK(squared_distance({1, 1}, {1, 4}) == 9.0);
}

TEST_CASE("bin edges") {
    const std::vector<double> d = {0, 10, 100, 42};
    const DistanceBins bins = make_bins(d, 4);
    CHECK(bins.upper_edges() == std::vector<double>{25, 50, 75, 100});
    CHECK(make_bins(d, 1).upper_edges() == std::vector<double>{100});
    CHECK_THROWS_AS(make_bins(std::vector<double>{0, 0, 0}, 4), DegenerateSpread);
    CHECK_THROWS_AS(make_bins(std::vector<double>{}, 4), EmptyPointSet);
    CHECK_THROWS_AS(make_bins(d, 0), DomainError);
    CHECK_THROWS_AS(DistanceBins(3, 0.0), DegenerateSpread);
}

TEST_CASE("bin assignment") {
    const DistanceBins bins(4, 100.0);
    CHECK(assign_bin(30, bins) == 2);
    CHECK(assign_bin(25, bins) == 1);
    CHECK(assign_bin(100, bins) == 4);
    CHECK(assign_bin(0, bins) == 1);
    CHECK(assign_bin(75.000000001, bins) == 3);
    CHECK(assign_bin(75.01, bins) == 4);
    CHECK_THROWS_AS(assign_bin(101, bins), OutOfRange);
    CHECK_THROWS_AS(assign_bin(-1, bins), OutOfRange);
    CHECK_THROWS_AS(assign_bin(NAN, bins), OutOfRange);
}

TEST_CASE("equal-area property over random point sets") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> coord(-500.0, 500.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 50);
        const int k = 1 + static_cast<int>(rng() % 12);
        std::vector<Point2> pts(static_cast<std::size_t>(n));
        for (auto& p : pts) p = {coord(rng), coord(rng)};
        if (n == 1) pts.push_back({pts[0].x + 1.0, pts[0].y});
        const Centroid c = centroid(pts);
        std::vector<double> d;
        for (const auto& p : pts) d.push_back(squared_distance(p, c));
        const DistanceBins bins = make_bins(d, k);
        const double mx = bins.max_sq();
        const auto& e = bins.upper_edges();
        double prev = 0.0;
        for (int i = 0; i < k; ++i) {
            const double width = e[static_cast<std::size_t>(i)] - prev;
            CHECK(std::abs(width - mx / k) <= 1e-9 * mx / k);
            // Annulus area pi * (r_i^2 - r_{i-1}^2) equals pi * max / k.
            const double area = std::numbers::pi * width;
            CHECK(std::abs(area - std::numbers::pi * mx / k) <= 1e-9 * std::numbers::pi * mx / k);
            prev = e[static_cast<std::size_t>(i)];
        }
    }
}

TEST_CASE("bin assignment is invariant to translation, rotation and scaling") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> coord(0.0, 100.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Point2> pts(20);
        for (auto& p : pts) p = {std::round(coord(rng)), std::round(coord(rng))};
        const auto bins_of = [](const std::vector<Point2>& q) {
            const Centroid c = centroid(q);
            std::vector<double> d;
            for (const auto& p : q) d.push_back(squared_distance(p, c));
            const DistanceBins b = make_bins(d, 5);
            std::vector<int> out;
            for (double v : d) out.push_back(assign_bin(v, b));
            return out;
        };
        const auto base = bins_of(pts);
        for (const double s : {0.5, 2.0, 3.0}) {
            std::vector<Point2> scaled = pts;
            for (auto& p : scaled) p = {p.x * s, p.y * s};
            CHECK(bins_of(scaled) == base);
        }
        std::vector<Point2> moved = pts;
        for (auto& p : moved) p = {p.x + 37.0, p.y - 11.0};
        CHECK(bins_of(moved) == base);
        const double a = angle(rng);
        std::vector<Point2> turned = pts;
        for (auto& p : turned) p = {p.x * std::cos(a) - p.y * std::sin(a), p.x * std::sin(a) + p.y * std::cos(a)};
        CHECK(bins_of(turned) == base);
    }
}
