#include "lsdp/descriptor.hpp"
#include "lsdp/error.hpp"
#include "lsdp/synthetic.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace lsdp;

namespace {

constexpr Rgb kRed{255, 0, 0};

PlacedPattern placed(double x, double y, Rgb c) { return {{x, y}, {c, c, c, c}}; }

std::vector<PlacedPattern> random_patterns(std::mt19937_64& rng, int n) {
    std::vector<PlacedPattern> out;
    for (int i = 0; i < n; ++i) {
        PlacedPattern p;
        p.position = {static_cast<double>(rng() % 100), static_cast<double>(rng() % 100)};
        for (auto& e : p.elements) e = testing_support::random_color(rng);
        out.push_back(p);
    }
    return out;
}

}  // namespace

TEST_CASE("empty feature list gives the zero matrix") {
    const auto h = build_descriptor(std::span<const PlacedPattern>{}, 4, QuantizerConfig{});
    CHECK(h.k() == 4);
    CHECK(h.levels() == 12);
    CHECK(h.feature_count() == 0);
    for (double v : h.values()) CHECK(v == 0.0);
}

TEST_CASE("single black feature") {
    const std::vector<PlacedPattern> one = {placed(3, 4, {0, 0, 0})};
    const auto h = build_descriptor(one, 4, QuantizerConfig{});
    CHECK(h.at(1, 0) == 1.0);
    double total = 0.0;
    for (double v : h.values()) total += v;
    CHECK(total == 1.0);
}

TEST_CASE("three red features in bins 1, 2, 2") {
    // Centroid at the origin; squared distances 0, 8, 8 with max 8 and k = 2.
    const std::vector<PlacedPattern> pts = {placed(0, 0, kRed), placed(2, 2, kRed), placed(-2, -2, kRed)};
    const auto h = build_descriptor(pts, 2, QuantizerConfig{});
    CHECK(h.at(1, 2) == 0.5);
    CHECK(h.at(2, 2) == 1.0);
    std::vector<oracle::LatticePattern> lattice = {{0, 0, pts[0].elements}, {2, 2, pts[1].elements},
                                                   {-2, -2, pts[2].elements}};
    CHECK(flatten(h) == oracle::descriptor(lattice, 2, QuantizerConfig{}));
}

TEST_CASE("coincident features all land in the first bin") {
    const std::vector<PlacedPattern> pts = {placed(5, 5, kRed), placed(5, 5, {0, 0, 0})};
    const auto h = build_descriptor(pts, 3, QuantizerConfig{});
    CHECK(h.at(1, 2) == 1.0);
    CHECK(h.at(1, 0) == 1.0);
}

TEST_CASE("descriptor matches the straight-line oracle") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 40);
        const int k = 1 + static_cast<int>(rng() % 10);
        const int levels_choice[] = {6, 12, 24};
        const QuantizerConfig q{levels_choice[rng() % 3], 0.2, 0.2};
        const auto pts = random_patterns(rng, n);
        std::vector<oracle::LatticePattern> lattice;
        for (const auto& p : pts) {
            lattice.push_back({static_cast<int>(p.position.x), static_cast<int>(p.position.y), p.elements});
        }
        CHECK(flatten(build_descriptor(pts, k, q)) == oracle::descriptor(lattice, k, q));
    }
}

TEST_CASE("descriptor invariances on point sets") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> angle(0.0, 360.0);
    for (int trial = 0; trial < 100; ++trial) {
        auto pts = random_patterns(rng, 2 + static_cast<int>(rng() % 30));
        const QuantizerConfig q;
        const auto base = build_descriptor(pts, 4, q);

        auto shuffled = pts;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(build_descriptor(shuffled, 4, q) == base);

        for (const double s : {0.5, 2.0, 3.0}) {
            auto scaled = pts;
            for (auto& p : scaled) p.position = {p.position.x * s, p.position.y * s};
            CHECK(build_descriptor(scaled, 4, q) == base);
        }

        const double a = angle(rng) * std::numbers::pi / 180.0;
        auto turned = pts;
        for (auto& p : turned) {
            const double x = p.position.x, y = p.position.y;
            p.position = {x * std::cos(a) - y * std::sin(a) + 1000.0, x * std::sin(a) + y * std::cos(a) - 50.0};
        }
        const auto r = build_descriptor(turned, 4, q);
        for (std::size_t i = 0; i < r.values().size(); ++i) CHECK(std::abs(r.values()[i] - base.values()[i]) <= 1e-9);
    }
}

TEST_CASE("normalization is idempotent and the maximum is one") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        auto h = build_descriptor(random_patterns(rng, 1 + static_cast<int>(rng() % 20)), 4, QuantizerConfig{});
        CHECK(*std::max_element(h.values().begin(), h.values().end()) == 1.0);
        const auto before = h;
        h.normalize_by_max();
        CHECK(h == before);
    }
}

TEST_CASE("distance and flattening") {
    SpatialChromaticHistogram zero(4, 12), one(4, 12);
    one.at(2, 3) = 1.0;
    CHECK(descriptor_distance(zero, zero) == 0.0);
    CHECK(descriptor_distance(zero, one) == 1.0);
    CHECK(descriptor_distance(one, zero) == 1.0);
    CHECK_THROWS_AS(descriptor_distance(zero, SpatialChromaticHistogram(4, 6)), ShapeMismatch);

    const auto v = flatten(one);
    CHECK(v.size() == 48);
    CHECK(v[15] == 1.0);
    CHECK(std::count(v.begin(), v.end(), 0.0) == 47);
    const auto z = flatten(zero);
    CHECK(std::all_of(z.begin(), z.end(), [](double x) { return x == 0.0; }));

    CHECK_THROWS_AS(SpatialChromaticHistogram(0, 12), DomainError);
}

TEST_CASE("descriptor serialization") {
    std::mt19937_64 rng(43);
    const auto h = build_descriptor(random_patterns(rng, 25), 4, QuantizerConfig{});
    CHECK(descriptor_from_json(descriptor_to_json(h)) == h);
    const std::string csv = descriptor_to_csv(h);
    CHECK(csv.rfind("bin,c0,c1,c2,c3,c4,c5,c6,c7,c8,c9,c10,c11\n1,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK_THROWS_AS(descriptor_from_json("{}"), FormatError);
    CHECK_THROWS_AS(descriptor_from_json(R"({"k":1,"levels":3,"feature_count":0,"values":[[0,2,0]]})"), FormatError);
    CHECK_THROWS_AS(descriptor_from_json(R"({"k":2,"levels":3,"feature_count":0,"values":[[0,0,0]]})"), FormatError);
}

TEST_CASE("image descriptors") {
    DescriptorConfig cfg;
    SUBCASE("uniform image") {
        const auto h = describe_image(ImageBuffer(64, 64, Rgb{90, 30, 200}), cfg);
        CHECK(h.feature_count() == 0);
        for (double v : h.values()) CHECK(v == 0.0);
    }
    SUBCASE("parallel batch equals the serial batch") {
        std::vector<ImageBuffer> images;
        for (int i = 0; i < 6; ++i) images.push_back(render_synthetic(i % kSyntheticCategories, i, SyntheticStyle{128}));
        CHECK(describe_images(images, cfg) == describe_images_serial(images, cfg));
    }
    SUBCASE("errors propagate from a batch") {
        std::vector<ImageBuffer> images = {ImageBuffer(64, 64), ImageBuffer(4, 4)};
        CHECK_THROWS_AS(describe_images(images, cfg), ImageTooSmall);
    }
    SUBCASE("quarter turns keep the descriptor") {
        const ImageBuffer img = render_synthetic(2, 3);
        const auto base = describe_image(img, cfg);
        for (const double deg : {90.0, 180.0, 270.0}) {
            const auto r = describe_image(rotate(img, deg, Interpolation::NearestNeighbor), cfg);
            CHECK(descriptor_distance(base, r) <= 0.1);
        }
    }
    SUBCASE("invalid configuration") {
        cfg.k = 0;
        CHECK_THROWS_AS(describe_image(ImageBuffer(64, 64), cfg), DomainError);
    }
}
