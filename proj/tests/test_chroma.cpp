#include "lsdp/chroma.hpp"
#include "lsdp/error.hpp"

#include <doctest.h>

#include <vector>

using namespace lsdp;

TEST_CASE("rgb to hsv") {
    const HsvColor red = rgb_to_hsv({255, 0, 0});
    CHECK(red.h == 0.0);
    CHECK(red.s == 1.0);
    CHECK(red.v == 1.0);
    const HsvColor black = rgb_to_hsv({0, 0, 0});
    CHECK(black.v == 0.0);
    CHECK(black.s == 0.0);
    const HsvColor gray = rgb_to_hsv({128, 128, 128});
    CHECK(gray.s == 0.0);
    CHECK(gray.v == doctest::Approx(0.502).epsilon(0.001));
    CHECK(rgb_to_hsv({0, 255, 0}).h == 120.0);
    CHECK(rgb_to_hsv({0, 0, 255}).h == 240.0);
    CHECK(rgb_to_hsv({255, 0, 1}).h == doctest::Approx(360.0 - 60.0 / 255.0));
}

TEST_CASE("quantizer bins") {
    const QuantizerConfig q;
    CHECK(quantize({0, 0, 0}, q) == 0);
    CHECK(quantize({255, 255, 255}, q) == 1);
    CHECK(quantize({255, 0, 0}, q) == 2);
    CHECK(quantize({40, 40, 40}, q) == 0);
    CHECK(quantize({200, 190, 195}, q) == 1);
    // 120 degrees starts the fourth 36-degree sector.
    CHECK(quantize({0, 255, 0}, q) == 5);
    CHECK(quantize({255, 0, 1}, q) == 11);
    CHECK(quantize({0, 255, 0}, QuantizerConfig{6, 0.2, 0.2}) == 3);
    CHECK(quantize({0, 255, 0}, QuantizerConfig{24, 0.2, 0.2}) == 9);
}

TEST_CASE("quantizer configuration") {
    CHECK_THROWS_AS(QuantizerConfig({2, 0.2, 0.2}).validate(), DomainError);
    CHECK_THROWS_AS(QuantizerConfig({12, -0.1, 0.2}).validate(), DomainError);
    CHECK_THROWS_AS(QuantizerConfig({12, 0.2, 1.5}).validate(), DomainError);
    CHECK_NOTHROW(QuantizerConfig({3, 0.0, 0.0}).validate());
}

TEST_CASE("quantizer is total over the color cube") {
    for (const int levels : {3, 6, 12, 24}) {
        const QuantizerConfig q{levels, 0.2, 0.2};
        std::vector<int> hits(static_cast<std::size_t>(levels), 0);
        for (int r = 0; r < 256; r += 4)
            for (int g = 0; g < 256; g += 4)
                for (int b = 0; b < 256; b += 4) {
                    const int bin = quantize({static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                              static_cast<std::uint8_t>(b)},
                                             q);
                    REQUIRE(bin >= 0);
                    REQUIRE(bin < levels);
                    ++hits[static_cast<std::size_t>(bin)];
                }
        for (const int h : hits) CHECK(h > 0);
        // Odd-stride sample reaches the 255 faces too.
        for (int r = 0; r < 256; r += 51)
            for (int g = 0; g < 256; g += 17)
                for (int b = 0; b < 256; b += 5) {
                    const int bin = quantize({static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                              static_cast<std::uint8_t>(b)},
                                             q);
                    CHECK((bin >= 0 && bin < levels));
                }
    }
}
