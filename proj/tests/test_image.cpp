#include "lsdp/error.hpp"
#include "lsdp/image.hpp"
#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

using namespace lsdp;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

ImageBuffer gradient(int w, int h) {
    ImageBuffer img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.at(x, y) = {static_cast<std::uint8_t>(x * 7), static_cast<std::uint8_t>(y * 11),
                            static_cast<std::uint8_t>((x + y) * 3)};
    return img;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("lsdp_test_" + name);
}

}  // namespace

TEST_CASE("image buffer rejects empty dimensions") {
    CHECK_THROWS_AS(ImageBuffer(0, 3), DomainError);
    CHECK_THROWS_AS(ImageBuffer(2, 2, std::vector<Rgb>(3)), DomainError);
}

TEST_CASE("decode 2x2 PPM reproduces the payload bytes") {
    std::string file = "P6\n2 2\n255\n";
    const std::uint8_t payload[12] = {1, 2, 3, 4, 5, 6, 7, 8, 9, 250, 251, 252};
    file.append(reinterpret_cast<const char*>(payload), 12);
    const ImageBuffer img = decode_ppm(bytes_of(file));
    REQUIRE(img.width() == 2);
    REQUIRE(img.height() == 2);
    CHECK(img.at(0, 0) == Rgb{1, 2, 3});
    CHECK(img.at(1, 0) == Rgb{4, 5, 6});
    CHECK(img.at(0, 1) == Rgb{7, 8, 9});
    CHECK(img.at(1, 1) == Rgb{250, 251, 252});
}

TEST_CASE("header comments are skipped") {
    std::string file = "P6 # comment\n1 # w\n1\n255\n";
    file += std::string("\x0a\x0b\x0c", 3);
    CHECK(decode_ppm(bytes_of(file)).at(0, 0) == Rgb{10, 11, 12});
}

TEST_CASE("malformed PPM input") {
    SUBCASE("truncated payload") {
        std::string file = "P6\n3 3\n255\n" + std::string(24, '\0');
        CHECK_THROWS_AS(decode_ppm(bytes_of(file)), FormatError);
    }
    SUBCASE("wrong magic") { CHECK_THROWS_AS(decode_ppm(bytes_of("P3\n1 1\n255\n0 0 0")), FormatError); }
    SUBCASE("unsupported maxval") {
        CHECK_THROWS_AS(decode_ppm(bytes_of("P6\n1 1\n65535\n" + std::string(6, '\0'))), FormatError);
    }
    SUBCASE("empty") { CHECK_THROWS_AS(decode_ppm({}), FormatError); }
    SUBCASE("zero width") { CHECK_THROWS_AS(decode_ppm(bytes_of("P6\n0 1\n255\n")), FormatError); }
}

TEST_CASE("1x1 black image encodes to a minimal file") {
    const auto bytes = encode_ppm(ImageBuffer(1, 1));
    const std::string expected = std::string("P6\n1 1\n255\n") + std::string(3, '\0');
    CHECK(std::string(bytes.begin(), bytes.end()) == expected);
}

TEST_CASE("save and load round trip") {
    std::mt19937_64 rng(5);
    const auto path = temp_file("roundtrip.ppm");
    for (int i = 0; i < 10; ++i) {
        const int w = 1 + static_cast<int>(rng() % 40);
        const int h = 1 + static_cast<int>(rng() % 40);
        const ImageBuffer img = testing_support::noise_image(w, h, rng);
        save_image(img, path);
        CHECK(load_image(path) == img);
        CHECK(decode_ppm(encode_ppm(img)) == img);
    }
    std::filesystem::remove(path);
}

TEST_CASE("file errors") {
    CHECK_THROWS_AS(load_image("/nonexistent/dir/x.ppm"), IOError);
    CHECK_THROWS_AS(save_image(ImageBuffer(1, 1), "/nonexistent/dir/x.ppm"), IOError);
}

TEST_CASE("rotation by zero is the identity") {
    const ImageBuffer img = gradient(13, 7);
    CHECK(rotate(img, 0.0) == img);
    CHECK(rotate(img, 0.0, Interpolation::NearestNeighbor) == img);
    CHECK(rotate(img, 360.0) == img);
}

TEST_CASE("quarter turns") {
    const ImageBuffer img = gradient(9, 5);
    const ImageBuffer r90 = rotate(img, 90.0, Interpolation::NearestNeighbor);
    CHECK(r90.width() == 5);
    CHECK(r90.height() == 9);
    CHECK(rotate(r90, 270.0, Interpolation::NearestNeighbor) == img);
    CHECK(rotate(rotate(img, 90.0), -90.0) == img);

    const ImageBuffer r180 = rotate(img, 180.0, Interpolation::Bilinear);
    REQUIRE(r180.width() == 9);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 9; ++x) CHECK(r180.at(8 - x, 4 - y) == img.at(x, y));

    // Counter-clockwise as displayed: the top-right corner moves to the top-left.
    CHECK(r90.at(0, 0) == img.at(8, 0));
    CHECK(rotate(rotate(rotate(r90, 90), 90), 90) == img);
}

TEST_CASE("arbitrary rotation enlarges the canvas and fills the corners") {
    const ImageBuffer img(20, 10, Rgb{200, 100, 50});
    const ImageBuffer r = rotate(img, 45.0, Interpolation::Bilinear, Rgb{1, 2, 3});
    CHECK(r.width() == 22);
    CHECK(r.height() == 22);
    CHECK(r.at(0, 0) == Rgb{1, 2, 3});
    CHECK(r.at(11, 11) == Rgb{200, 100, 50});
    CHECK(rotate(img, 30.0) == rotate(img, 30.0));
}

TEST_CASE("scaling") {
    const ImageBuffer img = gradient(6, 4);
    CHECK(scale(img, 1.0) == img);
    CHECK(scale(img, 1.0, Interpolation::NearestNeighbor) == img);

    SUBCASE("2x nearest neighbor replicates pixels") {
        const ImageBuffer two(2, 2, std::vector<Rgb>{{1, 1, 1}, {2, 2, 2}, {3, 3, 3}, {4, 4, 4}});
        const ImageBuffer up = scale(two, 2.0, Interpolation::NearestNeighbor);
        REQUIRE(up.width() == 4);
        REQUIRE(up.height() == 4);
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) CHECK(up.at(x, y) == two.at(x / 2, y / 2));
    }
    SUBCASE("output dimensions round") {
        const ImageBuffer s = scale(ImageBuffer(10, 7), 0.25);
        CHECK(s.width() == 3);
        CHECK(s.height() == 2);
    }
    SUBCASE("degenerate output") {
        CHECK_THROWS_AS(scale(ImageBuffer(4, 4), 0.1), DegenerateOutput);
        CHECK_THROWS_AS(scale(ImageBuffer(4, 4), 0.0), DomainError);
        CHECK_THROWS_AS(scale(ImageBuffer(4, 4), -1.0), DomainError);
    }
    SUBCASE("integer upscale then reciprocal is lossless at nearest neighbor") {
        std::mt19937_64 rng(11);
        for (int f = 2; f <= 4; ++f) {
            const ImageBuffer src = testing_support::noise_image(7, 5, rng);
            const ImageBuffer up = scale(src, f, Interpolation::NearestNeighbor);
            CHECK(scale(up, 1.0 / f, Interpolation::NearestNeighbor) == src);
        }
    }
    SUBCASE("bilinear preserves flat images") {
        const ImageBuffer flat(9, 9, Rgb{40, 80, 120});
        const ImageBuffer s = scale(flat, 1.7);
        for (const Rgb& p : s.pixels()) CHECK(p == Rgb{40, 80, 120});
    }
}
