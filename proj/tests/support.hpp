#pragma once

#include "lsdp/image.hpp"

#include <cstdint>
#include <random>

namespace testing_support {

inline lsdp::Rgb random_color(std::mt19937_64& rng) {
    return {static_cast<std::uint8_t>(rng() & 0xFF), static_cast<std::uint8_t>(rng() & 0xFF),
            static_cast<std::uint8_t>(rng() & 0xFF)};
}

inline lsdp::ImageBuffer noise_image(int w, int h, std::mt19937_64& rng) {
    lsdp::ImageBuffer img(w, h);
    for (auto& p : img.pixels()) p = random_color(rng);
    return img;
}

// Few colors in rectangular patches: lots of exactly equal strengths.
inline lsdp::ImageBuffer patch_image(int w, int h, std::mt19937_64& rng) {
    const lsdp::Rgb palette[4] = {{0, 0, 0}, {255, 255, 255}, {200, 30, 30}, {20, 40, 220}};
    lsdp::ImageBuffer img(w, h, palette[rng() % 4]);
    const int patches = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < patches; ++i) {
        const int x0 = static_cast<int>(rng() % static_cast<std::uint64_t>(w));
        const int y0 = static_cast<int>(rng() % static_cast<std::uint64_t>(h));
        const int pw = 1 + static_cast<int>(rng() % 12);
        const int ph = 1 + static_cast<int>(rng() % 12);
        const lsdp::Rgb c = palette[rng() % 4];
        for (int y = y0; y < std::min(h, y0 + ph); ++y)
            for (int x = x0; x < std::min(w, x0 + pw); ++x) img.at(x, y) = c;
    }
    return img;
}

// Isolated random-colored squares on a dark field.
inline lsdp::ImageBuffer sparse_image(int w, int h, std::mt19937_64& rng) {
    lsdp::ImageBuffer img(w, h, {10, 10, 10});
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
        const int s = 2 + static_cast<int>(rng() % 6);
        const int x0 = static_cast<int>(rng() % static_cast<std::uint64_t>(w));
        const int y0 = static_cast<int>(rng() % static_cast<std::uint64_t>(h));
        const lsdp::Rgb c = random_color(rng);
        for (int y = y0; y < std::min(h, y0 + s); ++y)
            for (int x = x0; x < std::min(w, x0 + s); ++x) img.at(x, y) = c;
    }
    return img;
}

inline lsdp::ImageBuffer random_test_image(int w, int h, std::mt19937_64& rng) {
    switch (rng() % 3) {
        case 0: return noise_image(w, h, rng);
        case 1: return patch_image(w, h, rng);
        default: return sparse_image(w, h, rng);
    }
}

}  // namespace testing_support
