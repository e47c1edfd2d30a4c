#pragma once

#include "lsdp/image.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace lsdp {

/// Procedural stand-in for a labeled photo collection.
///
/// A category is a palette of four hues. An instance of a category is a set
/// of concentric annuli filled with anti-aliased color speckles on black; the
/// instance decides which palette color fills each annulus, so every instance
/// of a category shares colors but differs in how they are laid out radially.
/// Speckle radii span roughly 1.5 to 8 pixels so that some structure survives
/// at any scale factor between 0.25 and 2.
struct SyntheticStyle {
    int side = 256;
    int rings = 4;
    double outer_radius_fraction = 0.42;
    double ring_width_fraction = 0.10;
    double min_speckle_radius = 1.5;
    double max_speckle_radius = 8.0;
    /// Speckles per pixel of annulus area (before overlap rejection).
    double density = 0.006;
};

inline constexpr int kSyntheticCategories = 5;
inline constexpr int kSyntheticPaletteSize = 4;

/// Fully saturated hues centered in the 36-degree sectors used at 12 color levels.
Rgb synthetic_hue(int index, double value = 1.0);

std::array<int, kSyntheticPaletteSize> synthetic_palette(int category);

/// Ring-to-palette assignment of instance `instance` of `category`. Distinct
/// instances below 4^rings get distinct assignments.
std::vector<int> synthetic_assignment(int category, int instance, const SyntheticStyle& style = {});

ImageBuffer render_synthetic(int category, int instance, const SyntheticStyle& style = {});

/// Instances 1..count of a category (instance 0 is the conventional source).
std::vector<ImageBuffer> synthetic_similars(int category, int count, const SyntheticStyle& style = {});

/// Grid-aligned mosaic of 2l x 2l colored squares on black with the given
/// pixel pitch. Each square occupies exactly one pattern at block size l.
ImageBuffer render_block_mosaic(std::uint64_t seed, int side = 128, int block_size = 2, int pitch = 16);

}  // namespace lsdp
