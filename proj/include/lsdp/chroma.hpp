#pragma once

#include "lsdp/image.hpp"

namespace lsdp {

struct HsvColor {
    double h = 0.0;  ///< degrees in [0, 360); 0 for achromatic colors
    double s = 0.0;  ///< [0, 1]
    double v = 0.0;  ///< [0, 1]
};

/// Color bins: 0 = black (v < v_black), 1 = white/gray (s < s_gray), then
/// levels - 2 equal hue sectors starting at red.
struct QuantizerConfig {
    int levels = 12;
    double v_black = 0.2;
    double s_gray = 0.2;

    void validate() const;
};

HsvColor rgb_to_hsv(Rgb c);

int quantize(Rgb c, const QuantizerConfig& cfg);

}  // namespace lsdp
