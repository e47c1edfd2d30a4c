#include "lsdp/chroma.hpp"

#include "lsdp/error.hpp"

#include <algorithm>
#include <cmath>

namespace lsdp {

void QuantizerConfig::validate() const {
    if (levels < 3) throw DomainError("need at least 3 color levels (2 achromatic + 1 hue)");
    if (!(v_black >= 0.0 && v_black <= 1.0)) throw DomainError("v_black must lie in [0, 1]");
    if (!(s_gray >= 0.0 && s_gray <= 1.0)) throw DomainError("s_gray must lie in [0, 1]");
}

HsvColor rgb_to_hsv(Rgb c) {
    const int mx = std::max({c.r, c.g, c.b});
    const int mn = std::min({c.r, c.g, c.b});
    const int delta = mx - mn;

    HsvColor out;
    out.v = mx / 255.0;
    out.s = mx > 0 ? static_cast<double>(delta) / mx : 0.0;
    if (delta == 0) return out;

    double h;
    if (mx == c.r) {
        h = 60.0 * (c.g - c.b) / delta;
    } else if (mx == c.g) {
        h = 60.0 * (c.b - c.r) / delta + 120.0;
    } else {
        h = 60.0 * (c.r - c.g) / delta + 240.0;
    }
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.h = h;
    return out;
}

int quantize(Rgb c, const QuantizerConfig& cfg) {
    const HsvColor hsv = rgb_to_hsv(c);
    if (hsv.v < cfg.v_black) return 0;
    if (hsv.s < cfg.s_gray) return 1;
    const int sectors = cfg.levels - 2;
    const int sector = static_cast<int>(std::floor(hsv.h * sectors / 360.0));
    return 2 + std::clamp(sector, 0, sectors - 1);
}

}  // namespace lsdp
