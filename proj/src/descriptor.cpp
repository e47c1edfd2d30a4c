#include "lsdp/descriptor.hpp"

#include "lsdp/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <json.hpp>
#include <optional>

namespace lsdp {

SpatialChromaticHistogram::SpatialChromaticHistogram(int k, int levels) : k_(k), levels_(levels) {
    if (k < 1) throw DomainError("distance bin count must be >= 1");
    if (levels < 1) throw DomainError("color level count must be >= 1");
    values_.assign(static_cast<std::size_t>(k) * static_cast<std::size_t>(levels), 0.0);
}

void SpatialChromaticHistogram::normalize_by_max() {
    const double mx = *std::max_element(values_.begin(), values_.end());
    if (!(mx > 0.0)) return;
    for (double& v : values_) v /= mx;
}

std::vector<PlacedPattern> to_placed(std::span<const FeaturePoint> features) {
    std::vector<PlacedPattern> out;
    out.reserve(features.size());
    for (const FeaturePoint& f : features) {
        out.push_back({{static_cast<double>(f.grid_x), static_cast<double>(f.grid_y)}, f.elements});
    }
    return out;
}

SpatialChromaticHistogram build_descriptor(std::span<const PlacedPattern> patterns, int k,
                                           const QuantizerConfig& cfg) {
    cfg.validate();
    SpatialChromaticHistogram hist(k, cfg.levels);
    hist.set_feature_count(static_cast<int>(patterns.size()));
    if (patterns.empty()) return hist;

    std::vector<Point2> positions;
    positions.reserve(patterns.size());
    for (const PlacedPattern& p : patterns) positions.push_back(p.position);
    const Centroid c = centroid(positions);

    std::vector<double> sq(positions.size());
    std::transform(positions.begin(), positions.end(), sq.begin(),
                   [&](Point2 p) { return squared_distance(p, c); });

    // Coincident points carry no spread; everything goes to the innermost bin.
    std::optional<DistanceBins> bins;
    try {
        bins.emplace(make_bins(sq, k));
    } catch (const DegenerateSpread&) {
    }
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        const int bin = bins ? assign_bin(sq[i], *bins) : 1;
        for (const Rgb& color : patterns[i].elements) hist.at(bin, quantize(color, cfg)) += 1.0;
    }
    hist.normalize_by_max();
    return hist;
}

SpatialChromaticHistogram build_descriptor(std::span<const FeaturePoint> features, int k,
                                           const QuantizerConfig& cfg) {
    const auto placed = to_placed(features);
    return build_descriptor(std::span<const PlacedPattern>(placed), k, cfg);
}

double descriptor_distance(const SpatialChromaticHistogram& a, const SpatialChromaticHistogram& b) {
    if (a.k() != b.k() || a.levels() != b.levels()) {
        throw ShapeMismatch(fmt::format("descriptor shapes differ: {}x{} vs {}x{}", a.k(), a.levels(),
                                        b.k(), b.levels()));
    }
    double d = 0.0;
    const auto av = a.values();
    const auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) d += std::abs(av[i] - bv[i]);
    return d;
}

std::vector<double> flatten(const SpatialChromaticHistogram& h) {
    return {h.values().begin(), h.values().end()};
}

void DescriptorConfig::validate() const {
    detector.validate();
    quantizer.validate();
    if (k < 1) throw DomainError("distance bin count must be >= 1");
}

SpatialChromaticHistogram describe_image(const ImageBuffer& img, const DescriptorConfig& cfg) {
    cfg.validate();
    const auto features = detect_features(img, cfg.detector);
    return build_descriptor(std::span<const FeaturePoint>(features), cfg.k, cfg.quantizer);
}

std::vector<SpatialChromaticHistogram> describe_images(std::span<const ImageBuffer> images,
                                                       const DescriptorConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(images.size());
    std::vector<SpatialChromaticHistogram> out(images.size(),
                                               SpatialChromaticHistogram(cfg.k, cfg.quantizer.levels));
    std::vector<std::exception_ptr> errors(images.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = describe_image(images[static_cast<std::size_t>(i)], cfg);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

std::vector<SpatialChromaticHistogram> describe_images_serial(std::span<const ImageBuffer> images,
                                                              const DescriptorConfig& cfg) {
    cfg.validate();
    std::vector<SpatialChromaticHistogram> out;
    out.reserve(images.size());
    for (const ImageBuffer& img : images) {
        const auto features = detect_features_serial(img, cfg.detector);
        out.push_back(build_descriptor(std::span<const FeaturePoint>(features), cfg.k, cfg.quantizer));
    }
    return out;
}

std::string descriptor_to_json(const SpatialChromaticHistogram& h) {
    nlohmann::json rows = nlohmann::json::array();
    for (int bin = 1; bin <= h.k(); ++bin) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < h.levels(); ++c) row.push_back(h.at(bin, c));
        rows.push_back(std::move(row));
    }
    const nlohmann::json j = {{"k", h.k()},
                              {"levels", h.levels()},
                              {"feature_count", h.feature_count()},
                              {"values", rows}};
    return j.dump() + "\n";
}

SpatialChromaticHistogram descriptor_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        SpatialChromaticHistogram h(j.at("k").get<int>(), j.at("levels").get<int>());
        h.set_feature_count(j.at("feature_count").get<int>());
        const auto& rows = j.at("values");
        if (!rows.is_array() || static_cast<int>(rows.size()) != h.k()) {
            throw FormatError("descriptor values must have k rows");
        }
        for (int bin = 1; bin <= h.k(); ++bin) {
            const auto& row = rows[static_cast<std::size_t>(bin - 1)];
            if (!row.is_array() || static_cast<int>(row.size()) != h.levels()) {
                throw FormatError("descriptor row must have L values");
            }
            for (int c = 0; c < h.levels(); ++c) {
                const double v = row[static_cast<std::size_t>(c)].get<double>();
                if (!(v >= 0.0 && v <= 1.0)) throw FormatError("descriptor value outside [0, 1]");
                h.at(bin, c) = v;
            }
        }
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad descriptor JSON: ") + e.what());
    }
}

std::string descriptor_to_csv(const SpatialChromaticHistogram& h) {
    std::string out = "bin";
    for (int c = 0; c < h.levels(); ++c) out += fmt::format(",c{}", c);
    out += '\n';
    for (int bin = 1; bin <= h.k(); ++bin) {
        out += std::to_string(bin);
        for (int c = 0; c < h.levels(); ++c) out += fmt::format(",{}", h.at(bin, c));
        out += '\n';
    }
    return out;
}

}  // namespace lsdp
