#include "lsdp/classify.hpp"

#include "lsdp/error.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <random>

namespace lsdp {

namespace {

// Slope used when the fit cannot produce a negative one (e.g. all margins zero),
// so confidence stays strictly increasing in the margin.
constexpr double kFallbackSlope = -1.0;

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid_neg(double z) {
    // 1 / (1 + exp(z)), stable on both tails.
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

struct Sample {
    std::span<const double> x;
    double label;
    double weight;
};

// Platt-style fit of the slope alone (intercept pinned at zero) so that the
// 0.5 crossing stays on the SVM decision boundary.
double fit_slope(const std::vector<double>& margins, const std::vector<Sample>& samples,
                 int n_pos, int n_neg, int iterations) {
    const double t_pos = (n_pos + 1.0) / (n_pos + 2.0);
    const double t_neg = 1.0 / (n_neg + 2.0);

    const auto loss = [&](double a) {
        double l = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double t = samples[i].label > 0 ? t_pos : t_neg;
            const double f = a * margins[i];
            l += samples[i].weight * (t * softplus(f) + (1.0 - t) * softplus(-f));
        }
        return l;
    };

    double a = kFallbackSlope;
    double current = loss(a);
    for (int it = 0; it < iterations; ++it) {
        double g = 0.0;
        double h = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double t = samples[i].label > 0 ? t_pos : t_neg;
            const double m = margins[i];
            const double p = sigmoid_neg(a * m);
            g += samples[i].weight * m * (t - p);
            h += samples[i].weight * m * m * p * (1.0 - p);
        }
        if (std::abs(g) < 1e-12 || h <= 1e-300) break;
        double step = g / h;
        bool improved = false;
        for (int ls = 0; ls < 40; ++ls) {
            const double candidate = a - step;
            const double value = loss(candidate);
            if (value < current) {
                a = candidate;
                current = value;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    return a < 0.0 ? a : kFallbackSlope;
}

}  // namespace

double LinearModel::margin(std::span<const double> x) const { return dot(weights, x) + bias; }

void TrainConfig::validate() const {
    if (!(c > 0.0)) throw DomainError("regularization C must be positive");
    if (epochs < 1) throw DomainError("epochs must be >= 1");
    if (calibration_iterations < 0) throw DomainError("calibration iterations must be >= 0");
}

LinearModel train(std::span<const std::vector<double>> positives,
                  std::span<const std::vector<double>> negatives, const TrainConfig& cfg) {
    cfg.validate();
    if (positives.empty()) throw EmptyClass("no positive training vectors");
    if (negatives.empty()) throw EmptyClass("no negative training vectors");
    const std::size_t dim = positives.front().size();
    for (const auto& v : positives) {
        if (v.size() != dim) throw DimensionMismatch("positive vectors differ in dimension");
    }
    for (const auto& v : negatives) {
        if (v.size() != dim) throw DimensionMismatch("negative vector dimension differs from positives");
    }

    const double n = static_cast<double>(positives.size() + negatives.size());
    const double w_pos = cfg.balance_classes ? n / (2.0 * positives.size()) : 1.0;
    const double w_neg = cfg.balance_classes ? n / (2.0 * negatives.size()) : 1.0;

    std::vector<Sample> samples;
    samples.reserve(positives.size() + negatives.size());
    for (const auto& v : positives) samples.push_back({v, 1.0, w_pos});
    for (const auto& v : negatives) samples.push_back({v, -1.0, w_neg});

    // Weight vector with the bias as a trailing coordinate on a constant feature.
    const std::size_t aug = dim + 1;
    const double lambda = 1.0 / (cfg.c * n);
    const double radius = std::sqrt(2.0 / lambda);
    std::vector<double> w(aug, 0.0);
    std::vector<double> avg(aug, 0.0);

    std::mt19937_64 rng(cfg.seed);
    const std::uint64_t total = static_cast<std::uint64_t>(cfg.epochs) * samples.size();
    const std::uint64_t average_from = total / 2 + 1;
    std::uint64_t averaged = 0;

    for (std::uint64_t t = 1; t <= total; ++t) {
        const Sample& s = samples[static_cast<std::size_t>(rng() % samples.size())];
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        const double m = s.label * (dot(std::span<const double>(w).first(dim), s.x) +
                                    w[dim] * cfg.bias_feature);
        const double shrink = 1.0 - eta * lambda;
        for (double& wi : w) wi *= shrink;
        if (m < 1.0) {
            const double step = eta * s.weight * s.label;
            for (std::size_t i = 0; i < dim; ++i) w[i] += step * s.x[i];
            w[dim] += step * cfg.bias_feature;
        }
        // Project onto the ball that contains the optimum.
        double norm = 0.0;
        for (const double wi : w) norm += wi * wi;
        norm = std::sqrt(norm);
        if (norm > radius) {
            const double f = radius / norm;
            for (double& wi : w) wi *= f;
        }
        if (t >= average_from) {
            ++averaged;
            const double f = 1.0 / static_cast<double>(averaged);
            for (std::size_t i = 0; i < aug; ++i) avg[i] += (w[i] - avg[i]) * f;
        }
    }

    LinearModel model;
    model.dim = static_cast<int>(dim);
    model.seed = cfg.seed;
    model.weights.assign(avg.begin(), avg.begin() + static_cast<std::ptrdiff_t>(dim));
    model.bias = avg[dim] * cfg.bias_feature;

    std::vector<double> margins;
    margins.reserve(samples.size());
    for (const Sample& s : samples) margins.push_back(model.margin(s.x));
    std::vector<Sample> calib = samples;
    if (!cfg.balance_classes) {
        for (Sample& s : calib) s.weight = 1.0;
    }
    model.calib_a = fit_slope(margins, calib, static_cast<int>(positives.size()),
                              static_cast<int>(negatives.size()), cfg.calibration_iterations);
    model.calib_b = 0.0;
    return model;
}

double confidence_from_margin(const LinearModel& model, double margin) {
    return sigmoid_neg(model.calib_a * margin + model.calib_b);
}

double confidence(const LinearModel& model, std::span<const double> x) {
    if (static_cast<int>(x.size()) != model.dim) {
        throw DimensionMismatch("input has dimension " + std::to_string(x.size()) + ", model expects " +
                                std::to_string(model.dim));
    }
    return confidence_from_margin(model, model.margin(x));
}

std::string model_to_json(const LinearModel& model) {
    const nlohmann::json j = {{"weights", model.weights}, {"bias", model.bias},
                              {"calib_a", model.calib_a}, {"calib_b", model.calib_b},
                              {"dim", model.dim},         {"seed", model.seed}};
    return j.dump() + "\n";
}

LinearModel model_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        LinearModel m;
        m.weights = j.at("weights").get<std::vector<double>>();
        m.bias = j.at("bias").get<double>();
        m.calib_a = j.at("calib_a").get<double>();
        m.calib_b = j.at("calib_b").get<double>();
        m.dim = j.at("dim").get<int>();
        m.seed = j.value("seed", std::uint64_t{0});
        if (static_cast<int>(m.weights.size()) != m.dim) {
            throw FormatError("model weights length does not match dim");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad model JSON: ") + e.what());
    }
}

}  // namespace lsdp
