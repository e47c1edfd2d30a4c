#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lsdp {

/// Two-class linear SVM with a sigmoid confidence on its margin:
/// confidence(x) = 1 / (1 + exp(calib_a * m(x) + calib_b)), m(x) = w.x + bias.
struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    double calib_a = -1.0;
    double calib_b = 0.0;
    int dim = 0;
    std::uint64_t seed = 0;

    double margin(std::span<const double> x) const;

    friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

struct TrainConfig {
    /// Soft-margin weight C; the Pegasos regularizer is lambda = 1 / (C * n).
    double c = 1.0;
    int epochs = 200;
    std::uint64_t seed = 0;
    /// Weight each class by n / (2 * n_class) in both the hinge loss and the
    /// calibration fit, so a handful of positives is not swamped.
    bool balance_classes = true;
    /// Value of the constant feature that carries the bias.
    double bias_feature = 1.0;
    /// Newton iterations for the sigmoid slope.
    int calibration_iterations = 100;

    void validate() const;
};

/// Deterministic given cfg.seed. Throws EmptyClass or DimensionMismatch.
LinearModel train(std::span<const std::vector<double>> positives,
                  std::span<const std::vector<double>> negatives, const TrainConfig& cfg);

/// Sigmoid of a raw margin under the model's calibration.
double confidence_from_margin(const LinearModel& model, double margin);
/// Throws DimensionMismatch.
double confidence(const LinearModel& model, std::span<const double> x);

std::string model_to_json(const LinearModel& model);
LinearModel model_from_json(const std::string& text);

}  // namespace lsdp
