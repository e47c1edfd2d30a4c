#pragma once

#include "lsdp/classify.hpp"
#include "lsdp/descriptor.hpp"
#include "lsdp/image.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace lsdp {

inline constexpr std::array<double, 8> kScaleFactors = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
inline constexpr int kRotationStimuli = 360;

struct ExperimentConfig {
    DescriptorConfig descriptor;
    TrainConfig train;
    Interpolation interp = Interpolation::Bilinear;
    Rgb fill{};
    std::uint64_t seed = 0;
    /// Stimuli drawn (seeded) as the positive class: 6 of 360 rotations, 1 of 8 scales.
    int rotation_positives = 6;
    int scale_positives = 1;
    int min_similars = 99;
};

struct ReportRow {
    double param = 0.0;
    /// NaN when the stimulus failed; `error` then says why.
    double confidence = 0.0;
    std::string error;

    bool ok() const { return error.empty(); }
};

struct ReportSummary {
    double min = 0.0;
    double mean = 0.0;
    /// Over all rows; a failed row counts as not matched.
    double fraction_above = 0.0;
    int failed = 0;
};

struct ExperimentReport {
    std::string kind;  ///< "rotation" or "scale"
    ExperimentConfig config;
    std::vector<double> training_params;
    std::vector<ReportRow> rows;
    std::string source_name;

    ReportSummary summary() const;
};

ReportSummary summarize(std::span<const ReportRow> rows);

/// Rotations by 1..360 degrees; trains on `rotation_positives` of them against the similars.
ExperimentReport run_rotation_experiment(const ImageBuffer& source, std::span<const ImageBuffer> similars,
                                         const ExperimentConfig& cfg);
/// The eight fixed scale factors; trains on `scale_positives` of them against the similars.
ExperimentReport run_scale_experiment(const ImageBuffer& source, std::span<const ImageBuffer> similars,
                                      const ExperimentConfig& cfg);

/// "# config: ..." line, header "param,confidence", one row per stimulus,
/// then "# summary: ..." and one "# failed: ..." line per failed stimulus.
std::string report_to_csv(const ExperimentReport& report);
std::string report_to_json(const ExperimentReport& report);
/// Rows of a CSV written by report_to_csv.
std::vector<ReportRow> rows_from_csv(const std::string& text);

std::string config_echo(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Datasets and the (k, L) sweep
// ---------------------------------------------------------------------------

struct DatasetEntry {
    std::filesystem::path path;
    int label = 0;
};

struct Dataset {
    std::vector<DatasetEntry> entries;
    std::vector<std::string> categories;  ///< indexed by label
};

/// root/<category>/*.ppm, categories in lexicographic order.
Dataset load_dataset_dirs(const std::filesystem::path& root);
/// Flat directory of <id>.ppm files, label = id / 100 (Corel-1000 numbering).
Dataset load_corel_dataset(const std::filesystem::path& root);
/// Sorted *.ppm files of one directory.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

struct SweepConfig {
    std::vector<int> k_values{3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<int> level_values{6, 12, 24};
    DetectorConfig detector;
    double v_black = 0.2;
    double s_gray = 0.2;
    TrainConfig train;
    double train_fraction = 0.5;
    std::uint64_t seed = 0;
};

struct SweepCell {
    int k = 0;
    int levels = 0;
    double retrieval_rate = 0.0;
};

/// Per (k, L): seeded per-category split, one-vs-rest models, argmax label on
/// the held-out images; the rate is the mean per-category accuracy. Sorted by
/// rate descending, then (k, L) ascending. Throws InsufficientData.
std::vector<SweepCell> run_grid_sweep(std::span<const ImageBuffer> images, std::span<const int> labels,
                                      const SweepConfig& cfg);

std::string sweep_to_csv(std::span<const SweepCell> cells, const SweepConfig& cfg);

/// Seeded choice of `count` distinct indices from [0, n), in draw order.
std::vector<std::size_t> choose_indices(std::size_t n, std::size_t count, std::uint64_t seed);

}  // namespace lsdp
