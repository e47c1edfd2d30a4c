#include "lsdp/harness.hpp"

#include "lsdp/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <json.hpp>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace lsdp {

namespace {

const char* interp_name(Interpolation interp) {
    return interp == Interpolation::NearestNeighbor ? "nearest" : "bilinear";
}

struct Stimulus {
    double param = 0.0;
    std::vector<double> descriptor;
    std::string error;
};

template <typename MakeStimulus>
std::vector<Stimulus> describe_stimuli(std::span<const double> params, const DescriptorConfig& cfg,
                                       MakeStimulus make) {
    std::vector<Stimulus> out(params.size());
    const int n = static_cast<int>(params.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        Stimulus& s = out[static_cast<std::size_t>(i)];
        s.param = params[static_cast<std::size_t>(i)];
        try {
            s.descriptor = flatten(describe_image(make(s.param), cfg));
        } catch (const std::exception& e) {
            s.error = e.what();
        }
    }
    return out;
}

template <typename MakeStimulus>
ExperimentReport run_protocol(std::string kind, std::span<const double> params, int positives,
                              std::span<const ImageBuffer> similars, const ExperimentConfig& cfg,
                              MakeStimulus make) {
    cfg.descriptor.validate();
    if (positives < 1) throw DomainError("need at least one positive stimulus");
    const auto min_similars = static_cast<std::size_t>(std::max(1, cfg.min_similars));
    if (similars.size() < min_similars) {
        throw InsufficientData(fmt::format("{} experiment needs at least {} similar images, got {}", kind,
                                           min_similars, similars.size()));
    }

    ExperimentReport report;
    report.kind = std::move(kind);
    report.config = cfg;

    const auto stimuli = describe_stimuli(params, cfg.descriptor, make);

    std::vector<std::vector<double>> negatives;
    negatives.reserve(similars.size());
    for (const auto& h : describe_images(similars, cfg.descriptor)) negatives.push_back(flatten(h));

    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < stimuli.size(); ++i) {
        if (stimuli[i].error.empty()) usable.push_back(i);
    }
    if (usable.size() < static_cast<std::size_t>(positives)) {
        throw InsufficientData(fmt::format("only {} of {} stimuli could be described", usable.size(),
                                           stimuli.size()));
    }

    auto picks = choose_indices(usable.size(), static_cast<std::size_t>(positives), cfg.seed);
    std::sort(picks.begin(), picks.end());
    std::vector<std::vector<double>> positive_vectors;
    for (const std::size_t p : picks) {
        positive_vectors.push_back(stimuli[usable[p]].descriptor);
        report.training_params.push_back(stimuli[usable[p]].param);
    }

    TrainConfig train_cfg = cfg.train;
    train_cfg.seed = cfg.seed;
    const LinearModel model = train(positive_vectors, negatives, train_cfg);

    for (const Stimulus& s : stimuli) {
        ReportRow row;
        row.param = s.param;
        if (s.error.empty()) {
            row.confidence = confidence(model, s.descriptor);
        } else {
            row.confidence = std::numeric_limits<double>::quiet_NaN();
            row.error = s.error;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace

std::vector<std::size_t> choose_indices(std::size_t n, std::size_t count, std::uint64_t seed) {
    if (count > n) throw DomainError("cannot choose more indices than available");
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

ReportSummary summarize(std::span<const ReportRow> rows) {
    ReportSummary s;
    double sum = 0.0;
    int ok = 0;
    int above = 0;
    s.min = std::numeric_limits<double>::quiet_NaN();
    for (const ReportRow& r : rows) {
        if (!r.ok()) {
            ++s.failed;
            continue;
        }
        sum += r.confidence;
        if (ok == 0 || r.confidence < s.min) s.min = r.confidence;
        ++ok;
        if (r.confidence > 0.5) ++above;
    }
    s.mean = ok > 0 ? sum / ok : std::numeric_limits<double>::quiet_NaN();
    s.fraction_above = rows.empty() ? 0.0 : static_cast<double>(above) / static_cast<double>(rows.size());
    return s;
}

ReportSummary ExperimentReport::summary() const { return summarize(rows); }

ExperimentReport run_rotation_experiment(const ImageBuffer& source, std::span<const ImageBuffer> similars,
                                         const ExperimentConfig& cfg) {
    std::vector<double> degrees(kRotationStimuli);
    for (int d = 1; d <= kRotationStimuli; ++d) degrees[static_cast<std::size_t>(d - 1)] = d;
    return run_protocol("rotation", degrees, cfg.rotation_positives, similars, cfg,
                        [&](double deg) { return rotate(source, deg, cfg.interp, cfg.fill); });
}

ExperimentReport run_scale_experiment(const ImageBuffer& source, std::span<const ImageBuffer> similars,
                                      const ExperimentConfig& cfg) {
    return run_protocol("scale", kScaleFactors, cfg.scale_positives, similars, cfg,
                        [&](double s) { return scale(source, s, cfg.interp); });
}

std::string config_echo(const ExperimentConfig& cfg) {
    const auto& d = cfg.descriptor;
    return fmt::format(
        "k={} levels={} threshold={} nms_window={} block_size={} v_black={} s_gray={} seed={} "
        "interp={} fill={},{},{} c={} epochs={} balance={} rotation_positives={} scale_positives={}",
        d.k, d.quantizer.levels, d.detector.threshold, d.detector.nms_window, d.detector.block_size,
        d.quantizer.v_black, d.quantizer.s_gray, cfg.seed, interp_name(cfg.interp), cfg.fill.r, cfg.fill.g,
        cfg.fill.b, cfg.train.c, cfg.train.epochs, cfg.train.balance_classes ? 1 : 0, cfg.rotation_positives,
        cfg.scale_positives);
}

std::string report_to_csv(const ExperimentReport& report) {
    std::string out = fmt::format("# config: experiment={} {}", report.kind, config_echo(report.config));
    if (!report.source_name.empty()) out += fmt::format(" source={}", report.source_name);
    out += " training=";
    for (std::size_t i = 0; i < report.training_params.size(); ++i) {
        out += fmt::format("{}{}", i ? ";" : "", report.training_params[i]);
    }
    out += "\nparam,confidence\n";
    for (const ReportRow& r : report.rows) {
        out += r.ok() ? fmt::format("{},{}\n", r.param, r.confidence) : fmt::format("{},nan\n", r.param);
    }
    const ReportSummary s = report.summary();
    out += fmt::format("# summary: min={} mean={} fraction_above={} failed={}\n", s.min, s.mean,
                       s.fraction_above, s.failed);
    for (const ReportRow& r : report.rows) {
        if (!r.ok()) out += fmt::format("# failed: param={}: {}\n", r.param, r.error);
    }
    return out;
}

std::vector<ReportRow> rows_from_csv(const std::string& text) {
    std::vector<ReportRow> rows;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "param,confidence") throw FormatError("report header must be 'param,confidence'");
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw FormatError("bad report row: " + line);
        ReportRow r;
        try {
            r.param = std::stod(line.substr(0, comma));
            const std::string c = line.substr(comma + 1);
            if (c == "nan") {
                r.confidence = std::numeric_limits<double>::quiet_NaN();
                r.error = "failed";
            } else {
                r.confidence = std::stod(c);
            }
        } catch (const std::logic_error&) {
            throw FormatError("bad report row: " + line);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string report_to_json(const ExperimentReport& report) {
    using nlohmann::json;
    const auto& d = report.config.descriptor;
    const auto& cfg = report.config;
    json rows = json::array();
    for (const ReportRow& r : report.rows) {
        json row = {{"param", r.param}};
        if (r.ok()) {
            row["confidence"] = r.confidence;
        } else {
            row["confidence"] = nullptr;
            row["error"] = r.error;
        }
        rows.push_back(std::move(row));
    }
    const ReportSummary s = report.summary();
    const auto number_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    const json j = {
        {"experiment", report.kind},
        {"source", report.source_name},
        {"config",
         {{"k", d.k},
          {"levels", d.quantizer.levels},
          {"threshold", d.detector.threshold},
          {"nms_window", d.detector.nms_window},
          {"block_size", d.detector.block_size},
          {"v_black", d.quantizer.v_black},
          {"s_gray", d.quantizer.s_gray},
          {"seed", cfg.seed},
          {"interp", interp_name(cfg.interp)},
          {"fill", {cfg.fill.r, cfg.fill.g, cfg.fill.b}},
          {"c", cfg.train.c},
          {"epochs", cfg.train.epochs},
          {"balance", cfg.train.balance_classes},
          {"rotation_positives", cfg.rotation_positives},
          {"scale_positives", cfg.scale_positives}}},
        {"training_params", report.training_params},
        {"rows", rows},
        {"summary",
         {{"min", number_or_null(s.min)},
          {"mean", number_or_null(s.mean)},
          {"fraction_above", s.fraction_above},
          {"failed", s.failed}}},
    };
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

namespace {

bool is_ppm(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".ppm";
}

}  // namespace

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw IOError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_ppm(entry.path())) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

Dataset load_dataset_dirs(const std::filesystem::path& root) {
    std::error_code ec;
    if (!std::filesystem::is_directory(root, ec)) throw IOError("not a directory: " + root.string());
    std::vector<std::filesystem::path> dirs;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    Dataset ds;
    for (const auto& dir : dirs) {
        const auto files = list_images(dir);
        if (files.empty()) continue;
        const int label = static_cast<int>(ds.categories.size());
        ds.categories.push_back(dir.filename().string());
        for (const auto& f : files) ds.entries.push_back({f, label});
    }
    if (ds.entries.empty()) throw InsufficientData("no .ppm images under " + root.string());
    return ds;
}

Dataset load_corel_dataset(const std::filesystem::path& root) {
    std::map<long, std::vector<std::filesystem::path>> by_category;
    for (const auto& path : list_images(root)) {
        const std::string stem = path.stem().string();
        long id = 0;
        const auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), id);
        if (ec != std::errc{} || ptr != stem.data() + stem.size() || id < 0) continue;
        by_category[id / 100].push_back(path);
    }
    Dataset ds;
    for (auto& [category, paths] : by_category) {
        const int label = static_cast<int>(ds.categories.size());
        ds.categories.push_back(std::to_string(category));
        for (const auto& p : paths) ds.entries.push_back({p, label});
    }
    if (ds.entries.empty()) throw InsufficientData("no numerically named .ppm images under " + root.string());
    return ds;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

std::vector<SweepCell> run_grid_sweep(std::span<const ImageBuffer> images, std::span<const int> labels,
                                      const SweepConfig& cfg) {
    cfg.detector.validate();
    if (images.size() != labels.size()) throw DimensionMismatch("one label per image required");
    if (cfg.k_values.empty() || cfg.level_values.empty()) throw InsufficientData("empty sweep grid");
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
        throw DomainError("train fraction must lie in (0, 1)");
    }

    int categories = 0;
    for (const int l : labels) {
        if (l < 0) throw DomainError("labels must be non-negative");
        categories = std::max(categories, l + 1);
    }
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(categories));
    for (std::size_t i = 0; i < labels.size(); ++i) members[static_cast<std::size_t>(labels[i])].push_back(i);
    if (categories < 2) throw InsufficientData("sweep needs at least two categories");
    for (int c = 0; c < categories; ++c) {
        if (members[static_cast<std::size_t>(c)].size() < 2) {
            throw InsufficientData(fmt::format("category {} has fewer than two images", c));
        }
    }

    // Seeded split per category; at least one image on each side.
    std::vector<bool> is_train(images.size(), false);
    for (int c = 0; c < categories; ++c) {
        const auto& m = members[static_cast<std::size_t>(c)];
        const auto n_train = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::lround(cfg.train_fraction * static_cast<double>(m.size()))), 1,
            m.size() - 1);
        for (const std::size_t pick : choose_indices(m.size(), n_train, cfg.seed + static_cast<std::uint64_t>(c))) {
            is_train[m[pick]] = true;
        }
    }

    // Features do not depend on (k, L); detect once.
    std::vector<std::vector<FeaturePoint>> features(images.size());
    std::vector<std::exception_ptr> errors(images.size());
    const int n = static_cast<int>(images.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            features[static_cast<std::size_t>(i)] = detect_features(images[static_cast<std::size_t>(i)], cfg.detector);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::vector<SweepCell> cells;
    for (const int k : cfg.k_values) {
        for (const int levels : cfg.level_values) {
            QuantizerConfig q{levels, cfg.v_black, cfg.s_gray};
            std::vector<std::vector<double>> vectors(images.size());
            for (std::size_t i = 0; i < images.size(); ++i) {
                vectors[i] = flatten(build_descriptor(std::span<const FeaturePoint>(features[i]), k, q));
            }

            std::vector<LinearModel> models;
            for (int c = 0; c < categories; ++c) {
                std::vector<std::vector<double>> pos, neg;
                for (std::size_t i = 0; i < images.size(); ++i) {
                    if (!is_train[i]) continue;
                    (labels[i] == c ? pos : neg).push_back(vectors[i]);
                }
                TrainConfig t = cfg.train;
                t.seed = cfg.seed * 1000003ULL + static_cast<std::uint64_t>(c);
                models.push_back(train(pos, neg, t));
            }

            std::vector<int> correct(static_cast<std::size_t>(categories), 0);
            std::vector<int> total(static_cast<std::size_t>(categories), 0);
            for (std::size_t i = 0; i < images.size(); ++i) {
                if (is_train[i]) continue;
                int best = 0;
                double best_conf = -1.0;
                for (int c = 0; c < categories; ++c) {
                    const double conf = confidence(models[static_cast<std::size_t>(c)], vectors[i]);
                    if (conf > best_conf) {
                        best_conf = conf;
                        best = c;
                    }
                }
                ++total[static_cast<std::size_t>(labels[i])];
                if (best == labels[i]) ++correct[static_cast<std::size_t>(labels[i])];
            }
            double rate = 0.0;
            for (int c = 0; c < categories; ++c) {
                rate += static_cast<double>(correct[static_cast<std::size_t>(c)]) /
                        static_cast<double>(total[static_cast<std::size_t>(c)]);
            }
            cells.push_back({k, levels, rate / categories});
        }
    }
    std::stable_sort(cells.begin(), cells.end(), [](const SweepCell& a, const SweepCell& b) {
        if (a.retrieval_rate != b.retrieval_rate) return a.retrieval_rate > b.retrieval_rate;
        if (a.k != b.k) return a.k < b.k;
        return a.levels < b.levels;
    });
    return cells;
}

std::string sweep_to_csv(std::span<const SweepCell> cells, const SweepConfig& cfg) {
    std::string out = fmt::format(
        "# config: sweep threshold={} nms_window={} block_size={} v_black={} s_gray={} c={} epochs={} "
        "train_fraction={} seed={}\n",
        cfg.detector.threshold, cfg.detector.nms_window, cfg.detector.block_size, cfg.v_black, cfg.s_gray,
        cfg.train.c, cfg.train.epochs, cfg.train_fraction, cfg.seed);
    out += "k,levels,retrieval_rate\n";
    for (const SweepCell& c : cells) out += fmt::format("{},{},{}\n", c.k, c.levels, c.retrieval_rate);
    return out;
}

}  // namespace lsdp
