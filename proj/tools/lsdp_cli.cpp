// Command-line front end: feature extraction, descriptors, training,
// prediction, the rotation/scale experiments, the (k, L) sweep and threshold
// calibration. Exit codes: 0 success, 1 usage error, 2 data error.

#include "lsdp/classify.hpp"
#include "lsdp/descriptor.hpp"
#include "lsdp/dither.hpp"
#include "lsdp/error.hpp"
#include "lsdp/harness.hpp"
#include "lsdp/synthetic.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    int block_size = lsdp::kDefaultBlockSize;
    double threshold = lsdp::kDefaultThreshold;
    int nms_window = lsdp::kDefaultNmsWindow;
    int k = 4;
    int levels = 12;
    std::uint64_t seed = 0;
    std::string interp = "bilinear";
    std::string fill = "0,0,0";
    std::string out;
    std::string format;
};

void add_detector_options(CLI::App* app, CommonOptions& o) {
    app->add_option("--block-size", o.block_size, "Block side in pixels")->capture_default_str();
    app->add_option("--threshold", o.threshold, "Saliency threshold T")->capture_default_str();
    app->add_option("--nms-window", o.nms_window, "Odd suppression window, pattern units")->capture_default_str();
}

void add_descriptor_options(CLI::App* app, CommonOptions& o) {
    add_detector_options(app, o);
    app->add_option("--k", o.k, "Number of distance bins")->capture_default_str();
    app->add_option("--levels", o.levels, "Number of color bins")->capture_default_str();
}

// Subcommands share one options struct, so the per-subcommand default format
// is filled in after parsing (see default_format).
std::map<const CLI::App*, std::string> default_format;

void add_output_options(CLI::App* app, CommonOptions& o, const std::vector<std::string>& formats) {
    app->add_option("--out", o.out, "Output file (default stdout)");
    app->add_option("--format", o.format, "Output format: " + CLI::detail::join(formats, ", ") + " (default " +
                                              formats.front() + ")")
        ->check(CLI::IsMember(formats));
    default_format[app] = formats.front();
}

void add_experiment_options(CLI::App* app, CommonOptions& o) {
    add_descriptor_options(app, o);
    app->add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
    app->add_option("--interp", o.interp, "Resampling")
        ->check(CLI::IsMember({"nearest", "bilinear"}))
        ->capture_default_str();
    app->add_option("--fill", o.fill, "R,G,B for samples outside a rotated source")->capture_default_str();
}

lsdp::Rgb parse_fill(const std::string& text) {
    int r = 0, g = 0, b = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%d,%d,%d%c", &r, &g, &b, &tail) != 3 || r < 0 || r > 255 || g < 0 ||
        g > 255 || b < 0 || b > 255) {
        throw UsageError("--fill expects R,G,B with components in 0..255, got '" + text + "'");
    }
    return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
}

// Configuration problems detected by the library are usage errors here.
template <typename F>
auto checked(F&& f) {
    try {
        return f();
    } catch (const lsdp::DomainError& e) {
        throw UsageError(e.what());
    }
}

lsdp::DetectorConfig detector_config(const CommonOptions& o) {
    lsdp::DetectorConfig d{o.block_size, o.threshold, o.nms_window};
    checked([&] {
        d.validate();
        return 0;
    });
    return d;
}

lsdp::DescriptorConfig descriptor_config(const CommonOptions& o) {
    lsdp::DescriptorConfig c;
    c.detector = detector_config(o);
    c.k = o.k;
    c.quantizer.levels = o.levels;
    checked([&] {
        c.validate();
        return 0;
    });
    return c;
}

void emit(const CommonOptions& o, const std::string& text) {
    if (o.out.empty() || o.out == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw lsdp::IOError("cannot open for writing: " + o.out);
    f << text;
    if (!f) throw lsdp::IOError("write failed: " + o.out);
}

// Files are taken as-is; directories contribute their sorted .ppm files.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
    std::vector<fs::path> out;
    for (const auto& in : inputs) {
        std::error_code ec;
        if (fs::is_directory(in, ec)) {
            for (auto& p : lsdp::list_images(in)) out.push_back(std::move(p));
        } else {
            out.emplace_back(in);
        }
    }
    return out;
}

std::vector<lsdp::ImageBuffer> load_all(const std::vector<fs::path>& paths) {
    std::vector<lsdp::ImageBuffer> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(lsdp::load_image(p));
    return out;
}

std::vector<std::vector<double>> describe_all(const std::vector<lsdp::ImageBuffer>& images,
                                              const lsdp::DescriptorConfig& cfg) {
    std::vector<std::vector<double>> out;
    for (const auto& h : lsdp::describe_images(images, cfg)) out.push_back(lsdp::flatten(h));
    return out;
}

json descriptor_config_json(const lsdp::DescriptorConfig& c) {
    return {{"block_size", c.detector.block_size}, {"threshold", c.detector.threshold},
            {"nms_window", c.detector.nms_window}, {"k", c.k},
            {"levels", c.quantizer.levels},        {"v_black", c.quantizer.v_black},
            {"s_gray", c.quantizer.s_gray}};
}

lsdp::DescriptorConfig descriptor_config_from_json(const json& j) {
    lsdp::DescriptorConfig c;
    c.detector.block_size = j.at("block_size").get<int>();
    c.detector.threshold = j.at("threshold").get<double>();
    c.detector.nms_window = j.at("nms_window").get<int>();
    c.k = j.at("k").get<int>();
    c.quantizer.levels = j.at("levels").get<int>();
    c.quantizer.v_black = j.at("v_black").get<double>();
    c.quantizer.s_gray = j.at("s_gray").get<double>();
    c.validate();
    return c;
}

std::string read_text(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw lsdp::IOError("cannot open: " + p.string());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------

int run_extract(const CommonOptions& o, const std::string& image) {
    const auto cfg = detector_config(o);
    const auto features = lsdp::detect_features(lsdp::load_image(image), cfg);
    if (o.format == "jsonl") {
        emit(o, lsdp::features_to_jsonl(features));
    } else {
        std::string out = "gx,gy,strength,e0,e1,e2,e3\n";
        for (const auto& f : features) {
            out += fmt::format("{},{},{}", f.grid_x, f.grid_y, f.strength);
            for (const auto& e : f.elements) out += fmt::format(",{:02x}{:02x}{:02x}", e.r, e.g, e.b);
            out += '\n';
        }
        emit(o, out);
    }
    return 0;
}

int run_describe(const CommonOptions& o, const std::string& image) {
    const auto cfg = descriptor_config(o);
    const auto h = lsdp::describe_image(lsdp::load_image(image), cfg);
    emit(o, o.format == "json" ? lsdp::descriptor_to_json(h) : lsdp::descriptor_to_csv(h));
    return 0;
}

int run_train(const CommonOptions& o, const std::vector<std::string>& pos_in,
              const std::vector<std::string>& neg_in, double c, int epochs) {
    const auto cfg = descriptor_config(o);
    lsdp::TrainConfig t;
    t.c = c;
    t.epochs = epochs;
    t.seed = o.seed;
    checked([&] {
        t.validate();
        return 0;
    });
    const auto pos_paths = expand_inputs(pos_in);
    const auto neg_paths = expand_inputs(neg_in);
    const auto pos = describe_all(load_all(pos_paths), cfg);
    const auto neg = describe_all(load_all(neg_paths), cfg);
    const auto model = lsdp::train(pos, neg, t);
    const json j = {{"descriptor", descriptor_config_json(cfg)},
                    {"model", json::parse(lsdp::model_to_json(model))},
                    {"positives", pos_paths.size()},
                    {"negatives", neg_paths.size()}};
    emit(o, j.dump(2) + "\n");
    return 0;
}

int run_predict(const CommonOptions& o, const std::string& model_path, const std::vector<std::string>& inputs) {
    json j;
    try {
        j = json::parse(read_text(model_path));
    } catch (const json::exception& e) {
        throw lsdp::FormatError(std::string("model file: ") + e.what());
    }
    lsdp::DescriptorConfig cfg;
    lsdp::LinearModel model;
    try {
        cfg = descriptor_config_from_json(j.at("descriptor"));
        model = lsdp::model_from_json(j.at("model").dump());
    } catch (const json::exception& e) {
        throw lsdp::FormatError(std::string("model file: ") + e.what());
    } catch (const lsdp::DomainError& e) {
        throw lsdp::FormatError(std::string("model file: ") + e.what());
    }
    const auto paths = expand_inputs(inputs);
    const auto vectors = describe_all(load_all(paths), cfg);

    if (o.format == "json") {
        json rows = json::array();
        for (std::size_t i = 0; i < paths.size(); ++i) {
            const double conf = lsdp::confidence(model, vectors[i]);
            rows.push_back({{"image", paths[i].generic_string()}, {"confidence", conf}, {"match", conf > 0.5}});
        }
        emit(o, rows.dump(2) + "\n");
    } else {
        std::string out = "image,confidence,match\n";
        for (std::size_t i = 0; i < paths.size(); ++i) {
            const double conf = lsdp::confidence(model, vectors[i]);
            out += fmt::format("{},{},{}\n", paths[i].generic_string(), conf, conf > 0.5 ? 1 : 0);
        }
        emit(o, out);
    }
    return 0;
}

struct ExperimentInputs {
    std::string source;
    std::string similars;
    int synthetic = -1;
    int min_similars = 99;
    int positives = 0;
    double c = 1.0;
    int epochs = 200;
};

void add_experiment_inputs(CLI::App* app, ExperimentInputs& in, int default_positives) {
    in.positives = default_positives;
    auto* src = app->add_option("--source", in.source, "Source image (.ppm)");
    auto* sim = app->add_option("--similars", in.similars, "Directory of similar images");
    auto* syn = app->add_option("--synthetic", in.synthetic,
                                "Use the built-in corpus: instance 0 of this category as source, "
                                "instances 1..min-similars as similars")
                    ->check(CLI::Range(0, lsdp::kSyntheticCategories - 1));
    src->needs(sim);
    sim->needs(src);
    syn->excludes(src);
    syn->excludes(sim);
    app->add_option("--min-similars", in.min_similars, "Minimum number of similar images")->capture_default_str();
    app->add_option("--positives", in.positives, "Stimuli drawn as the positive class")->capture_default_str();
    app->add_option("--c", in.c, "Soft-margin weight")->capture_default_str();
    app->add_option("--epochs", in.epochs, "Training epochs")->capture_default_str();
}

int run_experiment(const CommonOptions& o, const ExperimentInputs& in, bool rotation) {
    if (in.synthetic < 0 && in.source.empty()) {
        throw UsageError("give --source with --similars, or --synthetic CATEGORY");
    }
    lsdp::ExperimentConfig cfg;
    cfg.descriptor = descriptor_config(o);
    cfg.interp = o.interp == "nearest" ? lsdp::Interpolation::NearestNeighbor : lsdp::Interpolation::Bilinear;
    cfg.fill = parse_fill(o.fill);
    cfg.seed = o.seed;
    cfg.train.c = in.c;
    cfg.train.epochs = in.epochs;
    cfg.min_similars = in.min_similars;
    (rotation ? cfg.rotation_positives : cfg.scale_positives) = in.positives;
    if (in.min_similars < 1) throw UsageError("--min-similars must be at least 1");
    checked([&] {
        cfg.train.validate();
        return 0;
    });

    std::optional<lsdp::ImageBuffer> source;
    std::vector<lsdp::ImageBuffer> similars;
    std::string name;
    if (in.synthetic >= 0) {
        source = lsdp::render_synthetic(in.synthetic, 0);
        similars = lsdp::synthetic_similars(in.synthetic, in.min_similars);
        name = fmt::format("synthetic:{}", in.synthetic);
    } else {
        source = lsdp::load_image(in.source);
        similars = load_all(lsdp::list_images(in.similars));
        name = fs::path(in.source).filename().string();
    }

    auto report = rotation ? lsdp::run_rotation_experiment(*source, similars, cfg)
                           : lsdp::run_scale_experiment(*source, similars, cfg);
    report.source_name = name;
    emit(o, o.format == "json" ? lsdp::report_to_json(report) : lsdp::report_to_csv(report));
    return 0;
}

struct SweepInputs {
    std::string dataset;
    bool corel = false;
    int synthetic = 0;
    std::vector<int> k_values{3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<int> level_values{6, 12, 24};
    double train_fraction = 0.5;
    double c = 1.0;
    int epochs = 200;
};

int run_sweep(const CommonOptions& o, const SweepInputs& in) {
    lsdp::SweepConfig cfg;
    cfg.detector = detector_config(o);
    cfg.k_values = in.k_values;
    cfg.level_values = in.level_values;
    cfg.train.c = in.c;
    cfg.train.epochs = in.epochs;
    cfg.train_fraction = in.train_fraction;
    cfg.seed = o.seed;
    for (const int k : cfg.k_values) {
        if (k < 1) throw UsageError("--k values must be positive");
    }
    for (const int l : cfg.level_values) {
        checked([&] {
            lsdp::QuantizerConfig{l, cfg.v_black, cfg.s_gray}.validate();
            return 0;
        });
    }
    checked([&] {
        cfg.train.validate();
        return 0;
    });

    std::vector<lsdp::ImageBuffer> images;
    std::vector<int> labels;
    if (in.synthetic > 0) {
        for (int cat = 0; cat < lsdp::kSyntheticCategories; ++cat) {
            for (int i = 0; i < in.synthetic; ++i) {
                images.push_back(lsdp::render_synthetic(cat, i));
                labels.push_back(cat);
            }
        }
    } else {
        if (in.dataset.empty()) throw UsageError("give --dataset DIR or --synthetic N");
        const auto ds = in.corel ? lsdp::load_corel_dataset(in.dataset) : lsdp::load_dataset_dirs(in.dataset);
        for (const auto& e : ds.entries) {
            images.push_back(lsdp::load_image(e.path));
            labels.push_back(e.label);
        }
    }
    const auto cells = lsdp::run_grid_sweep(images, labels, cfg);
    if (o.format == "json") {
        json rows = json::array();
        for (const auto& c : cells) rows.push_back({{"k", c.k}, {"levels", c.levels}, {"retrieval_rate", c.retrieval_rate}});
        emit(o, json{{"images", images.size()}, {"cells", rows}}.dump(2) + "\n");
    } else {
        emit(o, lsdp::sweep_to_csv(cells, cfg));
    }
    return 0;
}

int run_calibrate(const CommonOptions& o, double sigma, int side, double step) {
    lsdp::CalibrationOptions opt;
    opt.block_size = o.block_size;
    opt.seed = o.seed;
    opt.noise_sigma = sigma;
    opt.image_side = side;
    opt.angle_step = step;
    const auto r = checked([&] { return lsdp::calibrate_threshold(opt); });
    if (o.format == "json") {
        json sweep = json::array();
        for (std::size_t i = 0; i < r.edge_angles.size(); ++i) {
            sweep.push_back({{"angle", r.edge_angles[i]}, {"bound", r.edge_bounds[i]}});
        }
        const json j = {{"block_size", opt.block_size},
                        {"noise_sigma", opt.noise_sigma},
                        {"seed", opt.seed},
                        {"edge_bound", r.edge_bound},
                        {"corner_bound", r.corner_bound},
                        {"recommended", std::isnan(r.recommended) ? json(nullptr) : json(r.recommended)},
                        {"edge_sweep", sweep}};
        emit(o, j.dump(2) + "\n");
    } else {
        std::string out = fmt::format("# edge_bound={} corner_bound={} recommended={}\n", r.edge_bound,
                                      r.corner_bound, r.recommended);
        out += "angle,edge_bound\n";
        for (std::size_t i = 0; i < r.edge_angles.size(); ++i) {
            out += fmt::format("{},{}\n", r.edge_angles[i], r.edge_bounds[i]);
        }
        emit(o, out);
    }
    return 0;
}

int run_synth(const std::string& root, int count, int mosaics) {
    if (count < 1) throw UsageError("--count must be at least 1");
    for (int cat = 0; cat < lsdp::kSyntheticCategories; ++cat) {
        const fs::path dir = fs::path(root) / fmt::format("category{}", cat);
        fs::create_directories(dir);
        for (int i = 0; i < count; ++i) {
            lsdp::save_image(lsdp::render_synthetic(cat, i), dir / fmt::format("{:03d}.ppm", i));
        }
    }
    if (mosaics > 0) {
        const fs::path dir = fs::path(root) / "mosaic";
        fs::create_directories(dir);
        for (int i = 0; i < mosaics; ++i) {
            lsdp::save_image(lsdp::render_block_mosaic(static_cast<std::uint64_t>(i)), dir / fmt::format("{:03d}.ppm", i));
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Locally salient dither pattern features and spatial-chromatic descriptors"};
    app.require_subcommand(1);

    CommonOptions opt;

    std::string image;
    auto* extract = app.add_subcommand("extract", "Detect features in one image");
    extract->add_option("image", image, "Input .ppm")->required();
    add_detector_options(extract, opt);
    add_output_options(extract, opt, {"jsonl", "csv"});

    auto* describe = app.add_subcommand("describe", "Spatial-chromatic histogram of one image");
    describe->add_option("image", image, "Input .ppm")->required();
    add_descriptor_options(describe, opt);
    add_output_options(describe, opt, {"json", "csv"});

    std::vector<std::string> positives, negatives;
    double c = 1.0;
    int epochs = 200;
    auto* train = app.add_subcommand("train", "Train a two-class model on image descriptors");
    train->add_option("--positives", positives, "Positive images or directories")->required();
    train->add_option("--negatives", negatives, "Negative images or directories")->required();
    train->add_option("--seed", opt.seed, "Training seed")->capture_default_str();
    train->add_option("--c", c, "Soft-margin weight")->capture_default_str();
    train->add_option("--epochs", epochs, "Training epochs")->capture_default_str();
    add_descriptor_options(train, opt);
    add_output_options(train, opt, {"json"});

    std::string model_path;
    std::vector<std::string> inputs;
    auto* predict = app.add_subcommand("predict", "Confidence of a trained model on images");
    predict->add_option("--model", model_path, "Model file written by train")->required()->check(CLI::ExistingFile);
    predict->add_option("images", inputs, "Images or directories")->required();
    add_output_options(predict, opt, {"csv", "json"});

    ExperimentInputs rot_in, scale_in;
    auto* rot = app.add_subcommand("exp-rotate", "Rotation experiment over 1..360 degrees");
    add_experiment_options(rot, opt);
    add_experiment_inputs(rot, rot_in, 6);
    add_output_options(rot, opt, {"csv", "json"});

    auto* sc = app.add_subcommand("exp-scale", "Scale experiment over factors 0.25..2");
    add_experiment_options(sc, opt);
    add_experiment_inputs(sc, scale_in, 1);
    add_output_options(sc, opt, {"csv", "json"});

    SweepInputs sweep_in;
    auto* sweep = app.add_subcommand("sweep", "Retrieval rate over a (k, levels) grid");
    add_detector_options(sweep, opt);
    sweep->add_option("--k", sweep_in.k_values, "Distance bin counts")->capture_default_str();
    sweep->add_option("--levels", sweep_in.level_values, "Color bin counts")->capture_default_str();
    sweep->add_option("--seed", opt.seed, "Split and training seed")->capture_default_str();
    auto* ds = sweep->add_option("--dataset", sweep_in.dataset, "Dataset root: <root>/<category>/*.ppm");
    sweep->add_flag("--corel", sweep_in.corel, "Flat <id>.ppm directory labeled by id / 100")->needs(ds);
    sweep->add_option("--synthetic", sweep_in.synthetic, "Use N built-in images per category")
        ->check(CLI::PositiveNumber)
        ->excludes(ds);
    sweep->add_option("--train-fraction", sweep_in.train_fraction, "Training share per category")
        ->capture_default_str();
    sweep->add_option("--c", sweep_in.c, "Soft-margin weight")->capture_default_str();
    sweep->add_option("--epochs", sweep_in.epochs, "Training epochs")->capture_default_str();
    add_output_options(sweep, opt, {"csv", "json"});

    double sigma = 10.0, step = 5.0;
    int side = 96;
    auto* cal = app.add_subcommand("calibrate-threshold", "Edge/corner interval for the saliency threshold");
    cal->add_option("--block-size", opt.block_size, "Block side in pixels")->capture_default_str();
    cal->add_option("--seed", opt.seed, "Noise seed")->capture_default_str();
    cal->add_option("--noise-sigma", sigma, "Gaussian noise on edge images")->capture_default_str();
    cal->add_option("--side", side, "Test image side")->capture_default_str();
    cal->add_option("--angle-step", step, "Step of the edge-angle sweep, degrees")->capture_default_str();
    add_output_options(cal, opt, {"csv", "json"});

    std::string synth_root;
    int synth_count = 100, synth_mosaics = 0;
    auto* synth = app.add_subcommand("synth", "Write the built-in synthetic corpus as .ppm files");
    synth->add_option("--out", synth_root, "Output root directory")->required();
    synth->add_option("--count", synth_count, "Images per category")->capture_default_str();
    synth->add_option("--mosaics", synth_mosaics, "Also write this many block mosaics")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    for (const auto& [sub, fmt_name] : default_format) {
        if (sub->parsed() && opt.format.empty()) opt.format = fmt_name;
    }

    try {
        if (*extract) return run_extract(opt, image);
        if (*describe) return run_describe(opt, image);
        if (*train) return run_train(opt, positives, negatives, c, epochs);
        if (*predict) return run_predict(opt, model_path, inputs);
        if (*rot) return run_experiment(opt, rot_in, true);
        if (*sc) return run_experiment(opt, scale_in, false);
        if (*sweep) return run_sweep(opt, sweep_in);
        if (*cal) return run_calibrate(opt, sigma, side, step);
        if (*synth) return run_synth(synth_root, synth_count, synth_mosaics);
    } catch (const UsageError& e) {
        fmt::print(stderr, "usage error: {}\n", e.what());
        return 1;
    } catch (const lsdp::Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    } catch (const fs::filesystem_error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
    return 1;
}
