// loco: dataset generation, classifier training, trial batches, replay and
// reports. Exit codes: 0 ok, 1 validation error, 2 runtime error.

#include "loco/batch.hpp"
#include "loco/error.hpp"
#include "loco/hand_log.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace loco;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

struct Globals {
    std::string config;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    std::string out;
};

ScenarioConfig scenario_or_default(const Globals& g) {
    return g.config.empty() ? ScenarioConfig{} : load_scenario_config(g.config);
}

std::shared_ptr<const svm::ClassifierModel> maybe_model(const std::string& path) {
    if (path.empty()) return nullptr;
    return std::make_shared<const svm::ClassifierModel>(svm::load_model_file(path));
}

Interface interface_arg(const std::string& name) {
    auto iface = parse_interface(name);
    if (!iface) throw ConfigError("unknown interface '" + name + "'");
    return *iface;
}

void print_metrics(const MetricRow& row) {
    std::map<std::string, double> fields;
    if (row.pursuit) fields = to_fields(*row.pursuit);
    if (row.waypoints) fields = to_fields(*row.waypoints);
    for (const auto& [k, v] : fields) fmt::print("  {:<11} {:.6g}\n", k, v);
}

void write_tables(const fs::path& dir, const std::vector<MetricRow>& rows) {
    std::ostringstream metrics;
    write_metrics_csv(metrics, rows);
    write_file_atomic(dir / "metrics.csv", metrics.str());
    std::ostringstream agg;
    write_aggregate_csv(agg, rows);
    write_file_atomic(dir / "aggregate.csv", agg.str());
}

int gen_dataset(const Globals& g, int per_class, double sigma) {
    if (g.out.empty()) throw ConfigError("gen-dataset needs --out <dir>");
    if (per_class <= 0) throw ConfigError("empty dataset: --per-class must be positive");
    const ScenarioConfig cfg = scenario_or_default(g);
    const PoseDataset ds = generate_pose_dataset(per_class, sigma, g.seed, cfg.pilot.pose);
    write_pose_dataset(g.out, ds);
    std::array<int, kPoseClassCount> counts{};
    for (int label : ds.labels) ++counts[static_cast<std::size_t>(label)];
    fmt::print("wrote {} records to {}\n", ds.labels.size(), g.out);
    for (int c = 0; c < kPoseClassCount; ++c) fmt::print("  class {}: {}\n", c, counts[static_cast<std::size_t>(c)]);
    return kOk;
}

int train(const Globals& g, const std::string& dataset, double split) {
    if (g.out.empty()) throw ConfigError("train needs --out <model file>");
    if (!(split > 0.0 && split <= 1.0)) throw ConfigError("--split must be in (0, 1]");
    const ScenarioConfig cfg = scenario_or_default(g);
    const PoseDataset ds = read_pose_dataset(dataset);
    const TrainReport report = train_on_dataset(ds, split, cfg.classifier);
    svm::save_model_file(g.out, report.model);
    fmt::print("trained on {} records ({} held out), model written to {}\n", report.train_count, report.test_count,
               g.out);
    if (report.held_out_accuracy)
        fmt::print("held-out accuracy: {:.4f}\n", *report.held_out_accuracy);
    else
        fmt::print(stderr, "warning: no held-out records, no held-out evaluation\n");
    return kOk;
}

int run_manifest(const Globals& g, const std::string& manifest_path, const std::string& model_path) {
    BatchManifest manifest = load_manifest(manifest_path);
    if (!model_path.empty()) manifest.model = fs::path(model_path);
    const fs::path root = g.out.empty() ? manifest.output : fs::path(g.out);
    const BatchSummary summary = run_batch(manifest, root, g.jobs);
    std::size_t completed = 0;
    for (const auto& r : summary.rows) completed += r.completed ? 1 : 0;
    fmt::print("{} trials ({} completed), results in {}\n", summary.rows.size(), completed, summary.run_dir.string());
    return kOk;
}

int run_single(const Globals& g, const std::string& iface_name, const std::string& pilot_name,
               const std::string& model_path, const std::string& log_path) {
    if (g.config.empty()) throw ConfigError("run needs a manifest or --config <scenario>");
    if (g.out.empty()) throw ConfigError("single-trial run needs --out <record file>");
    const ScenarioConfig cfg = load_scenario_config(g.config);
    const Interface iface = interface_arg(iface_name);
    PilotConfig pilot = cfg.pilot;
    if (pilot_name != "config") {
        auto prof = pilot_profile(pilot_name);
        if (!prof) throw ConfigError("unknown pilot profile '" + pilot_name + "'");
        pilot = *prof;
    }
    if (iface == Interface::FingerNumber && model_path.empty()) throw ConfigError("finger-number needs --model");
    std::vector<InputFrame> inputs;
    TrialRecord rec = run_trial(cfg, iface, pilot, g.seed, maybe_model(model_path), log_path.empty() ? nullptr : &inputs);
    rec.pilot = pilot_name;
    rec.scenario_name = fs::path(g.config).stem().string();
    write_file_atomic(g.out, write_trial_record(rec));
    if (!log_path.empty()) {
        std::ostringstream log;
        for (const auto& f : inputs) {
            if (const auto* h = std::get_if<HandFrame>(&f))
                write_hand_log(log, {*h});
            else
                write_gamepad_log(log, {std::get<GamepadFrame>(f)});
        }
        write_file_atomic(log_path, log.str());
    }
    fmt::print("trial {} ({} rows, {})\n", g.out, rec.rows.size(), rec.completed ? "completed" : "incomplete");
    print_metrics(metric_row(rec, g.out));
    return kOk;
}

int replay(const Globals& g, const std::string& log_path, const std::string& iface_name,
           const std::string& model_path) {
    if (g.config.empty()) throw ConfigError("replay needs --config <scenario>");
    if (g.out.empty()) throw ConfigError("replay needs --out <record file>");
    const ScenarioConfig cfg = load_scenario_config(g.config);
    const Interface iface = interface_arg(iface_name);
    if (iface == Interface::FingerNumber && model_path.empty()) throw ConfigError("finger-number needs --model");

    std::ifstream in(log_path);
    if (!in) throw std::runtime_error("cannot open " + log_path);
    std::vector<InputFrame> frames;
    if (iface == Interface::Gamepad) {
        for (auto& f : parse_gamepad_log(in)) frames.emplace_back(f);
    } else {
        for (auto& f : parse_hand_log(in)) frames.emplace_back(std::move(f));
    }
    if (frames.empty()) throw ConfigError("empty log: " + log_path);

    ReplayResult result = replay_trial(cfg, iface, frames, g.seed, maybe_model(model_path));
    result.record.pilot = "replay";
    result.record.scenario_name = fs::path(g.config).stem().string();
    if (result.truncated)
        fmt::print(stderr, "warning: log ended at t = {:.2f} s before the trial finished; record truncated\n",
                   result.record.rows.empty() ? 0.0 : result.record.rows.back().time_s);
    write_file_atomic(g.out, write_trial_record(result.record));
    fmt::print("replayed {} frames into {}\n", frames.size(), g.out);
    print_metrics(metric_row(result.record, g.out));
    return kOk;
}

int report(const Globals& g, const std::string& records_dir) {
    const std::vector<MetricRow> rows = report_directory(records_dir);
    const fs::path out = g.out.empty() ? fs::path(records_dir).parent_path() : fs::path(g.out);
    write_tables(out, rows);
    fmt::print("{} records summarised into {}\n", rows.size(), out.string());
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hand-gesture locomotion benchmark: datasets, classifier, trials and metrics"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "Scenario configuration file (JSON)");
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--jobs", g.jobs, "Parallel trials")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output path");

    int per_class = 200;
    double sigma = 0.005;
    auto* gen = app.add_subcommand("gen-dataset", "Write a labelled synthetic pose dataset");
    gen->fallthrough();
    gen->add_option("--per-class", per_class, "Samples per class")->capture_default_str();
    gen->add_option("--sigma", sigma, "Fingertip noise in metres")->capture_default_str();

    std::string dataset;
    double split = 0.5;
    auto* tr = app.add_subcommand("train", "Train the pose classifier on a dataset directory");
    tr->fallthrough();
    tr->add_option("dataset", dataset, "Dataset directory")->required();
    tr->add_option("--split", split, "Training fraction")->capture_default_str();

    std::string manifest;
    std::string iface = "finger-distance";
    std::string pilot = "default";
    std::string model;
    std::string input_log;
    auto* run = app.add_subcommand("run", "Run a batch manifest, or a single trial with --config");
    run->fallthrough();
    run->add_option("manifest", manifest, "Batch manifest (JSON)");
    run->add_option("--interface", iface, "Interface for a single trial")->capture_default_str();
    run->add_option("--pilot", pilot, "Pilot profile for a single trial, or 'config'")->capture_default_str();
    run->add_option("--model", model, "Classifier model file");
    run->add_option("--input-log", input_log, "Also write the pilot's input frames here");

    std::string log;
    auto* rp = app.add_subcommand("replay", "Drive a trial from a recorded input log");
    rp->fallthrough();
    rp->add_option("log", log, "Hand-frame or gamepad log (JSON lines)")->required();
    rp->add_option("--interface", iface, "Interface")->capture_default_str();
    rp->add_option("--model", model, "Classifier model file");

    std::string records;
    auto* rep = app.add_subcommand("report", "Recompute metric tables from a directory of trial records");
    rep->fallthrough();
    rep->add_option("records", records, "Records directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*gen) return gen_dataset(g, per_class, sigma);
        if (*tr) return train(g, dataset, split);
        if (*run) return manifest.empty() ? run_single(g, iface, pilot, model, input_log) : run_manifest(g, manifest, model);
        if (*rp) return replay(g, log, iface, model);
        if (*rep) return report(g, records);
    } catch (const ConfigError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kValidation;
    } catch (const ParseError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kValidation;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kRuntime;
    }
    return kRuntime;
}
