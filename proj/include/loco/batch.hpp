#pragma once

// Batch execution and the on-disk artifacts around it: manifests, pose
// datasets, per-trial metric rows and aggregate tables.

#include "loco/config.hpp"
#include "loco/metrics.hpp"
#include "loco/trial.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace loco {

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// --- Manifest ----------------------------------------------------------------

struct ManifestRow {
    std::filesystem::path scenario;  ///< resolved against the manifest directory
    Interface iface = Interface::FingerDistance;
    std::string pilot_name = "default";
    PilotConfig pilot{};
    std::uint64_t seed = 0;
    int repeat = 1;  ///< repeat r runs with seed + r
};

/// JSON: {"name": "...", "output": "dir", "model": "file",
///        "runs": [{"scenario": "file.json", "interface": "finger-distance",
///                  "pilot": "default" | {overrides}, "seed": 1, "repeat": 3}]}
struct BatchManifest {
    std::string name;
    std::filesystem::path output;
    std::optional<std::filesystem::path> model;
    std::vector<ManifestRow> rows;
    std::string source;  ///< manifest text, copied into the run directory
};

/// Throws ConfigError listing every problem.
BatchManifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir);
BatchManifest load_manifest(const std::filesystem::path& path);

struct TrialJob {
    std::size_t index = 0;
    std::string id;  ///< stable file stem
    std::string scenario_name;
    ScenarioConfig config;
    Interface iface = Interface::FingerDistance;
    std::string pilot_name;
    PilotConfig pilot;
    std::uint64_t seed = 0;
};

/// Expands repeats and checks everything before any trial runs: scenario
/// files load and validate, (scenario, interface, pilot, seed) tuples are
/// unique, and finger-number rows have a model. Throws ConfigError listing
/// every problem.
std::vector<TrialJob> plan_batch(const BatchManifest& manifest);

// --- Metric tables -----------------------------------------------------------

struct MetricRow {
    std::string trial;
    std::string scenario_name;
    ScenarioType scenario = ScenarioType::Pursuit;
    std::string interface;
    std::string pilot;
    std::uint64_t seed = 0;
    bool completed = true;
    std::optional<PursuitMetrics> pursuit;
    std::optional<WaypointMetrics> waypoints;
};

MetricRow metric_row(const TrialRecord& record, const std::string& trial_id);

void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows);

/// Groups completed trials by (scenario, interface, pilot) in first-seen
/// order; mean and standard error per metric.
void write_aggregate_csv(std::ostream& out, const std::vector<MetricRow>& rows);

struct BatchSummary {
    std::filesystem::path run_dir;
    std::vector<MetricRow> rows;
};

/// Runs every job (up to `jobs` at once) and writes
///   <out>/<name>/records/<id>.csv, metrics.csv, aggregate.csv, manifest.json
/// Outputs are independent of `jobs`.
BatchSummary run_batch(const BatchManifest& manifest, const std::filesystem::path& out_root, unsigned jobs,
                       std::shared_ptr<const svm::ClassifierModel> model = nullptr);

/// Recomputes metrics.csv and aggregate.csv from a directory of records.
std::vector<MetricRow> report_directory(const std::filesystem::path& records_dir);

// --- Pose datasets -----------------------------------------------------------

/// <dir>/poses.jsonl (hand-frame log) and <dir>/labels.csv (id,label).
void write_pose_dataset(const std::filesystem::path& dir, const PoseDataset& ds);
PoseDataset read_pose_dataset(const std::filesystem::path& dir);

/// Deterministic split by hash of record id: true means training.
bool in_training_split(std::size_t record_id, double train_fraction);

struct TrainReport {
    svm::ClassifierModel model;
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    std::optional<double> held_out_accuracy;
};

TrainReport train_on_dataset(const PoseDataset& ds, double train_fraction, const svm::TrainParams& params);

} // namespace loco
