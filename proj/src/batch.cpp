#include "loco/batch.hpp"

#include "loco/error.hpp"
#include "loco/hand_log.hpp"
#include "loco/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace loco {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += fmt::format(".tmp{}", std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

BatchManifest parse_manifest(const std::string& text, const fs::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("manifest must be a JSON object");

    BatchManifest m;
    m.source = text;
    std::vector<std::string> errors;
    auto resolve = [&](const std::string& p) {
        fs::path path(p);
        return (path.is_absolute() ? path : base_dir / path).lexically_normal();
    };

    for (const auto& [key, unused] : root.items())
        if (key != "name" && key != "output" && key != "model" && key != "runs") errors.push_back(key + ": unknown key");

    m.name = root.value("name", std::string("run"));
    if (m.name.empty() || m.name.find('/') != std::string::npos) errors.emplace_back("name: must be a plain directory name");
    if (root.contains("output")) {
        if (root["output"].is_string())
            m.output = resolve(root["output"].get<std::string>());
        else
            errors.emplace_back("output: expected a string");
    }
    if (root.contains("model")) {
        if (root["model"].is_string())
            m.model = resolve(root["model"].get<std::string>());
        else
            errors.emplace_back("model: expected a string");
    }

    if (!root.contains("runs") || !root["runs"].is_array() || root["runs"].empty()) {
        errors.emplace_back("runs: expected a non-empty array");
    } else {
        std::size_t i = 0;
        for (const auto& r : root["runs"]) {
            const std::string where = fmt::format("runs[{}]", i++);
            if (!r.is_object()) {
                errors.push_back(where + ": expected an object");
                continue;
            }
            ManifestRow row;
            for (const auto& [key, unused] : r.items())
                if (key != "scenario" && key != "interface" && key != "pilot" && key != "seed" && key != "repeat")
                    errors.push_back(where + "." + key + ": unknown key");
            if (r.contains("scenario") && r["scenario"].is_string())
                row.scenario = resolve(r["scenario"].get<std::string>());
            else
                errors.push_back(where + ".scenario: expected a file path");
            if (r.contains("interface") && r["interface"].is_string()) {
                auto iface = parse_interface(r["interface"].get<std::string>());
                if (iface)
                    row.iface = *iface;
                else
                    errors.push_back(where + ".interface: unknown interface '" + r["interface"].get<std::string>() + "'");
            } else {
                errors.push_back(where + ".interface: expected a string");
            }
            if (r.contains("pilot")) {
                const auto& p = r["pilot"];
                if (p.is_string()) {
                    row.pilot_name = p.get<std::string>();
                    if (auto prof = pilot_profile(row.pilot_name))
                        row.pilot = *prof;
                    else
                        errors.push_back(where + ".pilot: unknown profile '" + row.pilot_name + "'");
                } else if (p.is_object()) {
                    try {
                        row.pilot = apply_pilot_overrides(PilotConfig{}, p.dump());
                        row.pilot_name = "custom";
                    } catch (const ConfigError& e) {
                        errors.push_back(where + ".pilot: " + e.what());
                    }
                } else {
                    errors.push_back(where + ".pilot: expected a profile name or an object");
                }
            }
            if (!r.contains("seed"))
                errors.push_back(where + ".seed: missing");
            else if (r["seed"].is_number_unsigned())
                row.seed = r["seed"].get<std::uint64_t>();
            else
                errors.push_back(where + ".seed: expected a non-negative integer");
            if (r.contains("repeat")) {
                if (r["repeat"].is_number_integer() && r["repeat"].get<int>() > 0)
                    row.repeat = r["repeat"].get<int>();
                else
                    errors.push_back(where + ".repeat: expected a positive integer");
            }
            m.rows.push_back(std::move(row));
        }
    }
    if (!errors.empty()) {
        std::string msg = "invalid manifest:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return m;
}

BatchManifest load_manifest(const fs::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    BatchManifest m = parse_manifest(text, path.parent_path());
    if (m.output.empty()) m.output = path.parent_path() / "runs";
    return m;
}

std::vector<TrialJob> plan_batch(const BatchManifest& manifest) {
    std::vector<std::string> errors;
    std::vector<TrialJob> jobs;
    std::set<std::tuple<std::string, int, std::string, std::uint64_t>> seen;
    bool needs_model = false;

    for (std::size_t r = 0; r < manifest.rows.size(); ++r) {
        const auto& row = manifest.rows[r];
        ScenarioConfig cfg;
        try {
            cfg = load_scenario_config(row.scenario.string());
        } catch (const ConfigError& e) {
            errors.push_back(fmt::format("runs[{}]: {}", r, e.what()));
            continue;
        }
        needs_model = needs_model || row.iface == Interface::FingerNumber;
        for (int k = 0; k < row.repeat; ++k) {
            TrialJob job;
            job.index = jobs.size();
            job.scenario_name = row.scenario.stem().string();
            job.config = cfg;
            job.iface = row.iface;
            job.pilot_name = row.pilot_name;
            job.pilot = row.pilot;
            job.seed = row.seed + static_cast<std::uint64_t>(k);
            if (!seen.insert({row.scenario.string(), static_cast<int>(row.iface), row.pilot_name, job.seed}).second)
                errors.push_back(fmt::format("runs[{}]: seed {} repeats an earlier trial with the same scenario, "
                                             "interface and pilot",
                                             r, job.seed));
            job.id = fmt::format("{:04}_{}_{}_{}_s{}", job.index, job.scenario_name, to_string(job.iface),
                                 job.pilot_name, job.seed);
            jobs.push_back(std::move(job));
        }
    }
    if (needs_model) {
        if (!manifest.model)
            errors.emplace_back("finger-number runs need a \"model\" file");
        else if (!fs::exists(*manifest.model))
            errors.push_back("model file not found: " + manifest.model->string());
    }
    if (!errors.empty()) {
        std::string msg = "batch pre-flight failed:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return jobs;
}

MetricRow metric_row(const TrialRecord& record, const std::string& trial_id) {
    MetricRow row;
    row.trial = trial_id;
    row.scenario_name = record.scenario_name;
    row.scenario = record.scenario;
    row.interface = record.interface;
    row.pilot = record.pilot;
    row.seed = record.seed;
    row.completed = record.completed;
    if (record.scenario == ScenarioType::Pursuit)
        row.pursuit = pursuit_metrics(record);
    else
        row.waypoints = waypoint_metrics(record);
    return row;
}

namespace {

std::string num(double v) { return fmt::format("{:.12g}", v); }

std::vector<std::pair<std::string, double>> metric_fields(const MetricRow& r) {
    std::vector<std::pair<std::string, double>> out;
    if (r.pursuit)
        for (const auto& kv : to_fields(*r.pursuit)) out.emplace_back(kv);
    if (r.waypoints)
        for (const auto& kv : to_fields(*r.waypoints)) out.emplace_back(kv);
    return out;
}

constexpr const char* kPursuitColumns[] = {"d_avg_m", "d_std_m", "s_avg_kmh", "s_std_kmh", "s_inst_kmh"};
constexpr const char* kWaypointColumns[] = {"t_c_s", "s_l_mps", "d_p_m", "n_w", "n_c"};

} // namespace

void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
    out << "trial,scenario,scenario_type,interface,pilot,seed,completed";
    for (const char* c : kPursuitColumns) out << ',' << c;
    for (const char* c : kWaypointColumns) out << ',' << c;
    out << '\n';
    for (const auto& r : rows) {
        out << r.trial << ',' << r.scenario_name << ',' << to_string(r.scenario) << ',' << r.interface << ',' << r.pilot
            << ',' << r.seed << ',' << (r.completed ? 1 : 0);
        if (r.pursuit) {
            const auto& m = *r.pursuit;
            out << ',' << num(m.d_avg) << ',' << num(m.d_std) << ',' << num(m.s_avg) << ',' << num(m.s_std) << ','
                << num(m.s_inst);
        } else {
            out << ",,,,,";
        }
        if (r.waypoints) {
            const auto& m = *r.waypoints;
            out << ',' << num(m.t_c) << ',' << num(m.s_l) << ',' << num(m.d_p) << ',' << m.n_w << ',' << m.n_c;
        } else {
            out << ",,,,,";
        }
        out << '\n';
    }
}

void write_aggregate_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
    using Key = std::tuple<std::string, std::string, std::string>;
    std::vector<Key> order;
    std::map<Key, std::vector<std::map<std::string, double>>> groups;
    for (const auto& r : rows) {
        if (!r.completed) continue;
        Key key{r.scenario_name, r.interface, r.pilot};
        if (!groups.count(key)) order.push_back(key);
        std::map<std::string, double> fields;
        for (const auto& [k, v] : metric_fields(r)) fields[k] = v;
        groups[key].push_back(std::move(fields));
    }
    out << "scenario,interface,pilot,metric,n,mean,sem\n";
    for (const auto& key : order) {
        const auto summary = aggregate(groups[key]);
        for (const auto& [metric, s] : summary)
            out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ',' << metric << ',' << s.n
                << ',' << num(s.mean) << ',' << num(s.sem) << '\n';
    }
}

BatchSummary run_batch(const BatchManifest& manifest, const fs::path& out_root, unsigned jobs_limit,
                       std::shared_ptr<const svm::ClassifierModel> model) {
    const std::vector<TrialJob> jobs = plan_batch(manifest);
    const bool needs_model =
        std::any_of(jobs.begin(), jobs.end(), [](const TrialJob& j) { return j.iface == Interface::FingerNumber; });
    if (needs_model && !model)
        model = std::make_shared<const svm::ClassifierModel>(svm::load_model_file(manifest.model->string()));

    BatchSummary summary;
    summary.run_dir = out_root / manifest.name;
    const fs::path records = summary.run_dir / "records";
    fs::create_directories(records);

    summary.rows.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                const TrialJob& job = jobs[i];
                std::shared_ptr<const svm::ClassifierModel> m = job.iface == Interface::FingerNumber ? model : nullptr;
                TrialRecord rec = run_trial(job.config, job.iface, job.pilot, job.seed, m);
                rec.pilot = job.pilot_name;
                rec.scenario_name = job.scenario_name;
                write_file_atomic(records / (job.id + ".csv"), write_trial_record(rec));
                summary.rows[i] = metric_row(rec, job.id);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = jobs.size();
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs_limit, static_cast<unsigned>(jobs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    std::ostringstream metrics;
    write_metrics_csv(metrics, summary.rows);
    write_file_atomic(summary.run_dir / "metrics.csv", metrics.str());
    std::ostringstream agg;
    write_aggregate_csv(agg, summary.rows);
    write_file_atomic(summary.run_dir / "aggregate.csv", agg.str());
    write_file_atomic(summary.run_dir / "manifest.json", manifest.source);
    return summary;
}

std::vector<MetricRow> report_directory(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<MetricRow> rows;
    for (const auto& f : files) rows.push_back(metric_row(read_trial_record_file(f.string()), f.stem().string()));
    return rows;
}

void write_pose_dataset(const fs::path& dir, const PoseDataset& ds) {
    if (ds.frames.size() != ds.labels.size()) throw std::invalid_argument("dataset frames and labels differ in length");
    write_file_atomic(dir / "poses.jsonl", write_hand_log(ds.frames));
    std::string labels = "id,label\n";
    for (std::size_t i = 0; i < ds.labels.size(); ++i) labels += fmt::format("{},{}\n", i, ds.labels[i]);
    write_file_atomic(dir / "labels.csv", labels);
}

PoseDataset read_pose_dataset(const fs::path& dir) {
    PoseDataset ds;
    {
        std::ifstream in(dir / "poses.jsonl");
        if (!in) throw std::runtime_error("cannot open " + (dir / "poses.jsonl").string());
        try {
            ds.frames = parse_hand_log(in);
        } catch (const ParseError& e) {
            std::string detail = e.what();
            const std::string prefix = "line " + std::to_string(e.line()) + ": ";
            if (e.line() != 0 && detail.rfind(prefix, 0) == 0) detail.erase(0, prefix.size());
            throw ParseError(e.line(), "poses.jsonl: " + detail);
        }
    }
    std::ifstream in(dir / "labels.csv");
    if (!in) throw std::runtime_error("cannot open " + (dir / "labels.csv").string());
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (line == 1) {
            if (text != "id,label") throw ParseError(line, "labels.csv must start with 'id,label'");
            continue;
        }
        if (text.empty()) continue;
        std::size_t id = 0;
        int label = 0;
        char comma = 0;
        std::istringstream row(text);
        if (!(row >> id >> comma >> label) || comma != ',' || id != ds.labels.size() || label < 0 ||
            label >= kPoseClassCount)
            throw ParseError(line, "malformed label row '" + text + "'");
        ds.labels.push_back(label);
    }
    if (ds.labels.size() != ds.frames.size())
        throw ParseError(0, fmt::format("dataset has {} frames but {} labels", ds.frames.size(), ds.labels.size()));
    return ds;
}

bool in_training_split(std::size_t record_id, double train_fraction) {
    const double u = static_cast<double>(splitmix64(record_id) >> 11) * 0x1.0p-53;
    return u < train_fraction;
}

TrainReport train_on_dataset(const PoseDataset& ds, double train_fraction, const svm::TrainParams& params) {
    std::vector<svm::LabeledSample> train;
    std::vector<svm::LabeledSample> test;
    for (std::size_t i = 0; i < ds.frames.size(); ++i) {
        auto sample = svm::make_sample(stack_features(ds.frames[i].left, ds.frames[i].right), ds.labels[i]);
        (in_training_split(i, train_fraction) ? train : test).push_back(std::move(sample));
    }
    TrainReport report;
    report.train_count = train.size();
    report.test_count = test.size();
    report.model = svm::train(train, params);
    if (!test.empty()) {
        std::size_t correct = 0;
        for (const auto& s : test)
            if (svm::predict(report.model, std::span<const double>(s.features)) == s.label) ++correct;
        report.held_out_accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
    }
    return report;
}

} // namespace loco
