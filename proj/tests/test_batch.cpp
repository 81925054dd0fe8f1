#include "loco/batch.hpp"
#include "loco/error.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace loco;
namespace fs = std::filesystem;

namespace {

// Fresh directory under the system temp dir, removed on scope exit.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("loco_batch_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void put(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string config_error(const std::string& text, const fs::path& base) {
    try {
        plan_batch(parse_manifest(text, base));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

bool contains(const std::string& haystack, const std::string& needle) { return haystack.find(needle) != std::string::npos; }

} // namespace

TEST_CASE("scenario config parsing reports every problem") {
    const auto cfg = parse_scenario_config(R"({"scenario":"waypoints","waypoints":{"gate_count":3},"sim":{"dt_s":0.02}})");
    CHECK(cfg.scenario == ScenarioType::Waypoints);
    CHECK(cfg.waypoints.gate_count == 3);
    CHECK(cfg.sim.dt_s == 0.02);
    CHECK(parse_scenario_config("{}").scenario == ScenarioType::Pursuit);

    try {
        parse_scenario_config(R"({"scenario":"maze","sim":{"dt_s":-1},"bogus":1})");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(contains(msg, "maze"));
        CHECK(contains(msg, "dt_s"));
        CHECK(contains(msg, "bogus"));
    }
    CHECK_THROWS_AS(parse_scenario_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_config(R"({"limits":{"s_min_kmh":4,"s_max_kmh":2}})"), ConfigError);
}

TEST_CASE("pilot overrides") {
    const PilotConfig p = apply_pilot_overrides(PilotConfig{}, R"({"noise_sigma_m":0.001,"lookahead_m":3})");
    CHECK(p.noise_sigma_m == 0.001);
    CHECK(p.lookahead_m == 3.0);
    CHECK(p.reaction_delay_s == PilotConfig{}.reaction_delay_s);
    CHECK_THROWS_AS(apply_pilot_overrides(PilotConfig{}, R"({"nosie":1})"), ConfigError);
    CHECK_THROWS_AS(apply_pilot_overrides(PilotConfig{}, R"({"lookahead_m":"far"})"), ConfigError);
}

TEST_CASE("manifest parsing") {
    TempDir dir("parse");
    put(dir.path / "p.json", R"({"scenario":"pursuit"})");
    const auto m = parse_manifest(R"({"name":"x","runs":[
        {"scenario":"p.json","interface":"gamepad","seed":4,"repeat":2},
        {"scenario":"p.json","interface":"finger-tapping","pilot":{"noise_sigma_m":0.0},"seed":4}]})",
                                  dir.path);
    CHECK(m.name == "x");
    REQUIRE(m.rows.size() == 2);
    CHECK(m.rows[0].scenario == dir.path / "p.json");
    CHECK(m.rows[0].iface == Interface::Gamepad);
    CHECK(m.rows[0].repeat == 2);
    CHECK(m.rows[1].pilot_name == "custom");
    CHECK(m.rows[1].pilot.noise_sigma_m == 0.0);

    const auto jobs = plan_batch(m);
    REQUIRE(jobs.size() == 3);
    CHECK(jobs[0].seed == 4);
    CHECK(jobs[1].seed == 5);
    CHECK(jobs[2].seed == 4);
    for (std::size_t i = 0; i < jobs.size(); ++i) CHECK(jobs[i].index == i);
    CHECK(jobs[0].id != jobs[1].id);
    CHECK(jobs[0].id.rfind("0000_", 0) == 0);
}

TEST_CASE("manifest errors are collected") {
    TempDir dir("errors");
    try {
        parse_manifest(R"({"name":"x","extra":1,"runs":[{"scenario":"p.json","interface":"joystick","seed":-1}]})",
                       dir.path);
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(contains(msg, "extra"));
        CHECK(contains(msg, "joystick"));
        CHECK(contains(msg, "seed"));
    }
    CHECK_THROWS_AS(parse_manifest(R"({"name":"x","runs":[{"scenario":"p.json","interface":"gamepad"}]})", dir.path),
                    ConfigError);
    CHECK_THROWS_AS(parse_manifest("[]", dir.path), ConfigError);
    CHECK_THROWS_AS(parse_manifest(R"({"name":"x"})", dir.path), ConfigError);
    CHECK_THROWS_AS(parse_manifest(R"({"name":"x","runs":[{"scenario":"p.json","interface":"gamepad","pilot":"drunk"}]})",
                                   dir.path),
                    ConfigError);
}

TEST_CASE("pre-flight catches duplicates, missing files and missing models") {
    TempDir dir("preflight");
    put(dir.path / "p.json", R"({"scenario":"pursuit"})");

    const std::string dup = config_error(R"({"name":"x","runs":[
        {"scenario":"p.json","interface":"gamepad","seed":1,"repeat":3},
        {"scenario":"p.json","interface":"gamepad","seed":3}]})",
                                         dir.path);
    CHECK(contains(dup, "runs[1]: seed 3 repeats an earlier trial"));

    // same seed under a different pilot is a different trial
    CHECK(config_error(R"({"name":"x","runs":[
        {"scenario":"p.json","interface":"gamepad","seed":1},
        {"scenario":"p.json","interface":"gamepad","pilot":"perfect","seed":1}]})",
                       dir.path)
              .empty());

    CHECK(contains(config_error(R"({"name":"x","runs":[{"scenario":"nope.json","interface":"gamepad","seed":1}]})", dir.path),
                   "nope.json"));

    const std::string no_model =
        config_error(R"({"name":"x","runs":[{"scenario":"p.json","interface":"finger-number","seed":1}]})", dir.path);
    CHECK(contains(no_model, "model"));
    const std::string missing_model = config_error(
        R"({"name":"x","model":"m.txt","runs":[{"scenario":"p.json","interface":"finger-number","seed":1}]})", dir.path);
    CHECK(contains(missing_model, "m.txt"));
}

TEST_CASE("atomic writes replace whole files") {
    TempDir dir("atomic");
    const fs::path p = dir.path / "out.txt";
    write_file_atomic(p, "first");
    CHECK(read_file(p) == "first");
    write_file_atomic(p, "second, longer content");
    CHECK(read_file(p) == "second, longer content");
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir.path)) {
        (void)e;
        ++files;
    }
    CHECK(files == 1);
    // parent directories are created on demand
    write_file_atomic(dir.path / "nested" / "x.txt", "x");
    CHECK(read_file(dir.path / "nested" / "x.txt") == "x");
    CHECK_THROWS(read_file(dir.path / "absent.txt"));
}

TEST_CASE("pose dataset round trip") {
    TempDir dir("dataset");
    const auto ds = generate_pose_dataset(5, 0.005, 3);
    write_pose_dataset(dir.path, ds);
    const auto back = read_pose_dataset(dir.path);
    CHECK(back.labels == ds.labels);
    CHECK(back.frames == ds.frames);
}

TEST_CASE("dataset errors carry line numbers") {
    TempDir dir("dataset_bad");
    const auto ds = generate_pose_dataset(2, 0.005, 3);
    write_pose_dataset(dir.path, ds);
    const std::string labels = read_file(dir.path / "labels.csv");

    put(dir.path / "labels.csv", labels + "12,seven\n");
    try {
        read_pose_dataset(dir.path);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 14);
    }

    put(dir.path / "labels.csv", labels);
    std::string poses = read_file(dir.path / "poses.jsonl");
    const auto second = poses.find('\n') + 1;
    poses.insert(second, "{\"t\":broken\n");
    put(dir.path / "poses.jsonl", poses);
    try {
        read_pose_dataset(dir.path);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(contains(e.what(), "poses.jsonl"));
    }
}

TEST_CASE("training split is a stable hash of the record id") {
    std::size_t train = 0;
    for (std::size_t i = 0; i < 10000; ++i) {
        CHECK(in_training_split(i, 1.0));
        CHECK_FALSE(in_training_split(i, 0.0));
        const bool a = in_training_split(i, 0.5);
        CHECK(a == in_training_split(i, 0.5));
        // a larger fraction only adds records
        if (in_training_split(i, 0.3)) CHECK(a);
        train += a;
    }
    CHECK(train > 4800);
    CHECK(train < 5200);
}

TEST_CASE("training on a dataset reports held-out accuracy") {
    const auto ds = generate_pose_dataset(30, 0.005, 5);
    const auto half = train_on_dataset(ds, 0.5, {});
    CHECK(half.train_count + half.test_count == 180);
    REQUIRE(half.held_out_accuracy.has_value());
    CHECK(*half.held_out_accuracy >= 0.95);
    const auto all = train_on_dataset(ds, 1.0, {});
    CHECK(all.test_count == 0);
    CHECK_FALSE(all.held_out_accuracy.has_value());
}

TEST_CASE("metric tables") {
    TrialRecord p;
    p.interface = "gamepad";
    p.pilot = "default";
    p.scenario_name = "chase";
    p.keyframes_kmh = {2.0};
    TrialRow row;
    row.ball_position = {0, 0, -3};
    p.rows = {row};
    TrialRecord w;
    w.scenario = ScenarioType::Waypoints;
    w.interface = "gamepad";
    w.pilot = "default";
    w.scenario_name = "gates";
    w.gates = {{0.0, -5.0}};
    w.finish_z = -10.0;
    w.rows = {row, row};
    w.rows[1].time_s = 2.0;

    std::vector<MetricRow> rows{metric_row(p, "a"), metric_row(w, "b")};
    rows.push_back(metric_row(w, "c"));
    rows.back().completed = false;
    rows.back().waypoints->t_c = 1000.0;

    std::ostringstream csv;
    write_metrics_csv(csv, rows);
    std::istringstream lines(csv.str());
    std::string header, first, second;
    std::getline(lines, header);
    std::getline(lines, first);
    std::getline(lines, second);
    CHECK(contains(header, "trial,scenario,scenario_type,interface,pilot,seed,completed"));
    CHECK(contains(header, "d_avg"));
    CHECK(contains(header, "t_c"));
    // the pursuit row leaves the waypoint cells empty and vice versa
    CHECK(first.substr(first.size() - 5) == ",,,,,");
    CHECK(contains(second, "gates,waypoints,gamepad,default,0,1,,,,,,2,"));

    std::ostringstream agg;
    write_aggregate_csv(agg, rows);
    const std::string table = agg.str();
    CHECK(table.rfind("scenario,interface,pilot,metric,n,mean,sem\n", 0) == 0);
    // the incomplete trial does not enter the mean
    CHECK(contains(table, "gates,gamepad,default,t_c_s,1,2,0"));
    CHECK(contains(table, "chase,gamepad,default,d_avg_m,1,3,0"));
}

TEST_CASE("batch output does not depend on the worker count") {
    TempDir dir("run");
    put(dir.path / "p.json", R"({"scenario":"pursuit","pursuit":{"duration_s":12}})");
    put(dir.path / "w.json", R"({"scenario":"waypoints","waypoints":{"gate_count":3}})");
    const std::string manifest = R"({"name":"demo","runs":[
        {"scenario":"p.json","interface":"finger-distance","seed":1,"repeat":2},
        {"scenario":"p.json","interface":"finger-tapping","seed":1,"repeat":2},
        {"scenario":"w.json","interface":"gamepad","seed":7,"repeat":2}]})";
    put(dir.path / "m.json", manifest);
    const auto m = load_manifest(dir.path / "m.json");
    CHECK(m.output == dir.path / "runs");
    CHECK(m.source == manifest);

    const auto one = run_batch(m, dir.path / "one", 1);
    const auto four = run_batch(m, dir.path / "four", 4);
    CHECK(one.rows.size() == 6);
    for (const char* f : {"metrics.csv", "aggregate.csv", "manifest.json"})
        CHECK(read_file(one.run_dir / f) == read_file(four.run_dir / f));
    std::size_t records = 0;
    for (const auto& e : fs::directory_iterator(one.run_dir / "records")) {
        CHECK(read_file(e.path()) == read_file(four.run_dir / "records" / e.path().filename()));
        ++records;
    }
    CHECK(records == 6);
    CHECK(read_file(one.run_dir / "manifest.json") == manifest);

    const auto again = report_directory(one.run_dir / "records");
    std::ostringstream a, b;
    write_metrics_csv(a, one.rows);
    write_metrics_csv(b, again);
    CHECK(a.str() == b.str());
}
