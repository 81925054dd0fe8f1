#include "loco/trial_record.hpp"

#include "loco/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace loco {
namespace {

constexpr std::string_view kMagic = "# loco trial record v1";
constexpr std::string_view kColumns =
    "tick,time_s,avatar_x_m,avatar_z_m,heading_deg,speed_mps,cmd_speed_kmh,cmd_steer_deg,"
    "ball_x_m,ball_z_m,ball_speed_mps,ball_target_kmh,gate_events";

std::string format_events(const std::vector<GateEvent>& events) {
    std::string out;
    for (const auto& e : events) {
        if (!out.empty()) out += ';';
        out += fmt::format("{}:{}", to_string(e.kind), e.gate);
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

double to_double(const std::string& s, std::size_t line, std::string_view what) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw ParseError(line, fmt::format("bad number for {}: '{}'", what, s));
    return v;
}

std::int64_t to_int(const std::string& s, std::size_t line, std::string_view what) {
    std::int64_t v = 0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw ParseError(line, fmt::format("bad integer for {}: '{}'", what, s));
    return v;
}

std::vector<GateEvent> parse_events(const std::string& s, std::size_t line) {
    std::vector<GateEvent> events;
    if (s.empty()) return events;
    for (const auto& item : split(s, ';')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ParseError(line, "bad gate event '" + item + "'");
        const std::string kind = item.substr(0, colon);
        GateEvent e;
        if (kind == "pass")
            e.kind = GateEventKind::Pass;
        else if (kind == "miss")
            e.kind = GateEventKind::Miss;
        else if (kind == "collision")
            e.kind = GateEventKind::Collision;
        else
            throw ParseError(line, "unknown gate event kind '" + kind + "'");
        e.gate = static_cast<int>(to_int(item.substr(colon + 1), line, "gate index"));
        events.push_back(e);
    }
    return events;
}

} // namespace

void write_trial_record(std::ostream& out, const TrialRecord& r) {
    out << kMagic << '\n';
    out << "# scenario: " << to_string(r.scenario) << '\n';
    out << "# interface: " << r.interface << '\n';
    if (!r.pilot.empty()) out << "# pilot: " << r.pilot << '\n';
    if (!r.scenario_name.empty()) out << "# scenario_name: " << r.scenario_name << '\n';
    out << "# seed: " << r.seed << '\n';
    out << fmt::format("# dt_s: {:.17g}\n", r.dt_s);
    out << "# completed: " << (r.completed ? 1 : 0) << '\n';
    if (r.scenario == ScenarioType::Pursuit) {
        out << fmt::format("# keyframe_period_s: {:.17g}\n", r.keyframe_period_s);
        out << fmt::format("# initial_gap_m: {:.17g}\n", r.initial_gap_m);
        out << "# keyframes_kmh:";
        for (double k : r.keyframes_kmh) out << fmt::format(" {:.17g}", k);
        out << '\n';
    } else {
        out << fmt::format("# start_m: {:.17g} {:.17g}\n", r.start.x, r.start.z);
        out << fmt::format("# finish_z_m: {:.17g}\n", r.finish_z);
        for (const auto& g : r.gates) out << fmt::format("# gate_m: {:.17g} {:.17g}\n", g.x, g.z);
    }
    out << kColumns << '\n';
    for (const auto& row : r.rows) {
        out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n",
                           row.tick, row.time_s, row.avatar_position.x, row.avatar_position.z, row.heading_deg,
                           row.speed_mps, row.command.speed_kmh, row.command.steering_deg, row.ball_position.x,
                           row.ball_position.z, row.ball_speed_mps, row.ball_target_kmh, format_events(row.events));
    }
}

std::string write_trial_record(const TrialRecord& record) {
    std::ostringstream out;
    write_trial_record(out, record);
    return out.str();
}

TrialRecord read_trial_record(std::istream& in) {
    TrialRecord r;
    std::string text;
    std::size_t line = 0;
    if (!std::getline(in, text)) throw ParseError(0, "empty trial record");
    ++line;
    if (text != kMagic) throw ParseError(line, "not a trial record");

    bool columns_seen = false;
    bool scenario_seen = false;
    while (std::getline(in, text)) {
        ++line;
        if (text.empty()) continue;
        if (!columns_seen && text.rfind("# ", 0) == 0) {
            const auto colon = text.find(':');
            if (colon == std::string::npos) throw ParseError(line, "malformed header line");
            const std::string key = text.substr(2, colon - 2);
            std::istringstream val(text.substr(colon + 1));
            auto number = [&](double& dst) {
                if (!(val >> dst)) throw ParseError(line, "bad value for " + key);
            };
            if (key == "scenario") {
                std::string s;
                val >> s;
                auto type = parse_scenario_type(s);
                if (!type) throw ParseError(line, "unknown scenario '" + s + "'");
                r.scenario = *type;
                scenario_seen = true;
            } else if (key == "interface") {
                val >> r.interface;
            } else if (key == "pilot") {
                val >> r.pilot;
            } else if (key == "scenario_name") {
                val >> r.scenario_name;
            } else if (key == "seed") {
                if (!(val >> r.seed)) throw ParseError(line, "bad seed");
            } else if (key == "dt_s") {
                number(r.dt_s);
            } else if (key == "completed") {
                int c = 0;
                if (!(val >> c)) throw ParseError(line, "bad completed flag");
                r.completed = c != 0;
            } else if (key == "keyframe_period_s") {
                number(r.keyframe_period_s);
            } else if (key == "initial_gap_m") {
                number(r.initial_gap_m);
            } else if (key == "keyframes_kmh") {
                double k = 0.0;
                while (val >> k) r.keyframes_kmh.push_back(k);
            } else if (key == "start_m") {
                number(r.start.x);
                number(r.start.z);
            } else if (key == "finish_z_m") {
                number(r.finish_z);
            } else if (key == "gate_m") {
                Gate g;
                number(g.x);
                number(g.z);
                r.gates.push_back(g);
            }
            continue;
        }
        if (!columns_seen) {
            if (text != kColumns) throw ParseError(line, "unexpected column header");
            columns_seen = true;
            continue;
        }
        const auto f = split(text, ',');
        if (f.size() != 13) throw ParseError(line, fmt::format("expected 13 columns, found {}", f.size()));
        TrialRow row;
        row.tick = to_int(f[0], line, "tick");
        row.time_s = to_double(f[1], line, "time_s");
        row.avatar_position.x = to_double(f[2], line, "avatar_x_m");
        row.avatar_position.z = to_double(f[3], line, "avatar_z_m");
        row.heading_deg = to_double(f[4], line, "heading_deg");
        row.speed_mps = to_double(f[5], line, "speed_mps");
        row.command.speed_kmh = to_double(f[6], line, "cmd_speed_kmh");
        row.command.steering_deg = to_double(f[7], line, "cmd_steer_deg");
        row.ball_position.x = to_double(f[8], line, "ball_x_m");
        row.ball_position.z = to_double(f[9], line, "ball_z_m");
        row.ball_speed_mps = to_double(f[10], line, "ball_speed_mps");
        row.ball_target_kmh = to_double(f[11], line, "ball_target_kmh");
        row.events = parse_events(f[12], line);
        r.rows.push_back(std::move(row));
    }
    if (!scenario_seen) throw ParseError(line, "trial record has no scenario header");
    if (!columns_seen) throw ParseError(line, "trial record has no column header");
    return r;
}

TrialRecord read_trial_record_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trial record " + path);
    return read_trial_record(in);
}

} // namespace loco
