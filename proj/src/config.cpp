#include "loco/config.hpp"

#include "loco/error.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace loco {
namespace {

using nlohmann::json;

// Reads known keys out of one JSON section and remembers which keys were
// consumed, so leftovers can be reported as unknown.
class Section {
public:
    Section(const json* node, std::string path, std::vector<std::string>& errors)
        : node_(node), path_(std::move(path)), errors_(errors) {
        if (node_ && !node_->is_object()) {
            errors_.push_back(path_ + ": expected an object");
            node_ = nullptr;
        }
    }

    void number(const char* key, double& dst) {
        if (const json* v = take(key)) {
            if (v->is_number())
                dst = v->get<double>();
            else
                errors_.push_back(where(key) + ": expected a number");
        }
    }

    void integer(const char* key, int& dst) {
        if (const json* v = take(key)) {
            if (v->is_number_integer())
                dst = v->get<int>();
            else
                errors_.push_back(where(key) + ": expected an integer");
        }
    }

    void numbers(const char* key, std::vector<double>& dst) {
        if (const json* v = take(key)) {
            if (!v->is_array()) {
                errors_.push_back(where(key) + ": expected an array of numbers");
                return;
            }
            std::vector<double> out;
            for (const auto& e : *v) {
                if (!e.is_number()) {
                    errors_.push_back(where(key) + ": expected an array of numbers");
                    return;
                }
                out.push_back(e.get<double>());
            }
            dst = std::move(out);
        }
    }

    template <class Parse>
    void enumeration(const char* key, Parse parse) {
        if (const json* v = take(key)) {
            if (!v->is_string() || !parse(v->get<std::string>()))
                errors_.push_back(where(key) + ": unrecognized value " + v->dump());
        }
    }

    Section child(const char* key) { return Section(take(key), where(key), errors_); }

    void finish() {
        if (!node_) return;
        for (const auto& [key, unused] : node_->items())
            if (!seen_.count(key)) errors_.push_back(where(key.c_str()) + ": unknown key");
    }

private:
    const json* take(const char* key) {
        if (!node_) return nullptr;
        seen_.insert(key);
        auto it = node_->find(key);
        return it == node_->end() ? nullptr : &*it;
    }

    std::string where(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* node_;
    std::string path_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

void read_pilot(Section& s, PilotConfig& p) {
    s.number("reaction_delay_s", p.reaction_delay_s);
    s.number("noise_sigma_m", p.noise_sigma_m);
    s.number("velocity_noise_per_s", p.velocity_noise_per_s);
    s.number("pointing_noise_per_m", p.pointing_noise_per_m);
    s.number("tap_amplitude_mps", p.tap_amplitude_mps);
    s.number("pursuit_kp_kmh_per_m", p.pursuit_kp_kmh_per_m);
    s.number("pursuit_kd", p.pursuit_kd);
    s.number("lookahead_m", p.lookahead_m);
    s.number("steer_gain", p.steer_gain);
    s.number("min_turn_speed_mps", p.min_turn_speed_mps);
    s.number("max_lateral_accel_mps2", p.max_lateral_accel_mps2);
    s.number("max_hand_yaw_deg", p.max_hand_yaw_deg);
    s.number("hand_scale", p.pose.hand_scale);
    s.finish();
}

void read_config(const json& root, ScenarioConfig& c, std::vector<std::string>& errors) {
    Section top(&root, "", errors);
    top.enumeration("scenario", [&](const std::string& v) {
        auto t = parse_scenario_type(v);
        if (t) c.scenario = *t;
        return t.has_value();
    });
    top.number("tracking_loss_hold_s", c.controller.tracking_loss_hold_s);

    auto sim = top.child("sim");
    sim.number("dt_s", c.sim.dt_s);
    sim.number("capsule_radius_m", c.sim.capsule_radius_m);
    sim.number("capsule_height_m", c.sim.capsule_height_m);
    sim.number("turn_gain", c.sim.turn_gain);
    sim.number("max_duration_s", c.sim.max_duration_s);
    sim.enumeration("steering_mode", [&](const std::string& v) {
        if (v == "rate") c.sim.steering_mode = SteeringMode::Rate;
        else if (v == "absolute") c.sim.steering_mode = SteeringMode::Absolute;
        else return false;
        return true;
    });
    sim.finish();

    auto lim = top.child("limits");
    lim.number("s_min_kmh", c.controller.limits.s_min_kmh);
    lim.number("s_max_kmh", c.controller.limits.s_max_kmh);
    lim.number("accel_mps2", c.controller.limits.accel_mps2);
    lim.finish();

    auto fd = top.child("finger_distance");
    fd.number("reference_m", c.controller.finger_distance.reference_m);
    fd.number("dead_zone_m", c.controller.finger_distance.dead_zone_m);
    fd.finish();

    auto ft = top.child("finger_tapping");
    auto& tap = c.controller.finger_tapping;
    ft.number("t_min_s", tap.t_min_s);
    ft.number("t_max_s", tap.t_max_s);
    ft.number("cutoff_hz", tap.cutoff_hz);
    ft.number("buffer_s", tap.buffer_s);
    ft.number("peak_threshold_mps", tap.peaks.threshold);
    ft.number("peak_floor_mps", tap.peaks.floor);
    ft.number("refractory_s", tap.peaks.refractory_s);
    ft.finish();

    auto st = top.child("steering");
    st.number("smooth_time_s", c.controller.steering.smooth_time_s);
    st.finish();

    auto gp = top.child("gamepad");
    gp.number("deadzone", c.controller.gamepad.deadzone);
    gp.number("max_steer_deg", c.controller.gamepad.max_steer_deg);
    gp.finish();

    auto pu = top.child("pursuit");
    pu.integer("keyframe_count", c.pursuit.keyframe_count);
    pu.number("keyframe_period_s", c.pursuit.keyframe_period_s);
    pu.numbers("keyframe_choices_kmh", c.pursuit.keyframe_choices_kmh);
    pu.number("ball_accel_mps2", c.pursuit.ball_accel_mps2);
    pu.number("initial_gap_m", c.pursuit.initial_gap_m);
    pu.number("duration_s", c.pursuit.duration_s);
    pu.finish();

    auto wp = top.child("waypoints");
    wp.integer("gate_count", c.waypoints.gate_count);
    wp.number("inner_width_m", c.waypoints.inner_width_m);
    wp.number("inner_height_m", c.waypoints.inner_height_m);
    wp.number("depth_m", c.waypoints.depth_m);
    wp.number("spacing_m", c.waypoints.spacing_m);
    wp.number("lateral_range_m", c.waypoints.lateral_range_m);
    wp.number("start_offset_m", c.waypoints.start_offset_m);
    wp.number("finish_offset_m", c.waypoints.finish_offset_m);
    wp.number("bar_width_m", c.waypoints.bar_width_m);
    wp.finish();

    auto pi = top.child("pilot");
    read_pilot(pi, c.pilot);

    auto cl = top.child("classifier");
    cl.number("rbf_gamma", c.classifier.gamma);
    cl.number("c", c.classifier.c);
    cl.number("tolerance", c.classifier.tolerance);
    cl.finish();

    top.finish();
    // Frames arrive once per tick.
    if (c.sim.dt_s > 0.0) tap.sample_rate_hz = 1.0 / c.sim.dt_s;
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

std::string join(const std::vector<std::string>& errors) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    return msg;
}

} // namespace

std::vector<std::string> validate(const ScenarioConfig& c) {
    std::vector<std::string> errors;
    auto require = [&](bool ok, const char* what) {
        if (!ok) errors.emplace_back(what);
    };
    const auto& lim = c.controller.limits;
    require(c.sim.dt_s > 0.0 && std::isfinite(c.sim.dt_s), "sim.dt_s must be positive");
    require(c.sim.capsule_radius_m > 0.0, "sim.capsule_radius_m must be positive");
    require(c.sim.capsule_height_m >= 2.0 * c.sim.capsule_radius_m, "sim.capsule_height_m must be at least twice the radius");
    require(c.sim.max_duration_s > 0.0, "sim.max_duration_s must be positive");
    require(lim.s_min_kmh >= 0.0 && lim.s_min_kmh < lim.s_max_kmh, "limits need 0 <= s_min_kmh < s_max_kmh");
    require(lim.accel_mps2 > 0.0, "limits.accel_mps2 must be positive");
    require(c.controller.finger_distance.dead_zone_m > 0.0 &&
                c.controller.finger_distance.dead_zone_m < c.controller.finger_distance.reference_m,
            "finger_distance needs 0 < dead_zone_m < reference_m");
    const auto& tap = c.controller.finger_tapping;
    require(tap.t_min_s > 0.0 && tap.t_min_s < tap.t_max_s, "finger_tapping needs 0 < t_min_s < t_max_s");
    require(tap.cutoff_hz > 0.0 && tap.cutoff_hz < tap.sample_rate_hz / 2.0,
            "finger_tapping.cutoff_hz must lie below the Nyquist frequency of the tick rate");
    require(tap.buffer_s > 0.0, "finger_tapping.buffer_s must be positive");
    require(tap.peaks.threshold > 0.0, "finger_tapping.peak_threshold_mps must be positive");
    require(tap.peaks.floor < tap.peaks.threshold, "finger_tapping.peak_floor_mps must be below the threshold");
    require(tap.peaks.refractory_s >= 0.0, "finger_tapping.refractory_s must be non-negative");
    require(c.controller.steering.smooth_time_s > 0.0, "steering.smooth_time_s must be positive");
    require(c.controller.gamepad.deadzone >= 0.0 && c.controller.gamepad.deadzone < 1.0, "gamepad.deadzone must be in [0, 1)");
    require(c.controller.gamepad.max_steer_deg > 0.0, "gamepad.max_steer_deg must be positive");
    require(c.controller.tracking_loss_hold_s >= 0.0, "tracking_loss_hold_s must be non-negative");

    require(c.pursuit.keyframe_count > 0, "pursuit.keyframe_count must be positive");
    require(c.pursuit.keyframe_period_s > 0.0, "pursuit.keyframe_period_s must be positive");
    require(!c.pursuit.keyframe_choices_kmh.empty(), "pursuit.keyframe_choices_kmh must not be empty");
    for (double k : c.pursuit.keyframe_choices_kmh)
        if (k < lim.s_min_kmh || k > lim.s_max_kmh) {
            errors.emplace_back("pursuit.keyframe_choices_kmh must lie within the speed limits");
            break;
        }
    require(c.pursuit.ball_accel_mps2 > 0.0, "pursuit.ball_accel_mps2 must be positive");
    require(c.pursuit.initial_gap_m > 0.0, "pursuit.initial_gap_m must be positive");
    require(c.pursuit.duration_s > 0.0, "pursuit.duration_s must be positive");

    const auto& w = c.waypoints;
    require(w.gate_count > 0, "waypoints.gate_count must be positive");
    require(w.inner_width_m > 0.0 && w.inner_height_m > 0.0, "waypoints inner dimensions must be positive");
    require(w.depth_m > 0.0, "waypoints.depth_m must be positive");
    require(w.spacing_m > 0.0, "waypoints.spacing_m must be positive");
    require(w.lateral_range_m >= 0.0, "waypoints.lateral_range_m must be non-negative");
    require(w.start_offset_m > 0.0 && w.finish_offset_m > 0.0, "waypoints start/finish offsets must be positive");
    require(w.bar_width_m > 0.0, "waypoints.bar_width_m must be positive");

    const auto& p = c.pilot;
    require(p.reaction_delay_s >= 0.0, "pilot.reaction_delay_s must be non-negative");
    require(p.noise_sigma_m >= 0.0, "pilot.noise_sigma_m must be non-negative");
    require(p.velocity_noise_per_s >= 0.0 && p.pointing_noise_per_m >= 0.0, "pilot noise gains must be non-negative");
    require(p.tap_amplitude_mps > tap.peaks.threshold, "pilot.tap_amplitude_mps must exceed the peak threshold");
    require(p.lookahead_m > 0.0, "pilot.lookahead_m must be positive");
    require(p.pose.hand_scale > 0.0, "pilot.hand_scale must be positive");

    require(c.classifier.gamma > 0.0, "classifier.rbf_gamma must be positive");
    require(c.classifier.c > 0.0, "classifier.c must be positive");
    require(c.classifier.tolerance > 0.0, "classifier.tolerance must be positive");
    return errors;
}

ScenarioConfig parse_scenario_config(std::string_view text) {
    const json root = parse_json(text);
    ScenarioConfig cfg;
    std::vector<std::string> errors;
    if (!root.is_object()) throw ConfigError("config must be a JSON object");
    read_config(root, cfg, errors);
    for (auto& e : validate(cfg)) errors.push_back(std::move(e));
    if (!errors.empty()) throw ConfigError(join(errors));
    return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_config(buf.str());
}

PilotConfig apply_pilot_overrides(const PilotConfig& base, std::string_view text) {
    const json root = parse_json(text);
    PilotConfig out = base;
    std::vector<std::string> errors;
    Section s(&root, "pilot", errors);
    read_pilot(s, out);
    if (!errors.empty()) throw ConfigError(join(errors));
    return out;
}

} // namespace loco
