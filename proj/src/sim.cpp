#include "loco/sim.hpp"

#include "loco/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace loco {

std::string_view to_string(ScenarioType type) {
    return type == ScenarioType::Pursuit ? "pursuit" : "waypoints";
}

std::optional<ScenarioType> parse_scenario_type(std::string_view id) {
    if (id == "pursuit") return ScenarioType::Pursuit;
    if (id == "waypoints") return ScenarioType::Waypoints;
    return std::nullopt;
}

double approach(double value, double target, double max_delta) {
    if (target > value) return std::min(target, value + max_delta);
    return std::max(target, value - max_delta);
}

AvatarState step_avatar(const AvatarState& s, const LocomotionCommand& cmd, const SpeedLimits& lim, const SimConfig& sim,
                        double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_avatar needs dt > 0");
    AvatarState next = s;
    const double lo = kmh_to_mps(lim.s_min_kmh);
    const double hi = kmh_to_mps(lim.s_max_kmh);
    const double target = std::clamp(kmh_to_mps(cmd.speed_kmh), lo, hi);
    next.speed_mps = std::clamp(approach(s.speed_mps, target, lim.accel_mps2 * dt), 0.0, hi);

    if (sim.steering_mode == SteeringMode::Rate)
        next.heading_deg = s.heading_deg + sim.turn_gain * cmd.steering_deg * dt;
    else
        next.heading_deg = cmd.steering_deg;

    const double distance = 0.5 * (s.speed_mps + next.speed_mps) * dt;
    next.position = s.position + heading_direction(0.5 * (s.heading_deg + next.heading_deg)) * distance;
    return next;
}

PursuitScenario make_pursuit_scenario(const PursuitConfig& cfg, std::uint64_t seed) {
    if (cfg.keyframe_count <= 0 || cfg.keyframe_choices_kmh.empty())
        throw std::invalid_argument("pursuit scenario needs keyframes and keyframe choices");
    PursuitScenario sc{cfg, {}};
    Rng rng(seed, streams::kKeyframes);
    for (int k = 0; k < cfg.keyframe_count; ++k)
        sc.keyframes_kmh.push_back(cfg.keyframe_choices_kmh[rng.below(cfg.keyframe_choices_kmh.size())]);
    return sc;
}

std::size_t keyframe_index(const PursuitScenario& sc, double t) {
    // The epsilon keeps t = k * period (accumulated as tick * dt) on the new keyframe.
    const double k = std::floor(t / sc.config.keyframe_period_s + 1e-9);
    if (k <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(k), sc.keyframes_kmh.size() - 1);
}

double ball_target_kmh(const PursuitScenario& sc, double t) { return sc.keyframes_kmh[keyframe_index(sc, t)]; }

BallState initial_ball(const PursuitScenario& sc) { return {{0.0, 0.0, -sc.config.initial_gap_m}, 0.0}; }

BallState step_ball(const BallState& ball, const PursuitScenario& sc, double t, double dt) {
    BallState next = ball;
    const double target = kmh_to_mps(ball_target_kmh(sc, t));
    next.speed_mps = approach(ball.speed_mps, target, sc.config.ball_accel_mps2 * dt);
    next.position.z -= 0.5 * (ball.speed_mps + next.speed_mps) * dt;
    return next;
}

WaypointsScenario make_waypoints_scenario(const WaypointsConfig& cfg, std::uint64_t seed) {
    if (cfg.gate_count <= 0) throw std::invalid_argument("waypoints scenario needs gates");
    WaypointsScenario sc;
    sc.config = cfg;
    Rng rng(seed, streams::kGates);
    double front = sc.start.z - cfg.start_offset_m;
    for (int g = 0; g < cfg.gate_count; ++g) {
        const double x = cfg.lateral_range_m > 0.0 ? rng.uniform(-cfg.lateral_range_m, cfg.lateral_range_m) : 0.0;
        sc.gates.push_back({x, front - cfg.depth_m / 2.0});
        front = front - cfg.depth_m - cfg.spacing_m;
    }
    sc.finish_z = sc.gates.back().z - cfg.depth_m / 2.0 - cfg.finish_offset_m;
    return sc;
}

std::vector<Box> gate_frame(const Gate& g, const WaypointsConfig& cfg) {
    const double half = cfg.inner_width_m / 2.0;
    const double bar = cfg.bar_width_m;
    const double z0 = g.z - cfg.depth_m / 2.0;
    const double z1 = g.z + cfg.depth_m / 2.0;
    const double top = cfg.inner_height_m + bar;
    return {
        Box{{g.x - half - bar, 0.0, z0}, {g.x - half, top, z1}},
        Box{{g.x + half, 0.0, z0}, {g.x + half + bar, top, z1}},
        Box{{g.x - half - bar, cfg.inner_height_m, z0}, {g.x + half + bar, top, z1}},
    };
}

double capsule_box_distance(const Vec3& base, double r, double h, const Box& b) {
    auto gap = [](double lo, double hi, double blo, double bhi) {
        if (hi < blo) return blo - hi;
        if (lo > bhi) return lo - bhi;
        return 0.0;
    };
    // Both shapes are axis aligned, so the separation splits per axis.
    const double dx = gap(base.x, base.x, b.min.x, b.max.x);
    const double dz = gap(base.z, base.z, b.min.z, b.max.z);
    const double dy = gap(base.y + r, base.y + std::max(r, h - r), b.min.y, b.max.y);
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

bool capsule_intersects(const Vec3& base, double r, double h, const Box& b) {
    return capsule_box_distance(base, r, h, b) < r;
}

std::string_view to_string(GateEventKind kind) {
    switch (kind) {
    case GateEventKind::Pass: return "pass";
    case GateEventKind::Miss: return "miss";
    case GateEventKind::Collision: return "collision";
    }
    return "unknown";
}

std::vector<GateEvent> gate_events(const Vec3& from, const Vec3& to, const WaypointsScenario& sc, const SimConfig& sim,
                                   GateTracker& tracker) {
    std::vector<GateEvent> events;
    const auto& cfg = sc.config;
    const double reach = cfg.inner_width_m / 2.0 + cfg.bar_width_m + sim.capsule_radius_m;
    for (std::size_t i = 0; i < sc.gates.size(); ++i) {
        const Gate& g = sc.gates[i];
        const int id = static_cast<int>(i);

        bool touching = false;
        if (std::abs(to.z - g.z) < cfg.depth_m + sim.capsule_radius_m && std::abs(to.x - g.x) < reach) {
            for (const Box& bar : gate_frame(g, cfg))
                touching = touching || capsule_intersects(to, sim.capsule_radius_m, sim.capsule_height_m, bar);
        }
        if (touching && !tracker.in_contact[i]) {
            events.push_back({GateEventKind::Collision, id});
            ++tracker.collisions;
        }
        tracker.in_contact[i] = touching;

        if (!tracker.resolved[i] && from.z > g.z && to.z <= g.z) {
            const double f = (from.z - g.z) / (from.z - to.z);
            const double x = from.x + f * (to.x - from.x);
            tracker.resolved[i] = true;
            if (std::abs(x - g.x) <= cfg.inner_width_m / 2.0) {
                events.push_back({GateEventKind::Pass, id});
                ++tracker.passes;
            } else {
                events.push_back({GateEventKind::Miss, id});
                ++tracker.misses;
            }
        }
    }
    return events;
}

std::vector<GateEvent> resolve_remaining(GateTracker& tracker) {
    std::vector<GateEvent> events;
    for (std::size_t i = 0; i < tracker.resolved.size(); ++i) {
        if (tracker.resolved[i]) continue;
        tracker.resolved[i] = true;
        ++tracker.misses;
        events.push_back({GateEventKind::Miss, static_cast<int>(i)});
    }
    return events;
}

std::vector<Gate> optimal_path(const WaypointsScenario& sc) {
    std::vector<Gate> path;
    path.push_back({sc.start.x, sc.start.z});
    path.insert(path.end(), sc.gates.begin(), sc.gates.end());
    path.push_back({sc.gates.back().x, sc.finish_z});
    return path;
}

} // namespace loco
