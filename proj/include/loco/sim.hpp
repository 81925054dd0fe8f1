#pragma once

#include "loco/gestures.hpp"
#include "loco/geometry.hpp"

#include <cstdint>
#include <string_view>
#include <optional>
#include <vector>

namespace loco {

enum class ScenarioType { Pursuit, Waypoints };

std::string_view to_string(ScenarioType type);
std::optional<ScenarioType> parse_scenario_type(std::string_view id);

struct SimConfig {
    double dt_s = 0.01;
    double capsule_radius_m = 0.3;
    double capsule_height_m = 1.7;
    double turn_gain = 1.0;  ///< rate mode: heading deg/s per commanded deg
    SteeringMode steering_mode = SteeringMode::Rate;
    double max_duration_s = 900.0;  ///< waypoints trials stop here if the finish is never reached
};

struct AvatarState {
    Vec3 position{};
    double heading_deg = 0.0;  ///< yaw, 0 faces -z, positive turns toward -x
    double speed_mps = 0.0;
    double capsule_radius_m = 0.3;
    double capsule_height_m = 1.7;
};

/// Moves the speed toward the command by at most accel*dt (clamped to
/// [s_min, s_max]), updates the heading (rate: += turn_gain*steer*dt;
/// absolute: = steer) and advances the position by the trapezoidal speed
/// integral along the mean of the old and new headings.
AvatarState step_avatar(const AvatarState& state, const LocomotionCommand& cmd, const SpeedLimits& lim,
                        const SimConfig& sim, double dt);

/// Moves `value` toward `target` by at most `max_delta`.
double approach(double value, double target, double max_delta);

// --- Target pursuit ----------------------------------------------------------

struct PursuitConfig {
    int keyframe_count = 17;
    double keyframe_period_s = 10.0;
    std::vector<double> keyframe_choices_kmh{2.0, 3.0, 4.0};
    double ball_accel_mps2 = 0.3;
    double initial_gap_m = 3.0;
    double duration_s = 180.0;
};

struct PursuitScenario {
    PursuitConfig config;
    std::vector<double> keyframes_kmh;
};

/// Draws keyframe_count values uniformly from the choice set using the
/// keyframe stream of `seed`.
PursuitScenario make_pursuit_scenario(const PursuitConfig& cfg, std::uint64_t seed);

struct BallState {
    Vec3 position{};
    double speed_mps = 0.0;
};

/// Keyframe index floor(t / period); the last keyframe holds past the schedule.
std::size_t keyframe_index(const PursuitScenario& scenario, double t);
double ball_target_kmh(const PursuitScenario& scenario, double t);

/// Ball starts at rest, initial_gap_m ahead of the origin along -z.
BallState initial_ball(const PursuitScenario& scenario);

/// Straight-line motion along -z; speed approaches the keyframe target at the
/// ball acceleration, position integrates trapezoidally.
BallState step_ball(const BallState& ball, const PursuitScenario& scenario, double t, double dt);

// --- Waypoints ---------------------------------------------------------------

struct WaypointsConfig {
    int gate_count = 50;
    double inner_width_m = 2.0;
    double inner_height_m = 2.0;
    double depth_m = 0.1;
    double spacing_m = 5.0;       ///< back face of a gate to the front face of the next
    double lateral_range_m = 2.0; ///< offsets drawn uniformly in +-range
    double start_offset_m = 5.0;  ///< start to the front face of the first gate
    double finish_offset_m = 5.0; ///< back face of the last gate to the finish trigger
    double bar_width_m = 0.2;     ///< frame bar cross-section in the gate plane (depth = depth_m)
};

struct Gate {
    double x = 0.0;  ///< centre of the opening
    double z = 0.0;  ///< centre of the gate depth

    friend bool operator==(const Gate&, const Gate&) = default;
};

struct WaypointsScenario {
    WaypointsConfig config;
    Vec3 start{};
    std::vector<Gate> gates;
    double finish_z = 0.0;
};

WaypointsScenario make_waypoints_scenario(const WaypointsConfig& cfg, std::uint64_t seed);

struct Box {
    Vec3 min;
    Vec3 max;
};

/// The three frame bars (left post, right post, lintel) of a gate.
std::vector<Box> gate_frame(const Gate& gate, const WaypointsConfig& cfg);

/// Vertical capsule standing on `base` (segment from base.y + r to
/// base.y + h - r) against an axis-aligned box.
double capsule_box_distance(const Vec3& base, double radius, double height, const Box& box);
bool capsule_intersects(const Vec3& base, double radius, double height, const Box& box);

enum class GateEventKind { Pass, Miss, Collision };

std::string_view to_string(GateEventKind kind);

struct GateEvent {
    GateEventKind kind = GateEventKind::Pass;
    int gate = 0;

    friend bool operator==(const GateEvent&, const GateEvent&) = default;
};

/// Per-gate bookkeeping across a trial.
struct GateTracker {
    std::vector<bool> resolved;    ///< passed or missed; never revisited
    std::vector<bool> in_contact;  ///< inside a collision episode
    std::size_t passes = 0;
    std::size_t misses = 0;
    std::size_t collisions = 0;

    explicit GateTracker(std::size_t gate_count) : resolved(gate_count, false), in_contact(gate_count, false) {}
    bool all_resolved() const { return passes + misses == resolved.size(); }
};

/// Events for one tick of motion from `from` to `to`. A gate resolves the
/// first time the capsule axis crosses its plane heading forward: inside the
/// opening it passes, outside it misses. A collision is reported when the
/// capsule at `to` starts touching a frame bar.
std::vector<GateEvent> gate_events(const Vec3& from, const Vec3& to, const WaypointsScenario& scenario,
                                   const SimConfig& sim, GateTracker& tracker);

/// Remaining unresolved gates become misses (trial finished without crossing them).
std::vector<GateEvent> resolve_remaining(GateTracker& tracker);

/// Piecewise-linear path through the start, every gate centre, and the
/// finish point straight behind the last gate, as (x, z) vertices.
std::vector<Gate> optimal_path(const WaypointsScenario& scenario);

} // namespace loco
