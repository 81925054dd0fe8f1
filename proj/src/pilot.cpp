#include "loco/pilot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace loco {
namespace {

// Right-hand fingertip offsets (lateral, pointing, normal) in metres.
constexpr std::array<Vec3, kFingerCount> kExtended{{
    {-0.065, 0.035, 0.010},
    {-0.025, 0.085, 0.000},
    {0.000, 0.090, 0.000},
    {0.020, 0.085, 0.000},
    {0.040, 0.070, 0.000},
}};

constexpr std::array<Vec3, kFingerCount> kCurled{{
    {-0.020, 0.010, 0.015},
    {-0.015, 0.020, 0.015},
    {0.000, 0.020, 0.018},
    {0.012, 0.018, 0.016},
    {0.022, 0.012, 0.014},
}};

// Fingers in the order they are raised when counting.
constexpr std::array<Finger, kFingerCount> kCountingOrder{kIndex, kMiddle, kRing, kPinky, kThumb};

constexpr Vec3 kPinchThumb{-0.045, 0.040, 0.010};

double deg_to_rad(double d) { return d * M_PI / 180.0; }
double rad_to_deg(double r) { return r * 180.0 / M_PI; }

double wrap_deg(double a) {
    a = std::fmod(a + 180.0, 360.0);
    if (a < 0.0) a += 360.0;
    return a - 180.0;
}

struct HandBasis {
    Vec3 lateral;
    Vec3 pointing;
    Vec3 normal;
};

HandBasis basis(double yaw_deg) {
    const Vec3 h = heading_direction(yaw_deg);
    const Vec3 n{0.0, -1.0, 0.0};
    return {cross(n, h), h, n};
}

Vec3 to_world(const HandBasis& b, const Vec3& centre, const Vec3& local, Side side, double scale) {
    const double lateral = side == Side::Left ? -local.x : local.x;
    return centre + (b.lateral * lateral + b.pointing * local.y + b.normal * local.z) * scale;
}

void add_noise(TrackedHand& hand, const PilotConfig& cfg, Rng& rng) {
    const double sigma = cfg.noise_sigma_m;
    for (auto& tip : hand.fingertips) {
        tip.x += rng.normal(0.0, sigma);
        tip.y += rng.normal(0.0, sigma);
        tip.z += rng.normal(0.0, sigma);
    }
    const double dir_sigma = sigma * cfg.pointing_noise_per_m;
    Vec3 h = hand.pointing_dir;
    h.x += rng.normal(0.0, dir_sigma);
    h.y += rng.normal(0.0, dir_sigma);
    h.z += rng.normal(0.0, dir_sigma);
    hand.pointing_dir = normalized(h);
    const double vel_sigma = sigma * cfg.velocity_noise_per_s;
    for (auto& v : hand.fingertip_velocities) {
        v.x += rng.normal(0.0, vel_sigma);
        v.y += rng.normal(0.0, vel_sigma);
        v.z += rng.normal(0.0, vel_sigma);
    }
}

} // namespace

Vec3 fingertip_offset(Finger finger, bool extended) { return extended ? kExtended[finger] : kCurled[finger]; }

TrackedHand PoseTemplate::hand(Side side, int extended, double yaw_deg) const {
    const HandBasis b = basis(yaw_deg);
    TrackedHand h;
    h.tracked = true;
    h.palm_centre = side == Side::Left ? left_palm : right_palm;
    h.palm_normal = b.normal;
    h.pointing_dir = b.pointing;
    std::array<bool, kFingerCount> up{};
    for (int k = 0; k < std::clamp(extended, 0, 5); ++k) up[kCountingOrder[static_cast<std::size_t>(k)]] = true;
    for (std::size_t f = 0; f < kFingerCount; ++f)
        h.fingertips[f] = to_world(b, h.palm_centre, up[f] ? kExtended[f] : kCurled[f], side, hand_scale);
    return h;
}

TrackedHand PoseTemplate::pinch(double distance_m) const {
    TrackedHand h = hand(Side::Right, 0);
    const HandBasis b = basis(0.0);
    const Vec3 index_local{kPinchThumb.x, kPinchThumb.y + distance_m / hand_scale, kPinchThumb.z};
    h.fingertips[kThumb] = to_world(b, h.palm_centre, kPinchThumb, Side::Right, hand_scale);
    h.fingertips[kIndex] = to_world(b, h.palm_centre, index_local, Side::Right, hand_scale);
    return h;
}

HandFrame PoseTemplate::pose(int cls, double timestamp) const {
    if (cls < 0 || cls >= kPoseClassCount) throw std::invalid_argument("pose class must be in 0..5");
    HandFrame f;
    f.timestamp = timestamp;
    f.left = hand(Side::Left, cls == 0 ? 0 : 5);
    f.right = hand(Side::Right, cls);
    return f;
}

std::optional<PilotConfig> pilot_profile(std::string_view name) {
    if (name == "default") return PilotConfig{};
    if (name == "perfect") {
        PilotConfig p;
        p.reaction_delay_s = 0.0;
        p.noise_sigma_m = 0.0;
        return p;
    }
    return std::nullopt;
}

HandFrame synthesize_pose(int cls, const PoseTemplate& pose, double sigma, Rng& rng, double timestamp) {
    HandFrame f = pose.pose(cls, timestamp);
    for (TrackedHand* h : {&f.left, &f.right})
        for (auto& tip : h->fingertips) {
            tip.x += rng.normal(0.0, sigma);
            tip.y += rng.normal(0.0, sigma);
            tip.z += rng.normal(0.0, sigma);
        }
    return f;
}

double pursuit_policy(const Observation& obs, const PilotConfig& cfg, const SpeedLimits& lim, double gap_m) {
    const double distance = norm(obs.ball.position - obs.avatar.position);
    const double ball_kmh = mps_to_kmh(obs.ball.speed_mps);
    const double closing_kmh = mps_to_kmh(obs.ball.speed_mps - obs.avatar.speed_mps);
    const double want = ball_kmh + cfg.pursuit_kp_kmh_per_m * (distance - gap_m) + cfg.pursuit_kd * closing_kmh;
    return std::clamp(want, lim.s_min_kmh, lim.s_max_kmh);
}

Desired waypoint_policy(const Observation& obs, std::span<const Gate> path, std::size_t& segment, const PilotConfig& cfg,
                        const SpeedLimits& lim, const SimConfig& sim) {
    Desired out;
    if (path.size() < 2) return out;
    const double px = obs.avatar.position.x;
    const double pz = obs.avatar.position.z;

    // Closest point over the current and a few following segments.
    auto project = [&](std::size_t s, double& along) {
        const Gate& a = path[s];
        const Gate& b = path[s + 1];
        const double sx = b.x - a.x;
        const double sz = b.z - a.z;
        const double len2 = sx * sx + sz * sz;
        along = len2 > 0.0 ? std::clamp(((px - a.x) * sx + (pz - a.z) * sz) / len2, 0.0, 1.0) : 0.0;
        const double qx = a.x + along * sx - px;
        const double qz = a.z + along * sz - pz;
        return qx * qx + qz * qz;
    };
    segment = std::min(segment, path.size() - 2);
    double best_along = 0.0;
    double best = project(segment, best_along);
    for (std::size_t s = segment + 1; s < std::min(path.size() - 1, segment + 4); ++s) {
        double along = 0.0;
        const double d2 = project(s, along);
        if (d2 < best) {
            best = d2;
            best_along = along;
            segment = s;
        }
    }

    // Walk the lookahead distance along the polyline.
    std::size_t s = segment;
    double remaining = cfg.lookahead_m;
    double tx = 0.0;
    double tz = 0.0;
    double t = best_along;
    while (true) {
        const Gate& a = path[s];
        const Gate& b = path[s + 1];
        const double len = std::hypot(b.x - a.x, b.z - a.z);
        const double left = (1.0 - t) * len;
        if (remaining <= left || s + 2 >= path.size()) {
            const double f = len > 0.0 ? std::min(1.0, t + remaining / len) : 1.0;
            tx = a.x + f * (b.x - a.x);
            tz = a.z + f * (b.z - a.z);
            break;
        }
        remaining -= left;
        ++s;
        t = 0.0;
    }

    const double dx = tx - px;
    const double dz = tz - pz;
    const double reach = std::hypot(dx, dz);
    const double bearing = rad_to_deg(std::atan2(-dx, -dz));
    const double alpha = wrap_deg(bearing - obs.avatar.heading_deg);
    const double curvature = reach > 1e-6 ? 2.0 * std::sin(deg_to_rad(alpha)) / reach : 0.0;

    double cap_kmh = lim.s_max_kmh;
    if (std::abs(curvature) > 1e-9 && cfg.max_lateral_accel_mps2 > 0.0)
        cap_kmh = mps_to_kmh(std::sqrt(cfg.max_lateral_accel_mps2 / std::abs(curvature)));
    out.speed_kmh = std::clamp(std::min(cap_kmh, lim.s_max_kmh), lim.s_min_kmh, lim.s_max_kmh);
    if (sim.steering_mode == SteeringMode::Rate) {
        const double v = std::max(obs.avatar.speed_mps, cfg.min_turn_speed_mps);
        const double yaw_rate = rad_to_deg(v * curvature) * cfg.steer_gain;
        out.steer_deg = sim.turn_gain != 0.0 ? yaw_rate / sim.turn_gain : 0.0;
    } else {
        out.steer_deg = obs.avatar.heading_deg + alpha;
    }
    return out;
}

std::optional<double> tap_period_for(double speed_kmh, const FingerTappingConfig& cfg, const SpeedLimits& lim) {
    const double span = lim.s_max_kmh - lim.s_min_kmh;
    const double frac = std::clamp((speed_kmh - lim.s_min_kmh) / span, 0.0, 1.0);
    if (frac <= 0.0) return std::nullopt;
    return cfg.t_min_s + (1.0 - frac) * (cfg.t_max_s - cfg.t_min_s);
}

double pinch_distance_for(double speed_kmh, const FingerDistanceConfig& cfg, const SpeedLimits& lim) {
    const double span = lim.s_max_kmh - lim.s_min_kmh;
    const double frac = std::clamp((speed_kmh - lim.s_min_kmh) / span, 0.0, 1.0);
    return cfg.dead_zone_m + frac * (cfg.reference_m - cfg.dead_zone_m);
}

InputFrame invert_interface(Interface iface, const Desired& want, double t, const PilotConfig& cfg,
                            const ControllerConfig& ctl, InverterState& state, Rng* noise) {
    if (iface == Interface::Gamepad) {
        GamepadFrame g;
        g.timestamp = t;
        g.right_y = std::clamp(want.speed_kmh / ctl.limits.s_max_kmh, 0.0, 1.0);
        g.left_x = std::clamp(want.steer_deg / ctl.gamepad.max_steer_deg, -1.0, 1.0);
        return g;
    }

    const PoseTemplate& pose = cfg.pose;
    const double yaw = std::clamp(want.steer_deg, -cfg.max_hand_yaw_deg, cfg.max_hand_yaw_deg);
    HandFrame f;
    f.timestamp = t;
    switch (iface) {
    case Interface::FingerDistance:
        f.left = pose.hand(Side::Left, 5, yaw);
        f.right = pose.pinch(pinch_distance_for(want.speed_kmh, ctl.finger_distance, ctl.limits));
        break;
    case Interface::FingerNumber: {
        const int cls = static_cast<int>(std::clamp(std::round(want.speed_kmh), 0.0, 5.0));
        f.left = pose.hand(Side::Left, cls == 0 ? 0 : 5, yaw);
        f.right = pose.hand(Side::Right, cls);
        break;
    }
    case Interface::FingerTapping: {
        f.left = pose.hand(Side::Left, 5, yaw);
        f.right = pose.hand(Side::Right, 1);
        TapGenerator& tap = state.tap;
        const double dt = tap.last_t ? t - *tap.last_t : 0.0;
        tap.last_t = t;
        double vy = 0.0;
        if (auto period = tap_period_for(want.speed_kmh, ctl.finger_tapping, ctl.limits)) {
            tap.phase = std::fmod(tap.phase + 2.0 * M_PI * dt / *period, 2.0 * M_PI);
            vy = cfg.tap_amplitude_mps * std::sin(tap.phase);
        } else {
            tap.phase = 0.0;
        }
        tap.tip_offset_y += vy * dt;
        f.right.fingertips[kIndex].y += tap.tip_offset_y;
        f.right.fingertip_velocities[kIndex] = {0.0, vy, 0.0};
        break;
    }
    case Interface::Gamepad:
        break;
    }
    if (noise && cfg.noise_sigma_m > 0.0) {
        add_noise(f.left, cfg, *noise);
        add_noise(f.right, cfg, *noise);
    }
    return f;
}

Pilot::Pilot(Interface iface, ScenarioType scenario, const PilotConfig& cfg, const ControllerConfig& ctl,
             const SimConfig& sim, std::uint64_t seed, std::vector<Gate> path, double gap_m)
    : iface_(iface),
      scenario_(scenario),
      cfg_(cfg),
      ctl_(ctl),
      sim_(sim),
      rng_(seed, streams::kPilot),
      path_(std::move(path)),
      gap_m_(gap_m),
      delay_ticks_(static_cast<std::size_t>(std::llround(std::max(0.0, cfg.reaction_delay_s) / sim.dt_s))) {
    if (scenario_ == ScenarioType::Waypoints && path_.size() < 2)
        throw std::invalid_argument("waypoints pilot needs the gate-centre path");
}

InputFrame Pilot::act(const Observation& now) {
    history_.push_back(now);
    while (history_.size() > delay_ticks_ + 1) history_.pop_front();
    const Observation& seen = history_.front();

    if (scenario_ == ScenarioType::Pursuit) {
        desired_ = {pursuit_policy(seen, cfg_, ctl_.limits, gap_m_), 0.0};
    } else {
        desired_ = waypoint_policy(seen, path_, segment_, cfg_, ctl_.limits, sim_);
    }
    return invert_interface(iface_, desired_, now.t, cfg_, ctl_, inverter_, &rng_);
}

PoseDataset generate_pose_dataset(int per_class, double sigma, std::uint64_t seed, const PoseTemplate& pose) {
    if (per_class <= 0) throw std::invalid_argument("empty dataset");
    PoseDataset ds;
    Rng rng(seed, streams::kDataset);
    std::size_t i = 0;
    for (int cls = 0; cls < kPoseClassCount; ++cls)
        for (int n = 0; n < per_class; ++n) {
            ds.frames.push_back(synthesize_pose(cls, pose, sigma, rng, static_cast<double>(++i) * 0.01));
            ds.labels.push_back(cls);
        }
    return ds;
}

} // namespace loco
