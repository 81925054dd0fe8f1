#pragma once

// Synthetic operators that stand in for human participants: they observe the
// simulation (after a reaction delay), decide on a desired speed and steering
// angle, and produce the input frame an interface needs to yield that command.

#include "loco/gestures.hpp"
#include "loco/rng.hpp"
#include "loco/sim.hpp"

#include <cstdint>
#include <deque>
#include <vector>

namespace loco {

enum class Side { Left, Right };

/// Parametric hand geometry for the pose classes. Offsets are in the hand's
/// own frame (lateral N x H, pointing H, normal N) for a right hand; the left
/// hand mirrors the lateral axis.
struct PoseTemplate {
    double hand_scale = 1.0;
    Vec3 left_palm{-0.12, 0.25, 0.0};
    Vec3 right_palm{0.12, 0.25, 0.0};

    /// Hand with the first `extended` fingers of the counting order
    /// (index, middle, ring, pinky, thumb) extended, the rest curled,
    /// palm facing down, pointing along `yaw_deg` (0 = -z).
    TrackedHand hand(Side side, int extended, double yaw_deg = 0.0) const;

    /// Right hand with only thumb and index opened, tips `distance_m` apart.
    TrackedHand pinch(double distance_m) const;

    /// Canonical two-hand frame for a speed class: left fist + right fist for
    /// class 0, otherwise fully extended left + right hand with `cls` fingers.
    HandFrame pose(int cls, double timestamp = 0.0) const;
};

inline constexpr int kPoseClassCount = 6;

/// Fingertip offset in the right-hand local frame.
Vec3 fingertip_offset(Finger finger, bool extended);

struct PilotConfig {
    double reaction_delay_s = 0.25;
    double noise_sigma_m = 0.003;       ///< per fingertip axis
    double velocity_noise_per_s = 10.0; ///< fingertip velocity noise sigma = noise_sigma_m * this
    double pointing_noise_per_m = 12.5; ///< pointing-direction noise sigma = noise_sigma_m * this (rad)
    double tap_amplitude_mps = 0.4;

    // Pursuit: desired = ball speed + kp * (distance - gap) + kd * (ball speed - own speed)
    double pursuit_kp_kmh_per_m = 1.5;
    double pursuit_kd = 0.5;

    // Waypoints: pure pursuit on the gate-centre polyline.
    double lookahead_m = 2.0;
    double steer_gain = 1.0;
    double min_turn_speed_mps = 0.3;
    double max_lateral_accel_mps2 = 1.0;  ///< desired speed capped at sqrt(this / |curvature|)
    double max_hand_yaw_deg = 90.0;

    PoseTemplate pose{};
};

/// Built-in profiles: "default" (noise 3 mm, delay 0.25 s) and "perfect"
/// (no noise, no delay).
std::optional<PilotConfig> pilot_profile(std::string_view name);

/// Two-hand frame for a speed class with i.i.d. Gaussian noise on every
/// fingertip coordinate.
HandFrame synthesize_pose(int cls, const PoseTemplate& pose, double sigma, Rng& rng, double timestamp = 0.0);

struct Observation {
    double t = 0.0;
    AvatarState avatar{};
    BallState ball{};
};

struct Desired {
    double speed_kmh = 0.0;
    double steer_deg = 0.0;  ///< the steering command the pilot wants the controller to emit
};

double pursuit_policy(const Observation& obs, const PilotConfig& cfg, const SpeedLimits& lim, double gap_m);

/// Pure pursuit toward the point `lookahead_m` further along the polyline than
/// the avatar's projection. `segment` tracks progress and only moves forward.
Desired waypoint_policy(const Observation& obs, std::span<const Gate> path, std::size_t& segment, const PilotConfig& cfg,
                        const SpeedLimits& lim, const SimConfig& sim);

/// Sinusoidal index-finger tapping whose period encodes a speed.
struct TapGenerator {
    double phase = 0.0;      ///< radians
    double tip_offset_y = 0.0;
    std::optional<double> last_t;
};

/// Tap period that the tapping mapping turns back into `speed_kmh`; nullopt
/// means stop tapping.
std::optional<double> tap_period_for(double speed_kmh, const FingerTappingConfig& cfg, const SpeedLimits& lim);

/// Thumb-index distance that the distance mapping turns back into `speed_kmh`.
double pinch_distance_for(double speed_kmh, const FingerDistanceConfig& cfg, const SpeedLimits& lim);

struct InverterState {
    TapGenerator tap{};
};

/// Noise-free input frame for the desired command. `noise` (if given) adds
/// tracking noise per the pilot configuration.
InputFrame invert_interface(Interface iface, const Desired& want, double t, const PilotConfig& cfg,
                            const ControllerConfig& ctl, InverterState& state, Rng* noise = nullptr);

class Pilot {
public:
    Pilot(Interface iface, ScenarioType scenario, const PilotConfig& cfg, const ControllerConfig& ctl,
          const SimConfig& sim, std::uint64_t seed, std::vector<Gate> path = {}, double gap_m = 3.0);

    InputFrame act(const Observation& now);
    const Desired& last_desired() const { return desired_; }

private:
    Interface iface_;
    ScenarioType scenario_;
    PilotConfig cfg_;
    ControllerConfig ctl_;
    SimConfig sim_;
    Rng rng_;
    std::vector<Gate> path_;
    double gap_m_;
    std::size_t delay_ticks_;
    std::deque<Observation> history_;
    std::size_t segment_ = 0;
    InverterState inverter_{};
    Desired desired_{};
};

struct PoseDataset {
    std::vector<HandFrame> frames;
    std::vector<int> labels;
};

/// `per_class` noisy samples of each class, class-major, timestamps spaced
/// by 0.01 s.
PoseDataset generate_pose_dataset(int per_class, double sigma, std::uint64_t seed, const PoseTemplate& pose = {});

} // namespace loco
