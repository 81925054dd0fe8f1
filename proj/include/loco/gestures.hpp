#pragma once

#include "loco/dsp.hpp"
#include "loco/hand.hpp"
#include "loco/svm.hpp"

#include <memory>
#include <optional>
#include <string_view>
#include <variant>

namespace loco {

struct LocomotionCommand {
    double speed_kmh = 0.0;
    double steering_deg = 0.0;  ///< positive yaws left (toward -x)

    friend bool operator==(const LocomotionCommand&, const LocomotionCommand&) = default;
};

struct SpeedLimits {
    double s_min_kmh = 0.0;
    double s_max_kmh = 5.0;
    double accel_mps2 = 0.5;  ///< applied by the simulator
};

struct FingerDistanceConfig {
    double reference_m = 0.08;  ///< r: thumb-index distance mapped to s_max
    double dead_zone_m = 0.025; ///< d: at or below this the speed is zero
};

struct FingerTappingConfig {
    double t_min_s = 0.3;
    double t_max_s = 0.95;
    double cutoff_hz = 5.0;
    double buffer_s = 1.0;
    double sample_rate_hz = 100.0;
    dsp::PeakDetectorParams peaks{};
};

enum class SteeringMode { Rate, Absolute };

struct SteeringConfig {
    Vec3 initial_dir{0.0, 0.0, -1.0};  ///< H_init
    Vec3 up{0.0, 1.0, 0.0};            ///< V_n
    double smooth_time_s = 0.2;
};

struct GamepadConfig {
    double deadzone = 0.05;
    double max_steer_deg = 45.0;
};

struct ControllerConfig {
    SpeedLimits limits{};
    FingerDistanceConfig finger_distance{};
    FingerTappingConfig finger_tapping{};
    SteeringConfig steering{};
    GamepadConfig gamepad{};
    double tracking_loss_hold_s = 0.25;
};

enum class Interface { FingerDistance, FingerNumber, FingerTapping, Gamepad };

std::string_view to_string(Interface iface);
std::optional<Interface> parse_interface(std::string_view id);
inline bool is_hand_interface(Interface iface) { return iface != Interface::Gamepad; }

// --- Speed mappings ---------------------------------------------------------

/// Linear thumb-index distance mapping. l <= d gives 0 (stop), l >= r gives s_max.
double finger_distance_speed(double distance_m, const FingerDistanceConfig& cfg, const SpeedLimits& lim);
double finger_distance_speed(const TrackedHand& right, const FingerDistanceConfig& cfg, const SpeedLimits& lim);

/// Tap-interval mapping. t_step <= t_min gives s_max, t_step > t_max gives s_min.
double tapping_speed(double t_step_s, const FingerTappingConfig& cfg, const SpeedLimits& lim);

/// Predicted class id read as km/h, clamped into the limits.
double finger_number_speed(const HandFrame& frame, const svm::ClassifierModel& model, const SpeedLimits& lim);

LocomotionCommand gamepad_command(const GamepadFrame& frame, const SpeedLimits& lim, const GamepadConfig& cfg);

// --- Steering ---------------------------------------------------------------

/// Signed yaw between H_init and the pointing direction projected onto the
/// plane normal to V_n, in degrees, in (-180, 180]. Returns nullopt when the
/// projection degenerates (hand pointing straight up or down).
std::optional<double> raw_steering_angle(const Vec3& pointing_dir, const SteeringConfig& cfg);

/// Critically damped spring toward `target`, the recurrence game engines ship
/// as SmoothDamp (no speed cap):
///
///   omega  = 2 / smooth_time,  x = omega * dt
///   decay  = 1 / (1 + x + 0.48 x^2 + 0.235 x^3)
///   change = current - target
///   temp   = (velocity + omega * change) * dt
///   velocity' = (velocity - omega * temp) * decay
///   output    = target + (change + temp) * decay
///
/// If the output passes the target it is snapped to it and the velocity is
/// set to (output - target) / dt, i.e. zero.
double smooth_damp(double current, double target, double& velocity, double smooth_time, double dt);

struct SteeringState {
    double angle_deg = 0.0;        ///< smoothed output
    double velocity_dps = 0.0;     ///< smoothing velocity
    double target_deg = 0.0;       ///< last raw angle
    std::optional<double> last_time;
    std::optional<double> last_tracked_time;
};

/// Advances the smoothed steering angle by one frame.
/// Untracked: hold the angle for `hold_s`, then smooth toward 0.
double steering_angle(const TrackedHand& left, SteeringState& state, const SteeringConfig& cfg, double now,
                      double hold_s);

// --- Finger tapping state machine -------------------------------------------

class TappingDetector {
public:
    TappingDetector(const FingerTappingConfig& cfg, const SpeedLimits& lim);

    /// Feeds one frame; returns the current speed in km/h.
    double step(const TrackedHand& right, double now);

    double speed() const { return speed_; }
    std::optional<double> last_peak() const { return last_peak_; }
    std::optional<double> last_interval() const { return last_interval_; }

private:
    FingerTappingConfig cfg_;
    SpeedLimits lim_;
    dsp::Biquad filter_;
    dsp::RingBuffer<dsp::Sample> buffer_;
    std::vector<dsp::Sample> scratch_;
    std::optional<double> last_peak_;
    std::optional<double> last_interval_;
    double speed_;
};

// --- Uniform per-frame controller -------------------------------------------

using InputFrame = std::variant<HandFrame, GamepadFrame>;

double frame_time(const InputFrame& frame);

/// One controller per trial. Hand interfaces take HandFrames (right hand for
/// speed, left for steering); the gamepad takes GamepadFrames. Lost tracking
/// never throws: the last speed is held for tracking_loss_hold_s and then
/// falls to s_min (finger tapping instead decays through its no-peak rule).
class LocomotionController {
public:
    LocomotionController(Interface iface, const ControllerConfig& cfg,
                         std::shared_ptr<const svm::ClassifierModel> model = nullptr);

    /// Throws std::invalid_argument if the frame type does not match the
    /// interface or timestamps go backwards.
    LocomotionCommand step(const InputFrame& frame);

    Interface interface() const { return iface_; }
    const ControllerConfig& config() const { return cfg_; }

private:
    double held_speed(double now) const;

    Interface iface_;
    ControllerConfig cfg_;
    std::shared_ptr<const svm::ClassifierModel> model_;
    SteeringState steering_{};
    TappingDetector tapping_;
    double speed_kmh_;
    std::optional<double> last_speed_time_;
    std::optional<double> last_time_;
};

} // namespace loco
