#include "loco/gestures.hpp"

#include "loco/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace loco {

std::string_view to_string(Interface iface) {
    switch (iface) {
    case Interface::FingerDistance: return "finger-distance";
    case Interface::FingerNumber: return "finger-number";
    case Interface::FingerTapping: return "finger-tapping";
    case Interface::Gamepad: return "gamepad";
    }
    return "unknown";
}

std::optional<Interface> parse_interface(std::string_view id) {
    for (auto iface : {Interface::FingerDistance, Interface::FingerNumber, Interface::FingerTapping, Interface::Gamepad})
        if (to_string(iface) == id) return iface;
    return std::nullopt;
}

double finger_distance_speed(double l, const FingerDistanceConfig& cfg, const SpeedLimits& lim) {
    const double r = cfg.reference_m;
    const double d = cfg.dead_zone_m;
    if (l <= d) return lim.s_min_kmh;
    if (l >= r) return lim.s_max_kmh;
    return (l - d) / (r - d) * (lim.s_max_kmh - lim.s_min_kmh) + lim.s_min_kmh;
}

double finger_distance_speed(const TrackedHand& right, const FingerDistanceConfig& cfg, const SpeedLimits& lim) {
    if (!right.tracked) throw std::invalid_argument("finger distance needs a tracked right hand");
    return finger_distance_speed(norm(right.fingertips[kThumb] - right.fingertips[kIndex]), cfg, lim);
}

double tapping_speed(double t_step, const FingerTappingConfig& cfg, const SpeedLimits& lim) {
    if (t_step <= cfg.t_min_s) return lim.s_max_kmh;
    if (t_step > cfg.t_max_s) return lim.s_min_kmh;
    const double frac = (t_step - cfg.t_min_s) / (cfg.t_max_s - cfg.t_min_s);
    return (1.0 - frac) * (lim.s_max_kmh - lim.s_min_kmh) + lim.s_min_kmh;
}

double finger_number_speed(const HandFrame& frame, const svm::ClassifierModel& model, const SpeedLimits& lim) {
    const int label = svm::predict(model, stack_features(frame.left, frame.right));
    return std::clamp(static_cast<double>(label), lim.s_min_kmh, lim.s_max_kmh);
}

LocomotionCommand gamepad_command(const GamepadFrame& raw, const SpeedLimits& lim, const GamepadConfig& cfg) {
    const GamepadFrame f = clamped(raw);
    LocomotionCommand cmd;
    cmd.speed_kmh = f.right_y < cfg.deadzone ? 0.0 : f.right_y * lim.s_max_kmh;
    cmd.speed_kmh = std::clamp(cmd.speed_kmh, lim.s_min_kmh, lim.s_max_kmh);
    cmd.steering_deg = std::abs(f.left_x) < cfg.deadzone ? 0.0 : f.left_x * cfg.max_steer_deg;
    return cmd;
}

std::optional<double> raw_steering_angle(const Vec3& pointing_dir, const SteeringConfig& cfg) {
    const Vec3 up = normalized(cfg.up);
    const Vec3 current = pointing_dir - up * dot(pointing_dir, up);
    const double len = norm(current);
    if (!(len > 1e-9)) return std::nullopt;

    const Vec3& init = cfg.initial_dir;
    const double d = dot(cfg.up, cross(init, current));
    const double cosine = std::clamp(dot(init, current) / (norm(init) * len), -1.0, 1.0);
    const double angle = std::acos(cosine) * 180.0 / M_PI;
    return d < 0.0 ? -angle : angle;
}

double smooth_damp(double current, double target, double& velocity, double smooth_time, double dt) {
    smooth_time = std::max(1e-4, smooth_time);
    const double omega = 2.0 / smooth_time;
    const double x = omega * dt;
    const double decay = 1.0 / (1.0 + x + 0.48 * x * x + 0.235 * x * x * x);
    const double change = current - target;
    const double temp = (velocity + omega * change) * dt;
    velocity = (velocity - omega * temp) * decay;
    double output = target + (change + temp) * decay;
    if ((target - current > 0.0) == (output > target)) {
        output = target;
        velocity = 0.0;
    }
    return output;
}

double steering_angle(const TrackedHand& left, SteeringState& s, const SteeringConfig& cfg, double now, double hold_s) {
    const double dt = s.last_time ? now - *s.last_time : 0.0;
    s.last_time = now;

    if (left.tracked) {
        s.last_tracked_time = now;
        if (auto raw = raw_steering_angle(left.pointing_dir, cfg)) s.target_deg = *raw;
    } else if (!s.last_tracked_time || now - *s.last_tracked_time > hold_s) {
        s.target_deg = 0.0;
    } else {
        return s.angle_deg;
    }

    if (dt > 0.0) s.angle_deg = smooth_damp(s.angle_deg, s.target_deg, s.velocity_dps, cfg.smooth_time_s, dt);
    return s.angle_deg;
}

TappingDetector::TappingDetector(const FingerTappingConfig& cfg, const SpeedLimits& lim)
    : cfg_(cfg),
      lim_(lim),
      filter_(dsp::design_butterworth_lowpass(cfg.cutoff_hz, cfg.sample_rate_hz)),
      buffer_(static_cast<std::size_t>(std::max(2.0, std::round(cfg.buffer_s * cfg.sample_rate_hz)))),
      speed_(lim.s_min_kmh) {
    if (!(cfg.t_min_s > 0.0) || !(cfg.t_min_s < cfg.t_max_s))
        throw std::invalid_argument("finger tapping needs 0 < t_min < t_max");
}

double TappingDetector::step(const TrackedHand& right, double now) {
    if (right.tracked) {
        const double filtered = filter_.process(right.fingertip_velocities[kIndex].y);
        buffer_.push({now, filtered});
        buffer_.linearize(scratch_);
        for (const auto& peak : dsp::detect_peaks(std::span<const dsp::Sample>(scratch_), cfg_.peaks)) {
            if (last_peak_ && peak.timestamp < *last_peak_ + cfg_.peaks.refractory_s) continue;
            if (last_peak_) {
                last_interval_ = peak.timestamp - *last_peak_;
                speed_ = tapping_speed(*last_interval_, cfg_, lim_);
            }
            last_peak_ = peak.timestamp;
        }
    }
    if (!last_peak_ || now - *last_peak_ > cfg_.t_max_s) speed_ = lim_.s_min_kmh;
    return speed_;
}

double frame_time(const InputFrame& frame) {
    return std::visit([](const auto& f) { return f.timestamp; }, frame);
}

LocomotionController::LocomotionController(Interface iface, const ControllerConfig& cfg,
                                           std::shared_ptr<const svm::ClassifierModel> model)
    : iface_(iface),
      cfg_(cfg),
      model_(std::move(model)),
      tapping_(cfg.finger_tapping, cfg.limits),
      speed_kmh_(cfg.limits.s_min_kmh) {
    if (iface_ == Interface::FingerNumber && (!model_ || !model_->trained()))
        throw std::invalid_argument("finger-number controller needs a trained classifier model");
}

double LocomotionController::held_speed(double now) const {
    if (last_speed_time_ && now - *last_speed_time_ <= cfg_.tracking_loss_hold_s) return speed_kmh_;
    return cfg_.limits.s_min_kmh;
}

LocomotionCommand LocomotionController::step(const InputFrame& frame) {
    const double now = frame_time(frame);
    if (last_time_ && !(now > *last_time_)) throw std::invalid_argument("controller frames must have increasing timestamps");
    last_time_ = now;

    if (iface_ == Interface::Gamepad) {
        const auto* pad = std::get_if<GamepadFrame>(&frame);
        if (!pad) throw std::invalid_argument("gamepad controller expects gamepad frames");
        return gamepad_command(*pad, cfg_.limits, cfg_.gamepad);
    }

    const auto* hands = std::get_if<HandFrame>(&frame);
    if (!hands) throw std::invalid_argument("hand controller expects hand frames");

    LocomotionCommand cmd;
    switch (iface_) {
    case Interface::FingerDistance:
        if (hands->right.tracked) {
            speed_kmh_ = finger_distance_speed(hands->right, cfg_.finger_distance, cfg_.limits);
            last_speed_time_ = now;
        }
        cmd.speed_kmh = held_speed(now);
        break;
    case Interface::FingerNumber:
        if (hands->left.tracked && hands->right.tracked) {
            speed_kmh_ = finger_number_speed(*hands, *model_, cfg_.limits);
            last_speed_time_ = now;
        }
        cmd.speed_kmh = held_speed(now);
        break;
    case Interface::FingerTapping:
        cmd.speed_kmh = tapping_.step(hands->right, now);
        break;
    case Interface::Gamepad:
        break;
    }
    cmd.steering_deg = steering_angle(hands->left, steering_, cfg_.steering, now, cfg_.tracking_loss_hold_s);
    return cmd;
}

} // namespace loco
