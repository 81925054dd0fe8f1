#pragma once

#include "loco/geometry.hpp"

#include <array>
#include <cstddef>
#include <string>

namespace loco {

enum Finger : std::size_t { kThumb = 0, kIndex = 1, kMiddle = 2, kRing = 3, kPinky = 4 };
inline constexpr std::size_t kFingerCount = 5;

/// One tracked hand as reported by a hand-tracking sensor.
struct TrackedHand {
    std::array<Vec3, kFingerCount> fingertips{};       ///< thumb, index, middle, ring, pinky
    Vec3 palm_centre{};                                ///< C
    Vec3 palm_normal{0.0, -1.0, 0.0};                  ///< N, unit
    Vec3 pointing_dir{0.0, 0.0, -1.0};                 ///< H, unit
    std::array<Vec3, kFingerCount> fingertip_velocities{};  ///< m/s
    bool tracked = false;

    /// Untracked hand with all geometry zeroed (the log convention).
    static TrackedHand untracked();

    friend bool operator==(const TrackedHand&, const TrackedHand&) = default;
};

struct HandFrame {
    double timestamp = 0.0;  ///< seconds, strictly increasing within a stream
    TrackedHand left{};
    TrackedHand right{};

    friend bool operator==(const HandFrame&, const HandFrame&) = default;
};

struct GamepadFrame {
    double timestamp = 0.0;
    double left_x = 0.0;   ///< steering axis, [-1, 1]
    double right_y = 0.0;  ///< speed axis, [0, 1]; backwards is disabled

    friend bool operator==(const GamepadFrame&, const GamepadFrame&) = default;
};

/// Returns an empty string when the hand satisfies its invariants,
/// otherwise a description of the first violation.
std::string validate(const TrackedHand& hand);

/// Clamps both axes into their documented ranges.
GamepadFrame clamped(GamepadFrame frame);

} // namespace loco
