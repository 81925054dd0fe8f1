#include "loco/hand.hpp"

#include <algorithm>
#include <cmath>

namespace loco {

TrackedHand TrackedHand::untracked() {
    TrackedHand h;
    h.palm_normal = {};
    h.pointing_dir = {};
    h.tracked = false;
    return h;
}

std::string validate(const TrackedHand& hand) {
    for (const auto& p : hand.fingertips)
        if (!is_finite(p)) return "non-finite fingertip";
    for (const auto& v : hand.fingertip_velocities)
        if (!is_finite(v)) return "non-finite fingertip velocity";
    if (!is_finite(hand.palm_centre) || !is_finite(hand.palm_normal) || !is_finite(hand.pointing_dir))
        return "non-finite palm geometry";
    if (!hand.tracked) return {};
    if (std::abs(norm(hand.palm_normal) - 1.0) > 1e-6) return "palm normal is not unit length";
    if (std::abs(norm(hand.pointing_dir) - 1.0) > 1e-6) return "pointing direction is not unit length";
    return {};
}

GamepadFrame clamped(GamepadFrame frame) {
    frame.left_x = std::clamp(frame.left_x, -1.0, 1.0);
    frame.right_y = std::clamp(frame.right_y, 0.0, 1.0);
    return frame;
}

} // namespace loco
