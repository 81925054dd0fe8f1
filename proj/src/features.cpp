#include "loco/features.hpp"

#include <algorithm>
#include <stdexcept>

namespace loco {

HandFeatures extract_hand_features(const TrackedHand& hand) {
    if (!hand.tracked) throw std::invalid_argument("cannot extract features from an untracked hand");
    const Vec3& n = hand.palm_normal;
    const Vec3& h = hand.pointing_dir;
    const Vec3 lateral = cross(n, h);

    HandFeatures out{};
    for (std::size_t i = 0; i < kFingerCount; ++i) {
        const Vec3 rel = hand.fingertips[i] - hand.palm_centre;
        out[3 * i + 0] = dot(rel, lateral);
        out[3 * i + 1] = dot(rel, h);
        out[3 * i + 2] = dot(rel, n);
    }
    return out;
}

FeatureVector stack_features(const TrackedHand& left, const TrackedHand& right) {
    const HandFeatures l = extract_hand_features(left);
    const HandFeatures r = extract_hand_features(right);
    FeatureVector p{};
    std::copy(l.begin(), l.end(), p.begin());
    std::copy(r.begin(), r.end(), p.begin() + kHandFeatureCount);
    return p;
}

} // namespace loco
