#pragma once

#include "loco/hand.hpp"

#include <array>
#include <cstddef>

namespace loco {

inline constexpr std::size_t kHandFeatureCount = 3 * kFingerCount;       // 15
inline constexpr std::size_t kFeatureCount = 2 * kHandFeatureCount;      // 30

using HandFeatures = std::array<double, kHandFeatureCount>;

/// Stacked two-hand descriptor: left hand's 15 values, then the right hand's.
using FeatureVector = std::array<double, kFeatureCount>;

/// Fingertip offsets from the palm centre expressed in the hand's own frame
/// (lateral N x H, pointing H, normal N), thumb to pinky, three values each.
/// Invariant under rigid motion of the whole hand.
/// Throws std::invalid_argument for an untracked hand.
HandFeatures extract_hand_features(const TrackedHand& hand);

/// Throws std::invalid_argument if either hand is untracked.
FeatureVector stack_features(const TrackedHand& left, const TrackedHand& right);

} // namespace loco
