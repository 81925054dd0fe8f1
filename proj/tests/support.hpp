#pragma once

// Shared helpers for the test binaries: random valid inputs, rigid motions,
// and small reference computations written independently of the library.

#include "loco/hand.hpp"
#include "loco/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

namespace testing {

using loco::Rng;
using loco::Vec3;

inline bool close_rel(double a, double b, double rel = 1e-9, double abs_floor = 1e-12) {
    return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

inline Vec3 random_vec(Rng& rng, double lo, double hi) {
    return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

inline Vec3 random_unit(Rng& rng) {
    while (true) {
        Vec3 v = random_vec(rng, -1.0, 1.0);
        const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
        if (n > 0.1 && n <= 1.0) return v * (1.0 / n);
    }
}

/// A tracked hand with orthonormal N, H and arbitrary fingertips and velocities.
inline loco::TrackedHand random_hand(Rng& rng) {
    loco::TrackedHand h;
    h.tracked = true;
    h.palm_centre = random_vec(rng, -0.5, 0.5);
    h.palm_normal = random_unit(rng);
    Vec3 other = random_unit(rng);
    Vec3 perp = loco::cross(h.palm_normal, other);
    while (loco::norm(perp) < 0.1) {
        other = random_unit(rng);
        perp = loco::cross(h.palm_normal, other);
    }
    h.pointing_dir = loco::normalized(perp);
    for (std::size_t i = 0; i < loco::kFingerCount; ++i) {
        h.fingertips[i] = h.palm_centre + random_vec(rng, -0.1, 0.1);
        h.fingertip_velocities[i] = random_vec(rng, -1.0, 1.0);
    }
    return h;
}

/// Row-major 3x3 rotation from a random unit quaternion.
struct Rotation {
    std::array<double, 9> m{};

    Vec3 operator()(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }
};

inline Rotation random_rotation(Rng& rng) {
    double q[4];
    double n = 0.0;
    do {
        n = 0.0;
        for (double& c : q) {
            c = rng.normal();
            n += c * c;
        }
    } while (n < 1e-6);
    n = std::sqrt(n);
    const double w = q[0] / n, x = q[1] / n, y = q[2] / n, z = q[3] / n;
    return {{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),
             2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
             2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}};
}

/// Ranks with ties averaged.
inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    return pearson(ranks(a), ranks(b));
}

struct MeanSem {
    double mean = 0.0;
    double sem = 0.0;
};

inline MeanSem mean_sem(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return {m, v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0};
}

} // namespace testing
