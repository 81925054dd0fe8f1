#pragma once

#include "loco/trial_record.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace loco {

struct PursuitMetrics {
    double d_avg = 0.0;  ///< m, mean avatar-ball distance
    double d_std = 0.0;  ///< m, population std of that distance
    double s_avg = 0.0;  ///< km/h, mean |avatar speed - ball speed|
    double s_std = 0.0;  ///< km/h, population std of that difference
    double s_inst = 0.0; ///< km/h, mean difference in the 0.1 s after each keyframe change
};

struct WaypointMetrics {
    double t_c = 0.0;  ///< s, start to finish trigger
    double s_l = 0.0;  ///< m/s, path length / t_c
    double d_p = 0.0;  ///< m, mean |lateral offset| from the gate-centre polyline
    int n_w = 0;       ///< gates passed
    int n_c = 0;       ///< collision episodes
};

inline constexpr double kKeyframeWindowS = 0.1;

/// Throws std::invalid_argument for a waypoints record or one without rows.
PursuitMetrics pursuit_metrics(const TrialRecord& record);

/// Throws std::invalid_argument for a pursuit record or one without rows.
WaypointMetrics waypoint_metrics(const TrialRecord& record);

/// x of the polyline at depth z (vertices are monotone in z); clamps past the ends.
double polyline_x_at(std::span<const Gate> path, double z);

struct Summary {
    double mean = 0.0;
    double sem = 0.0;  ///< sample std / sqrt(n); 0 for n == 1
    std::size_t n = 0;
};

/// Throws std::invalid_argument on empty input.
Summary summarize(std::span<const double> values);

/// Field-wise mean and standard error over rows of named values. Every row
/// must carry the same field names.
std::map<std::string, Summary> aggregate(std::span<const std::map<std::string, double>> rows);

std::map<std::string, double> to_fields(const PursuitMetrics& m);
std::map<std::string, double> to_fields(const WaypointMetrics& m);

} // namespace loco
