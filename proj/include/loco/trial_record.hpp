#pragma once

#include "loco/gestures.hpp"
#include "loco/sim.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace loco {

struct TrialRow {
    std::int64_t tick = 0;
    double time_s = 0.0;
    Vec3 avatar_position{};
    double heading_deg = 0.0;
    double speed_mps = 0.0;
    LocomotionCommand command{};
    Vec3 ball_position{};       ///< pursuit only
    double ball_speed_mps = 0.0;
    double ball_target_kmh = 0.0;
    std::vector<GateEvent> events;  ///< waypoints only; events of the motion that ended at this row

    friend bool operator==(const TrialRow&, const TrialRow&) = default;
};

/// Everything recorded about one trial: enough scenario description to
/// recompute every metric without the original configuration.
struct TrialRecord {
    ScenarioType scenario = ScenarioType::Pursuit;
    std::string interface;
    std::string pilot;          ///< profile label, informational
    std::string scenario_name;  ///< scenario file stem, informational
    std::uint64_t seed = 0;
    double dt_s = 0.01;
    bool completed = true;

    // pursuit
    double keyframe_period_s = 10.0;
    std::vector<double> keyframes_kmh;
    double initial_gap_m = 3.0;

    // waypoints
    Vec3 start{};
    std::vector<Gate> gates;
    double finish_z = 0.0;

    std::vector<TrialRow> rows;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// CSV with '#'-prefixed header lines describing the trial, a column header
/// naming units, then one row per tick.
void write_trial_record(std::ostream& out, const TrialRecord& record);
std::string write_trial_record(const TrialRecord& record);

/// Throws ParseError with the offending line number.
TrialRecord read_trial_record(std::istream& in);
TrialRecord read_trial_record_file(const std::string& path);

} // namespace loco
