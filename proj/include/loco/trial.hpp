#pragma once

#include "loco/config.hpp"
#include "loco/trial_record.hpp"

#include <memory>
#include <span>
#include <vector>

namespace loco {

/// Fixed-timestep closed loop for one trial. Each tick k (t = k * dt):
/// an input frame stamped t is fed to the controller, the row for t is
/// recorded, and unless the trial is over the avatar, ball and gates advance
/// to t + dt. The frame source is either a Pilot or a recorded log.
class TrialEngine {
public:
    TrialEngine(const ScenarioConfig& cfg, Interface iface, std::uint64_t seed,
                std::shared_ptr<const svm::ClassifierModel> model = nullptr);

    double time() const { return static_cast<double>(tick_) * cfg_.sim.dt_s; }
    std::int64_t tick() const { return tick_; }
    bool done() const { return done_; }
    Observation observation() const;

    const PursuitScenario& pursuit() const { return pursuit_; }
    const WaypointsScenario& waypoints() const { return waypoints_; }

    /// Throws std::invalid_argument if the frame time is not the current tick time.
    void feed(const InputFrame& frame);

    /// Hands over the record; `completed` is false if the trial did not reach
    /// its natural end.
    TrialRecord take_record();

private:
    bool terminal() const;

    ScenarioConfig cfg_;
    Interface iface_;
    LocomotionController controller_;
    PursuitScenario pursuit_;
    WaypointsScenario waypoints_;
    GateTracker gates_;
    AvatarState avatar_{};
    BallState ball_{};
    std::vector<GateEvent> pending_;
    std::int64_t tick_ = 0;
    std::int64_t last_tick_ = 0;
    bool finished_ = false;
    bool done_ = false;
    TrialRecord record_;
};

/// Runs a full closed-loop trial with a synthetic pilot. If `inputs` is given
/// it receives every frame the pilot produced, in order.
TrialRecord run_trial(const ScenarioConfig& cfg, Interface iface, const PilotConfig& pilot, std::uint64_t seed,
                      std::shared_ptr<const svm::ClassifierModel> model = nullptr,
                      std::vector<InputFrame>* inputs = nullptr);

struct ReplayResult {
    TrialRecord record;
    bool truncated = false;  ///< log ended before the trial did
};

/// Drives the controller from recorded frames instead of a pilot. Frame k
/// must be stamped k * dt. Throws std::invalid_argument on an empty log or a
/// timestamp mismatch.
ReplayResult replay_trial(const ScenarioConfig& cfg, Interface iface, std::span<const InputFrame> frames,
                          std::uint64_t seed, std::shared_ptr<const svm::ClassifierModel> model = nullptr);

} // namespace loco
