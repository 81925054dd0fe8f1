#include "loco/trial.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace loco {

TrialEngine::TrialEngine(const ScenarioConfig& cfg, Interface iface, std::uint64_t seed,
                         std::shared_ptr<const svm::ClassifierModel> model)
    : cfg_(cfg),
      iface_(iface),
      controller_(iface, cfg.controller, std::move(model)),
      gates_(0) {
    avatar_.capsule_radius_m = cfg.sim.capsule_radius_m;
    avatar_.capsule_height_m = cfg.sim.capsule_height_m;

    record_.scenario = cfg.scenario;
    record_.interface = std::string(to_string(iface));
    record_.seed = seed;
    record_.dt_s = cfg.sim.dt_s;

    if (cfg.scenario == ScenarioType::Pursuit) {
        pursuit_ = make_pursuit_scenario(cfg.pursuit, seed);
        ball_ = initial_ball(pursuit_);
        last_tick_ = std::llround(cfg.pursuit.duration_s / cfg.sim.dt_s);
        record_.keyframe_period_s = cfg.pursuit.keyframe_period_s;
        record_.keyframes_kmh = pursuit_.keyframes_kmh;
        record_.initial_gap_m = cfg.pursuit.initial_gap_m;
    } else {
        waypoints_ = make_waypoints_scenario(cfg.waypoints, seed);
        gates_ = GateTracker(waypoints_.gates.size());
        avatar_.position = waypoints_.start;
        last_tick_ = std::llround(cfg.sim.max_duration_s / cfg.sim.dt_s);
        record_.start = waypoints_.start;
        record_.gates = waypoints_.gates;
        record_.finish_z = waypoints_.finish_z;
    }
}

Observation TrialEngine::observation() const { return {time(), avatar_, ball_}; }

bool TrialEngine::terminal() const { return finished_ || tick_ >= last_tick_; }

void TrialEngine::feed(const InputFrame& frame) {
    if (done_) throw std::logic_error("trial is already over");
    const double t = time();
    if (std::abs(frame_time(frame) - t) > 1e-6)
        throw std::invalid_argument(
            fmt::format("input frame at t={} does not match simulation tick t={}", frame_time(frame), t));

    const LocomotionCommand cmd = controller_.step(frame);

    TrialRow row;
    row.tick = tick_;
    row.time_s = t;
    row.avatar_position = avatar_.position;
    row.heading_deg = avatar_.heading_deg;
    row.speed_mps = avatar_.speed_mps;
    row.command = cmd;
    row.events = std::move(pending_);
    pending_.clear();
    if (cfg_.scenario == ScenarioType::Pursuit) {
        row.ball_position = ball_.position;
        row.ball_speed_mps = ball_.speed_mps;
        row.ball_target_kmh = ball_target_kmh(pursuit_, t);
    }
    record_.rows.push_back(std::move(row));

    if (terminal()) {
        done_ = true;
        return;
    }

    const double dt = cfg_.sim.dt_s;
    LocomotionCommand applied = cmd;
    if (cfg_.scenario == ScenarioType::Pursuit) {
        applied.steering_deg = 0.0;  // direction control is disabled for pursuit
        ball_ = step_ball(ball_, pursuit_, t, dt);
    }
    const AvatarState next = step_avatar(avatar_, applied, cfg_.controller.limits, cfg_.sim, dt);
    if (cfg_.scenario == ScenarioType::Waypoints) {
        pending_ = gate_events(avatar_.position, next.position, waypoints_, cfg_.sim, gates_);
        if (next.position.z <= waypoints_.finish_z) {
            finished_ = true;
            for (const auto& e : resolve_remaining(gates_)) pending_.push_back(e);
        }
    }
    avatar_ = next;
    ++tick_;
}

TrialRecord TrialEngine::take_record() {
    record_.completed = done_ && (cfg_.scenario == ScenarioType::Pursuit || finished_);
    return std::move(record_);
}

TrialRecord run_trial(const ScenarioConfig& cfg, Interface iface, const PilotConfig& pilot_cfg, std::uint64_t seed,
                      std::shared_ptr<const svm::ClassifierModel> model, std::vector<InputFrame>* inputs) {
    TrialEngine engine(cfg, iface, seed, std::move(model));
    std::vector<Gate> path;
    if (cfg.scenario == ScenarioType::Waypoints) path = optimal_path(engine.waypoints());
    Pilot pilot(iface, cfg.scenario, pilot_cfg, cfg.controller, cfg.sim, seed, std::move(path), cfg.pursuit.initial_gap_m);
    while (!engine.done()) {
        InputFrame frame = pilot.act(engine.observation());
        if (inputs) inputs->push_back(frame);
        engine.feed(frame);
    }
    return engine.take_record();
}

ReplayResult replay_trial(const ScenarioConfig& cfg, Interface iface, std::span<const InputFrame> frames,
                          std::uint64_t seed, std::shared_ptr<const svm::ClassifierModel> model) {
    if (frames.empty()) throw std::invalid_argument("replay log is empty");
    TrialEngine engine(cfg, iface, seed, std::move(model));
    std::size_t i = 0;
    while (!engine.done() && i < frames.size()) engine.feed(frames[i++]);
    ReplayResult out;
    out.truncated = !engine.done();
    out.record = engine.take_record();
    return out;
}

} // namespace loco
