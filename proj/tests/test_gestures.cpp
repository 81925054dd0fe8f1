#include "loco/gestures.hpp"
#include "loco/pilot.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace loco;

namespace {

// Direct evaluation of the two linear speed laws, independent of the library.
double distance_law(double l, double r, double d, double lo, double hi) {
    if (l <= d) return 0.0;
    if (l > r) return hi;
    return (l - d) / (r - d) * (hi - lo) + lo;
}

double tapping_law(double t, double t_min, double t_max, double lo, double hi) {
    if (t <= t_min) return hi;
    if (t > t_max) return lo;
    return (t_max - t) / (t_max - t_min) * (hi - lo) + lo;
}

TrackedHand pinch_hand(double l) {
    TrackedHand h;
    h.tracked = true;
    h.palm_normal = {0, -1, 0};
    h.pointing_dir = {0, 0, -1};
    h.fingertips[kThumb] = {0.01, 0.02, -0.03};
    h.fingertips[kIndex] = h.fingertips[kThumb] + Vec3{0.6, 0.0, -0.8} * l;
    return h;
}

TrackedHand pointing_hand(const Vec3& dir) {
    TrackedHand h;
    h.tracked = true;
    h.palm_normal = {0, -1, 0};
    h.pointing_dir = dir;
    return h;
}

HandFrame frame(double t, const TrackedHand& left, const TrackedHand& right) {
    HandFrame f;
    f.timestamp = t;
    f.left = left;
    f.right = right;
    return f;
}

} // namespace

TEST_CASE("finger distance speed at the boundaries and midpoint") {
    const FingerDistanceConfig cfg;
    const SpeedLimits lim;
    CHECK(finger_distance_speed(0.08, cfg, lim) == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(finger_distance_speed(0.025, cfg, lim) == 0.0);
    CHECK(finger_distance_speed(0.0525, cfg, lim) == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(finger_distance_speed(0.0, cfg, lim) == 0.0);
    CHECK(finger_distance_speed(0.3, cfg, lim) == 5.0);
    CHECK(finger_distance_speed(pinch_hand(0.0525), cfg, lim) == doctest::Approx(2.5).epsilon(1e-9));
    CHECK_THROWS_AS(finger_distance_speed(TrackedHand::untracked(), cfg, lim), std::invalid_argument);
}

TEST_CASE("finger distance follows the linear law and is monotone") {
    const FingerDistanceConfig cfg;
    const SpeedLimits lim;
    testing::Rng rng(1, 0);
    for (int i = 0; i < 2000; ++i) {
        const double a = rng.uniform(0.0, 0.12);
        const double b = rng.uniform(0.0, 0.12);
        const double sa = finger_distance_speed(a, cfg, lim);
        CHECK(testing::close_rel(sa, distance_law(a, 0.08, 0.025, 0.0, 5.0)));
        const double l1 = std::min(a, b), l2 = std::max(a, b);
        if (l1 > cfg.dead_zone_m && l2 <= cfg.reference_m && l1 < l2)
            CHECK(finger_distance_speed(l1, cfg, lim) < finger_distance_speed(l2, cfg, lim));
    }
}

TEST_CASE("tap interval mapping") {
    const FingerTappingConfig cfg;
    const SpeedLimits lim;
    CHECK(tapping_speed(0.3, cfg, lim) == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(tapping_speed(0.95, cfg, lim) == doctest::Approx(0.0));
    CHECK(std::abs(tapping_speed(0.95, cfg, lim)) <= 1e-12);
    CHECK(tapping_speed(0.625, cfg, lim) == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(tapping_speed(0.1, cfg, lim) == 5.0);
    CHECK(tapping_speed(1.2, cfg, lim) == 0.0);
    testing::Rng rng(2, 0);
    for (int i = 0; i < 2000; ++i) {
        const double a = rng.uniform(0.0, 1.5);
        CHECK(testing::close_rel(tapping_speed(a, cfg, lim), tapping_law(a, 0.3, 0.95, 0.0, 5.0), 1e-9, 1e-12));
        const double b = rng.uniform(0.3001, 0.95);
        const double c = rng.uniform(0.3001, 0.95);
        if (b < c) CHECK(tapping_speed(b, cfg, lim) > tapping_speed(c, cfg, lim));
    }
}

TEST_CASE("raw steering angle examples") {
    const SteeringConfig cfg;
    CHECK(*raw_steering_angle({0, 0, -1}, cfg) == 0.0);
    CHECK(*raw_steering_angle({-1, 0, 0}, cfg) == doctest::Approx(90.0).epsilon(1e-12));
    CHECK(*raw_steering_angle({1, 0, 0}, cfg) == doctest::Approx(-90.0).epsilon(1e-12));
    CHECK(std::abs(*raw_steering_angle({0, 0, 1}, cfg)) == doctest::Approx(180.0));
    CHECK_FALSE(raw_steering_angle({0, 1, 0}, cfg).has_value());
}

TEST_CASE("raw steering matches atan2 and is antisymmetric") {
    const SteeringConfig cfg;
    testing::Rng rng(3, 0);
    for (int i = 0; i < 2000; ++i) {
        const double yaw = rng.uniform(-179.0, 179.0);
        const double pitch = rng.uniform(-80.0, 80.0);
        const double yr = yaw * M_PI / 180.0, pr = pitch * M_PI / 180.0;
        // yaw toward -x is positive; pitch must not change the angle
        const Vec3 dir{-std::sin(yr) * std::cos(pr), std::sin(pr), -std::cos(yr) * std::cos(pr)};
        const double got = *raw_steering_angle(dir, cfg);
        CHECK(got == doctest::Approx(yaw).epsilon(1e-9));
        const Vec3 mirrored{-dir.x, dir.y, dir.z};
        CHECK(*raw_steering_angle(mirrored, cfg) == -got);
    }
}

TEST_CASE("smooth damp follows the documented recurrence") {
    testing::Rng rng(4, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const double target = rng.uniform(-90.0, 90.0);
        const double st = rng.uniform(0.05, 1.0);
        const double dt = 0.01;
        double cur = rng.uniform(-90.0, 90.0), vel = 0.0;
        double ref = cur, ref_vel = 0.0;
        for (int k = 0; k < 300; ++k) {
            cur = smooth_damp(cur, target, vel, st, dt);
            const double omega = 2.0 / st;
            const double x = omega * dt;
            const double decay = 1.0 / (1.0 + x + 0.48 * x * x + 0.235 * x * x * x);
            const double change = ref - target;
            const double temp = (ref_vel + omega * change) * dt;
            ref_vel = (ref_vel - omega * temp) * decay;
            double out = target + (change + temp) * decay;
            if ((target - ref > 0.0) == (out > target)) {
                out = target;
                ref_vel = 0.0;
            }
            ref = out;
            CHECK(std::abs(cur - ref) <= 1e-9);
        }
    }
}

TEST_CASE("smoothing converges monotonically") {
    const SteeringConfig cfg;
    SteeringState s;
    const TrackedHand left = pointing_hand(normalized({-1, 0, -1}));  // raw 45 deg
    double prev_err = 1e9;
    double t = 0.0;
    for (int k = 0; k <= 100; ++k, t += 0.01) {
        const double a = steering_angle(left, s, cfg, t, 0.25);
        const double err = std::abs(a - 45.0);
        CHECK(err <= prev_err);
        prev_err = err;
    }
    // 5 * smooth_time = 1 s
    CHECK(prev_err <= 0.01 * 45.0);
}

TEST_CASE("steering holds through short tracking loss then returns to zero") {
    const SteeringConfig cfg;
    SteeringState s;
    const TrackedHand left = pointing_hand({-1, 0, 0});
    double t = 0.0;
    double a = 0.0;
    for (; t < 2.0; t += 0.01) a = steering_angle(left, s, cfg, t, 0.25);
    CHECK(a == doctest::Approx(90.0).epsilon(1e-3));
    const double held = a;
    for (double u = t; u < t + 0.2; u += 0.01) CHECK(steering_angle(TrackedHand::untracked(), s, cfg, u, 0.25) == held);
    double later = held;
    for (double u = t + 0.3; u < t + 3.0; u += 0.01) later = steering_angle(TrackedHand::untracked(), s, cfg, u, 0.25);
    CHECK(std::abs(later) < 1.0);
}

TEST_CASE("gamepad examples") {
    const SpeedLimits lim;
    const GamepadConfig cfg;
    auto cmd = gamepad_command({0.0, 0.0, 0.0}, lim, cfg);
    CHECK(cmd.speed_kmh == 0.0);
    CHECK(cmd.steering_deg == 0.0);
    cmd = gamepad_command({0.0, 0.0, 1.0}, lim, cfg);
    CHECK(cmd.speed_kmh == 5.0);
    CHECK(cmd.steering_deg == 0.0);
    cmd = gamepad_command({0.0, -1.0, 0.5}, lim, cfg);
    CHECK(cmd.speed_kmh == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(cmd.steering_deg == -cfg.max_steer_deg);
    cmd = gamepad_command({0.0, 0.04, 0.04}, lim, cfg);
    CHECK(cmd.speed_kmh == 0.0);
    CHECK(cmd.steering_deg == 0.0);
}

TEST_CASE("interface identifiers") {
    for (auto iface : {Interface::FingerDistance, Interface::FingerNumber, Interface::FingerTapping, Interface::Gamepad})
        CHECK(parse_interface(to_string(iface)) == iface);
    CHECK_FALSE(parse_interface("joystick").has_value());
}

TEST_CASE("constant neutral input gives constant stop commands") {
    const ControllerConfig cfg;
    LocomotionController pad(Interface::Gamepad, cfg);
    LocomotionController dist(Interface::FingerDistance, cfg);
    LocomotionController tap(Interface::FingerTapping, cfg);
    const PoseTemplate pose;
    for (int k = 0; k < 300; ++k) {
        const double t = 0.01 * k;
        CHECK(pad.step(GamepadFrame{t, 0.0, 0.0}) == LocomotionCommand{0.0, 0.0});
        const HandFrame f = frame(t, pose.hand(Side::Left, 5), pose.pinch(0.0));
        CHECK(dist.step(f) == LocomotionCommand{0.0, 0.0});
        CHECK(tap.step(frame(t, pose.hand(Side::Left, 5), pose.hand(Side::Right, 1))) == LocomotionCommand{0.0, 0.0});
    }
}

TEST_CASE("controllers reject wrong frame types and stale timestamps") {
    const ControllerConfig cfg;
    LocomotionController pad(Interface::Gamepad, cfg);
    CHECK_THROWS_AS(pad.step(HandFrame{}), std::invalid_argument);
    LocomotionController dist(Interface::FingerDistance, cfg);
    CHECK_THROWS_AS(dist.step(GamepadFrame{}), std::invalid_argument);
    dist.step(frame(1.0, TrackedHand::untracked(), TrackedHand::untracked()));
    CHECK_THROWS_AS(dist.step(frame(1.0, TrackedHand::untracked(), TrackedHand::untracked())), std::invalid_argument);
    CHECK_THROWS_AS(LocomotionController(Interface::FingerNumber, cfg), std::invalid_argument);
}

TEST_CASE("finger distance controller holds then stops on tracking loss") {
    const ControllerConfig cfg;
    LocomotionController c(Interface::FingerDistance, cfg);
    const PoseTemplate pose;
    double t = 0.0;
    for (; t < 1.0; t += 0.01) c.step(frame(t, pose.hand(Side::Left, 5), pose.pinch(0.0525)));
    const double last_tracked = t - 0.01;
    for (; t < 3.0; t += 0.01) {
        const auto cmd = c.step(frame(t, pose.hand(Side::Left, 5), TrackedHand::untracked()));
        if (t - last_tracked <= 0.25 - 1e-9)
            CHECK(cmd.speed_kmh == doctest::Approx(2.5).epsilon(1e-9));
        else if (t - last_tracked > 0.25 + 1e-9)
            CHECK(cmd.speed_kmh == 0.0);
    }
}

TEST_CASE("tapping controller measures the tap period") {
    const ControllerConfig cfg;
    const PoseTemplate pose;
    for (double period : {0.3, 0.4, 0.5, 0.625, 0.8, 0.9}) {
        LocomotionController c(Interface::FingerTapping, cfg);
        double speed = 0.0;
        for (int k = 0; k < 600; ++k) {
            const double t = 0.01 * k;
            TrackedHand right = pose.hand(Side::Right, 1);
            right.fingertip_velocities[kIndex].y = 0.4 * std::sin(2.0 * M_PI * t / period);
            speed = c.step(frame(t, pose.hand(Side::Left, 5), right)).speed_kmh;
        }
        // Peaks land on 10 ms samples, so the measured interval is within one sample.
        const double lo = tapping_law(period + 0.01, 0.3, 0.95, 0.0, 5.0);
        const double hi = tapping_law(period - 0.01, 0.3, 0.95, 0.0, 5.0);
        CHECK(speed >= lo - 1e-9);
        CHECK(speed <= hi + 1e-9);
    }
}

TEST_CASE("tapping speed decays once taps stop") {
    const ControllerConfig cfg;
    const PoseTemplate pose;
    LocomotionController c(Interface::FingerTapping, cfg);
    double t = 0.0;
    for (; t < 3.0; t += 0.01) {
        TrackedHand right = pose.hand(Side::Right, 1);
        right.fingertip_velocities[kIndex].y = 0.4 * std::sin(2.0 * M_PI * t / 0.4);
        c.step(frame(t, pose.hand(Side::Left, 5), right));
    }
    double speed = 1.0;
    for (; t < 5.0; t += 0.01) speed = c.step(frame(t, pose.hand(Side::Left, 5), pose.hand(Side::Right, 1))).speed_kmh;
    CHECK(speed == 0.0);
}

TEST_CASE("speed commands stay within limits for arbitrary input") {
    ControllerConfig cfg;
    cfg.limits.s_min_kmh = 0.5;
    cfg.limits.s_max_kmh = 4.0;
    testing::Rng rng(5, 0);
    LocomotionController dist(Interface::FingerDistance, cfg);
    LocomotionController tap(Interface::FingerTapping, cfg);
    LocomotionController pad(Interface::Gamepad, cfg);
    for (int k = 0; k < 5000; ++k) {
        const double t = 0.01 * k;
        const TrackedHand l = rng.uniform() < 0.1 ? TrackedHand::untracked() : testing::random_hand(rng);
        TrackedHand r = rng.uniform() < 0.1 ? TrackedHand::untracked() : testing::random_hand(rng);
        if (r.tracked) r.fingertip_velocities[kIndex].y = rng.uniform(-2.0, 2.0);
        for (auto* c : {&dist, &tap}) {
            const auto cmd = c->step(frame(t, l, r));
            CHECK(cmd.speed_kmh >= 0.5);
            CHECK(cmd.speed_kmh <= 4.0);
            CHECK(std::isfinite(cmd.steering_deg));
        }
        const auto p = pad.step(GamepadFrame{t, rng.uniform(-2.0, 2.0), rng.uniform(-1.0, 2.0)});
        CHECK(p.speed_kmh >= 0.5);
        CHECK(p.speed_kmh <= 4.0);
    }
}

TEST_CASE("controllers are deterministic") {
    const ControllerConfig cfg;
    testing::Rng rng(6, 0);
    std::vector<HandFrame> stream;
    for (int k = 0; k < 1000; ++k) {
        TrackedHand r = testing::random_hand(rng);
        r.fingertip_velocities[kIndex].y = 0.4 * std::sin(0.1 * k) + rng.normal(0.0, 0.05);
        stream.push_back(frame(0.01 * k, testing::random_hand(rng), r));
    }
    for (auto iface : {Interface::FingerDistance, Interface::FingerTapping}) {
        LocomotionController a(iface, cfg), b(iface, cfg);
        for (const auto& f : stream) CHECK(a.step(f) == b.step(f));
    }
}

TEST_CASE("finger number reads the class as speed") {
    const PoseDataset ds = generate_pose_dataset(60, 0.005, 21);
    std::vector<svm::LabeledSample> samples;
    for (std::size_t i = 0; i < ds.frames.size(); ++i)
        samples.push_back(svm::make_sample(stack_features(ds.frames[i].left, ds.frames[i].right), ds.labels[i]));
    const auto model = std::make_shared<const svm::ClassifierModel>(svm::train(samples, {}));
    const SpeedLimits lim;
    const PoseTemplate pose;
    CHECK(finger_number_speed(pose.pose(0), *model, lim) == 0.0);
    CHECK(finger_number_speed(pose.pose(5), *model, lim) == 5.0);
    testing::Rng rng(22, 0);
    int correct = 0;
    for (int i = 0; i < 100; ++i) correct += finger_number_speed(synthesize_pose(3, pose, 0.003, rng), *model, lim) == 3.0;
    CHECK(correct == 100);

    LocomotionController c(Interface::FingerNumber, ControllerConfig{}, model);
    CHECK(c.step(pose.pose(4, 0.0)).speed_kmh == 4.0);
    HandFrame lost = pose.pose(4, 0.01);
    lost.right = TrackedHand::untracked();
    CHECK(c.step(lost).speed_kmh == 4.0);
}
