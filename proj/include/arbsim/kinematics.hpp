#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "arbsim/errors.hpp"
#include "arbsim/geometry.hpp"
#include "arbsim/random.hpp"

namespace arbsim {

/// Single-track (bicycle) vehicle state. No reverse: v >= 0.
struct KinematicState {
    double x = 0.0;        // m
    double y = 0.0;        // m
    double heading = 0.0;  // rad, in [-pi, pi)
    double speed = 0.0;    // m/s
    double wheelbase = 2.5;

    Vec2 position() const { return {x, y}; }
};

struct ControlInput {
    double steer = 0.0;  // rad, front wheel angle
    double accel = 0.0;  // m/s^2
};

struct ControlBounds {
    double steer_rate_min = -0.2;  // rad/s
    double steer_rate_max = 0.2;
    double speed_min = 0.0;  // m/s, sampled target speeds
    double speed_max = 15.0;
    double max_steer = 0.5;  // rad
    double max_accel = 4.0;  // m/s^2
};

/// Advance one step under constant controls. The update is the exact arc of
/// the no-slip single-track model: turn radius R = L / tan(steer), heading
/// advances by (arc length)/R. Speed is clamped at zero (no reverse) and the
/// travelled distance accounts for stopping mid-step.
inline KinematicState step_single_track(const KinematicState& s, const ControlInput& u, double dt) {
    if (dt <= 0.0) throw InvalidStepError(dt);

    KinematicState next = s;
    const double v_end = s.speed + u.accel * dt;
    double dist;
    if (v_end >= 0.0) {
        dist = s.speed * dt + 0.5 * u.accel * dt * dt;
        next.speed = v_end;
    } else {
        // stops within the step
        dist = u.accel < 0.0 ? -(s.speed * s.speed) / (2.0 * u.accel) : 0.0;
        next.speed = 0.0;
    }

    const double tan_steer = std::tan(u.steer);
    if (std::abs(tan_steer) < 1e-9) {
        next.x += dist * std::cos(s.heading);
        next.y += dist * std::sin(s.heading);
    } else {
        const double radius = s.wheelbase / tan_steer;
        const double dtheta = dist / radius;
        next.x += radius * (std::sin(s.heading + dtheta) - std::sin(s.heading));
        next.y += radius * (std::cos(s.heading) - std::cos(s.heading + dtheta));
        next.heading = wrap_angle(s.heading + dtheta);
    }
    return next;
}

/// How sampled target speeds vary along a sequence.
enum class SpeedSampling { PerEpisode, PerStep };

/// Per-step controls for a sampled traffic participant. Steering angles are
/// the integral of uniformly sampled steering rates, clipped to max_steer;
/// target speeds are uniform in [speed_min, speed_max].
struct ControlSequence {
    std::vector<double> steer_angle;  // rad
    std::vector<double> steer_rate;   // rad/s, the raw samples
    std::vector<double> target_speed; // m/s
    double dt = 0.1;

    std::size_t size() const { return steer_angle.size(); }
};

inline ControlSequence sample_controls(RandomSource& rng, const ControlBounds& bounds,
                                       std::size_t n, double dt = 0.1,
                                       SpeedSampling mode = SpeedSampling::PerEpisode) {
    ControlSequence seq;
    seq.dt = dt;
    seq.steer_angle.reserve(n);
    seq.steer_rate.reserve(n);
    seq.target_speed.reserve(n);

    double steer = 0.0;
    const double episode_speed = rng.uniform(bounds.speed_min, bounds.speed_max);
    for (std::size_t i = 0; i < n; ++i) {
        const double rate = rng.uniform(bounds.steer_rate_min, bounds.steer_rate_max);
        steer = std::clamp(steer + rate * dt, -bounds.max_steer, bounds.max_steer);
        seq.steer_rate.push_back(rate);
        seq.steer_angle.push_back(steer);
        seq.target_speed.push_back(mode == SpeedSampling::PerEpisode
                                       ? episode_speed
                                       : rng.uniform(bounds.speed_min, bounds.speed_max));
    }
    return seq;
}

/// Control at step i of a sequence, tracking the sampled target speed.
inline ControlInput control_at(const ControlSequence& seq, std::size_t i, double current_speed,
                               const ControlBounds& bounds) {
    if (seq.size() == 0) return {};
    const std::size_t j = std::min(i, seq.size() - 1);
    const double accel = std::clamp((seq.target_speed[j] - current_speed) / seq.dt,
                                    -bounds.max_accel, bounds.max_accel);
    return {seq.steer_angle[j], accel};
}

}  // namespace arbsim
