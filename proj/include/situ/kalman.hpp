// Copyright 2026 The Situ Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SITU__KALMAN_HPP_
#define SITU__KALMAN_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>

#include "situ/errors.hpp"
#include "situ/scene.hpp"

namespace situ
{

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

/// One object in the driver's belief. `state` is [s, lateral, v_s, v_lateral]
/// in the road plane.
struct BeliefObject
{
  std::string id;
  Vec4 state{Vec4::Zero()};
  Mat4 covariance{Mat4::Zero()};
  LaneId believed_lane{-1};
  Vec3 dimension{4.5, 1.8, 1.5};
  Timepoint last_fixation_tick;
  std::int64_t last_fixation_duration{0};  // ms

  double s() const { return state(0); }
  double lateral() const { return state(1); }
  double length() const { return dimension.x(); }

  bool operator==(const BeliefObject & o) const
  {
    return id == o.id && state == o.state && covariance == o.covariance &&
           believed_lane == o.believed_lane && dimension == o.dimension &&
           last_fixation_tick == o.last_fixation_tick &&
           last_fixation_duration == o.last_fixation_duration;
  }
};

struct TrackerParams
{
  double fixation_threshold{0.5};
  double dt{1.0 / 30.0};
  double process_noise{0.1};     // (m/s^2)^2
  double meas_noise_pos{0.5};    // m
  double meas_noise_vel{0.2};    // m/s
  std::optional<double> eviction_ttl;  // s

  void validate() const
  {
    if (!(fixation_threshold > 0.0 && fixation_threshold < 1.0)) {
      throw Error("fixation_threshold must lie in (0,1)");
    }
    if (!(dt > 0.0)) {
      throw Error("dt must be positive");
    }
    if (!(meas_noise_pos > 0.0) || !(meas_noise_vel > 0.0)) {
      throw Error("measurement noise must be positive");
    }
    if (process_noise < 0.0) {
      throw Error("process noise must be non-negative");
    }
  }
};

inline Mat4 constant_velocity_transition(double dt)
{
  Mat4 f = Mat4::Identity();
  f(0, 2) = dt;
  f(1, 3) = dt;
  return f;
}

/// Discrete white-noise acceleration, applied independently per axis.
inline Mat4 process_noise_matrix(double q, double dt)
{
  const double dt2 = dt * dt;
  const double pp = q * dt2 * dt2 / 4.0;
  const double pv = q * dt2 * dt / 2.0;
  const double vv = q * dt2;
  Mat4 m = Mat4::Zero();
  m(0, 0) = pp;
  m(1, 1) = pp;
  m(0, 2) = m(2, 0) = pv;
  m(1, 3) = m(3, 1) = pv;
  m(2, 2) = vv;
  m(3, 3) = vv;
  return m;
}

inline Mat4 measurement_noise(const TrackerParams & params)
{
  const double p2 = params.meas_noise_pos * params.meas_noise_pos;
  const double v2 = params.meas_noise_vel * params.meas_noise_vel;
  return Vec4(p2, p2, v2, v2).asDiagonal();
}

/// Sensed position and velocity projected into the road plane.
inline Vec4 measurement_of(const TrafficVehicle & observed, const RoadFrame & road)
{
  const Vec3 left = road.left();
  return {longitudinal_coordinate(observed.position, road), lateral_coordinate(observed.position, road),
    observed.velocity.dot(road.heading), observed.velocity.dot(left)};
}

inline BeliefObject kalman_predict(const BeliefObject & obj, double dt, double q, double lane_width)
{
  if (!(dt > 0.0)) {
    throw NumericError("kalman_predict: dt must be positive");
  }
  if (!obj.state.allFinite() || !obj.covariance.allFinite()) {
    throw NumericError("kalman_predict: non-finite state for '" + obj.id + "'");
  }
  const Mat4 f = constant_velocity_transition(dt);
  BeliefObject out = obj;
  // Written out so that constant-velocity targets are propagated exactly.
  out.state(0) = obj.state(0) + obj.state(2) * dt;
  out.state(1) = obj.state(1) + obj.state(3) * dt;
  out.covariance = f * obj.covariance * f.transpose() + process_noise_matrix(q, dt);
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  out.believed_lane = lane_at_lateral(out.state(1), lane_width);
  return out;
}

inline BeliefObject kalman_update(
  const BeliefObject & obj, const TrafficVehicle & observed, const RoadFrame & road,
  const TrackerParams & params)
{
  if (observed.id != obj.id) {
    throw Error("kalman_update: observation '" + observed.id + "' does not match '" + obj.id + "'");
  }
  const Vec4 z = measurement_of(observed, road);
  const Mat4 r = measurement_noise(params);
  const Mat4 innovation_cov = obj.covariance + r;
  if (!z.allFinite() || !innovation_cov.allFinite()) {
    throw NumericError("kalman_update: non-finite measurement or covariance for '" + obj.id + "'");
  }
  const Eigen::FullPivLU<Mat4> lu(innovation_cov);
  if (!lu.isInvertible()) {
    throw NumericError("kalman_update: singular innovation covariance for '" + obj.id + "'");
  }
  const Mat4 gain = obj.covariance * lu.inverse();
  const Mat4 i_minus_k = Mat4::Identity() - gain;

  BeliefObject out = obj;
  out.state = obj.state + gain * (z - obj.state);
  // Joseph form keeps the posterior symmetric positive semidefinite.
  out.covariance = i_minus_k * obj.covariance * i_minus_k.transpose() + gain * r * gain.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  out.believed_lane = observed.lane;
  return out;
}

}  // namespace situ

#endif  // SITU__KALMAN_HPP_
