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

#ifndef SITU__GAZE_HPP_
#define SITU__GAZE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>

#include "situ/scene.hpp"

namespace situ
{

struct GazeModelParams
{
  double tracker_accuracy{0.6};  // deg
  double spread{2.0};            // deg, Gaussian sigma
  double sample_rate{120.0};     // Hz

  void validate() const
  {
    if (!(tracker_accuracy >= 0.0)) {
      throw Error("gaze tracker_accuracy must be non-negative");
    }
    if (!(spread >= tracker_accuracy) || !(spread > 0.0)) {
      throw Error("gaze spread must be positive and at least the tracker accuracy");
    }
    if (!(sample_rate > 0.0)) {
      throw Error("gaze sample_rate must be positive");
    }
  }
};

inline constexpr double kFixatedProbability = 0.5;

/// Angle in degrees between the gaze ray and the eye-to-target direction.
inline double gaze_angle_deg(const Vec3 & gaze, const Vec3 & eye, const Vec3 & target)
{
  const double gn = gaze.norm();
  if (!(gn > 0.0) || !gaze.allFinite()) {
    throw InvalidGazeError("gaze vector must be finite and non-zero");
  }
  const Vec3 to_target = target - eye;
  const double tn = to_target.norm();
  if (!(tn > 0.0)) {
    return 0.0;
  }
  const double c = std::clamp(gaze.dot(to_target) / (gn * tn), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

inline double fixation_probability(double theta_deg, double sigma_deg)
{
  return std::exp(-(theta_deg * theta_deg) / (2.0 * sigma_deg * sigma_deg));
}

/// Probability per vehicle for a single gaze sample taken from the ego position.
inline std::map<std::string, double> gaze_to_fixation(
  const Vec3 & gaze, const SceneFrame & frame, const GazeModelParams & params)
{
  std::map<std::string, double> out;
  if (!(gaze.norm() > 0.0)) {
    throw InvalidGazeError("gaze vector must be non-zero");
  }
  for (const auto & v : frame.traffic) {
    out[v.id] = fixation_probability(gaze_angle_deg(gaze, frame.ego.position, v.position), params.spread);
  }
  return out;
}

/// Tracks consecutive fixation duration across samples and writes the
/// fixation fields of a frame.
class FixationTracker
{
public:
  /// `probabilities` lacks entries for vehicles that were not looked at.
  void apply(SceneFrame & frame, const std::map<std::string, double> & probabilities, std::int64_t elapsed_ms)
  {
    std::map<std::string, std::int64_t> next;
    for (auto & v : frame.traffic) {
      const auto it = probabilities.find(v.id);
      v.fixation_probability = it == probabilities.end() ? 0.0 : it->second;
      if (v.fixation_probability > kFixatedProbability) {
        const auto prev = consecutive_ms_.find(v.id);
        next[v.id] = (prev == consecutive_ms_.end() ? 0 : prev->second) + elapsed_ms;
        v.fixation_time = next[v.id];
      } else {
        v.fixation_time = 0;
      }
    }
    consecutive_ms_ = std::move(next);
  }

  void reset() { consecutive_ms_.clear(); }

private:
  std::map<std::string, std::int64_t> consecutive_ms_;
};

}  // namespace situ

#endif  // SITU__GAZE_HPP_
