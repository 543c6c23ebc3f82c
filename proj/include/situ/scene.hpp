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

#ifndef SITU__SCENE_HPP_
#define SITU__SCENE_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "situ/errors.hpp"

namespace situ
{

using Vec3 = Eigen::Vector3d;

/// Discrete engine time. `sim_time` is always `tick * dt`.
struct Timepoint
{
  std::int64_t tick{0};
  double sim_time{0.0};

  static Timepoint at(std::int64_t tick, double dt) { return {tick, static_cast<double>(tick) * dt}; }

  bool operator==(const Timepoint &) const = default;
};

/// OpenDRIVE-style signed lane index. Zero is the road middle and never a lane.
class LaneId
{
public:
  explicit LaneId(int id) : id_(id)
  {
    if (id == 0) {
      throw InvalidLaneError("lane id 0 is the road middle, not a drivable lane");
    }
  }

  int value() const noexcept { return id_; }

  auto operator<=>(const LaneId &) const = default;

private:
  int id_;
};

inline std::string to_string(LaneId lane) { return std::to_string(lane.value()); }

/// Adjacency never crosses the road middle.
inline bool lane_adjacent(LaneId a, LaneId b)
{
  const int x = a.value();
  const int y = b.value();
  return std::abs(x - y) == 1 && ((x > 0) == (y > 0));
}

/// Accepts a float lane measure within 0.25 of a non-zero integer.
inline LaneId coerce_lane(double value)
{
  if (!std::isfinite(value)) {
    throw InvalidLaneError("lane value is not finite");
  }
  const double nearest = std::round(value);
  if (std::abs(value - nearest) > 0.25) {
    throw InvalidLaneError("lane value " + std::to_string(value) + " is not within 0.25 of a lane id");
  }
  return LaneId(static_cast<int>(nearest));
}

/// Straight-road reference frame. Lateral coordinates grow to the left of
/// `heading`; negative lanes lie right of the road middle.
struct RoadFrame
{
  Vec3 origin{Vec3::Zero()};
  Vec3 heading{Vec3::UnitX()};
  double lane_width{3.5};
  std::set<LaneId> drivable_lanes;
  std::optional<double> construction_site_s;

  void validate() const
  {
    if (std::abs(heading.norm() - 1.0) > 1e-9) {
      throw InvalidSceneError("road heading must have unit norm");
    }
    if (!(lane_width > 0.0)) {
      throw InvalidSceneError("road lane_width must be positive");
    }
    if (drivable_lanes.empty()) {
      throw InvalidSceneError("road needs at least one drivable lane");
    }
  }

  /// In-plane unit normal pointing left of the heading.
  Vec3 left() const
  {
    Vec3 n = Vec3::UnitZ().cross(heading);
    const double len = n.norm();
    return len > 0.0 ? Vec3(n / len) : Vec3(Vec3::UnitY());
  }

  bool is_drivable(LaneId lane) const { return drivable_lanes.count(lane) > 0; }
};

inline double longitudinal_coordinate(const Vec3 & position, const RoadFrame & road)
{
  return (position - road.origin).dot(road.heading);
}

inline double lateral_coordinate(const Vec3 & position, const RoadFrame & road)
{
  return (position - road.origin).dot(road.left());
}

/// Lateral offset of a lane's center line.
inline double lane_center(LaneId lane, double lane_width)
{
  const int id = lane.value();
  return id < 0 ? (id + 0.5) * lane_width : (id - 0.5) * lane_width;
}

/// Lane containing a lateral offset. Offsets exactly on the middle line belong to lane -1.
inline LaneId lane_at_lateral(double lateral, double lane_width)
{
  if (!std::isfinite(lateral)) {
    throw NumericError("lateral offset is not finite");
  }
  if (lateral <= 0.0) {
    return LaneId(-(static_cast<int>(std::floor(-lateral / lane_width)) + 1));
  }
  return LaneId(static_cast<int>(std::floor(lateral / lane_width)) + 1);
}

inline Vec3 road_to_world(double s, double lateral, const RoadFrame & road)
{
  return road.origin + s * road.heading + lateral * road.left();
}

struct TrafficVehicle
{
  std::string id;
  std::string type{"car"};
  Vec3 position{Vec3::Zero()};
  Vec3 orientation{Vec3::Zero()};
  Vec3 velocity{Vec3::Zero()};
  Vec3 acceleration{Vec3::Zero()};
  Vec3 dimension{4.5, 1.8, 1.5};
  LaneId lane{-1};
  double fixation_probability{0.0};
  std::int64_t fixation_time{0};  // ms
};

struct EgoVehicle
{
  std::string id{"ego"};
  std::string type{"car"};
  Vec3 position{Vec3::Zero()};
  Vec3 orientation{Vec3::Zero()};
  Vec3 velocity{Vec3::Zero()};
  bool indicator_left{false};
  bool indicator_right{false};
  double acceleration{0.0};
  int current_speed_limit{130};  // km/h
  LaneId current_lane{-1};
  Vec3 dimension{5.0, 1.9, 1.5};
};

struct AutomationState
{
  bool takeover_request{false};
  double time_until_odd_boundary{0.0};
  int criticality_level{0};
  std::string takeover_reason;
  bool ego_automation_state{true};
};

/// Ground-truth snapshot of one tick.
struct SceneFrame
{
  Timepoint t;
  EgoVehicle ego;
  AutomationState automation;
  std::vector<TrafficVehicle> traffic;
  const RoadFrame * road{nullptr};

  const TrafficVehicle * find(const std::string & id) const
  {
    for (const auto & v : traffic) {
      if (v.id == id) {
        return &v;
      }
    }
    return nullptr;
  }

  void validate() const
  {
    if (road == nullptr) {
      throw InvalidSceneError("frame has no road");
    }
    road->validate();
    if (!road->is_drivable(ego.current_lane)) {
      throw InvalidSceneError("ego lane " + to_string(ego.current_lane) + " is not drivable");
    }
    if (automation.takeover_request && automation.time_until_odd_boundary < 0.0) {
      throw InvalidSceneError("time_until_odd_boundary must be >= 0 while a takeover is requested");
    }
    std::unordered_set<std::string> ids{ego.id};
    for (const auto & v : traffic) {
      if (!ids.insert(v.id).second) {
        throw InvalidSceneError("duplicate vehicle id '" + v.id + "'");
      }
      if (!(v.dimension.array() > 0.0).all()) {
        throw InvalidSceneError("vehicle '" + v.id + "' has a non-positive dimension");
      }
      if (!(v.fixation_probability >= 0.0 && v.fixation_probability <= 1.0)) {
        throw InvalidSceneError("vehicle '" + v.id + "' fixation_probability outside [0,1]");
      }
      if (v.fixation_time < 0) {
        throw InvalidSceneError("vehicle '" + v.id + "' fixation_time is negative");
      }
    }
  }
};

}  // namespace situ

#endif  // SITU__SCENE_HPP_
