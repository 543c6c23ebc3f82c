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

#ifndef SITU__BELIEF_HPP_
#define SITU__BELIEF_HPP_

#include <map>
#include <string>
#include <vector>

#include "situ/fluents.hpp"
#include "situ/kalman.hpp"
#include "situ/scene.hpp"

namespace situ
{

/// What the driver is estimated to know: believed traffic objects, the ego,
/// and the fluent store holding at the current tick.
struct MentalBeliefState
{
  std::map<std::string, BeliefObject> objects;
  BeliefObject ego_belief;
  bool initialized{false};
  Timepoint t;
  FluentStore fluents;
  std::vector<std::string> diagnostics;  // numeric issues from the last tick

  const BeliefObject * find(const std::string & id) const
  {
    if (initialized && id == ego_belief.id) {
      return &ego_belief;
    }
    const auto it = objects.find(id);
    return it == objects.end() ? nullptr : &it->second;
  }

  bool contains(const std::string & id) const { return objects.count(id) > 0; }
};

inline BeliefObject belief_from_ego(const EgoVehicle & ego, const RoadFrame & road, Timepoint t)
{
  BeliefObject b;
  b.id = ego.id;
  const Vec3 left = road.left();
  b.state = Vec4(longitudinal_coordinate(ego.position, road), lateral_coordinate(ego.position, road),
    ego.velocity.dot(road.heading), ego.velocity.dot(left));
  b.covariance = Mat4::Zero();
  b.believed_lane = ego.current_lane;
  b.dimension = ego.dimension;
  b.last_fixation_tick = t;
  return b;
}

inline BeliefObject admit(const TrafficVehicle & v, const RoadFrame & road, const TrackerParams & params, Timepoint t)
{
  BeliefObject b;
  b.id = v.id;
  b.state = measurement_of(v, road);
  b.covariance = measurement_noise(params);
  b.believed_lane = v.lane;
  b.dimension = v.dimension;
  b.last_fixation_tick = t;
  b.last_fixation_duration = v.fixation_time;
  return b;
}

/// One perception step: predict everything believed, admit newly fixated
/// objects at their sensed state, then correct re-fixated objects.
inline MentalBeliefState belief_tick(
  const MentalBeliefState & mbs, const SceneFrame & frame, const TrackerParams & params)
{
  const RoadFrame & road = *frame.road;
  MentalBeliefState next = mbs;
  next.diagnostics.clear();
  next.t = frame.t;

  const bool first = !mbs.initialized;
  const double dt = first ? params.dt : static_cast<double>(frame.t.tick - mbs.t.tick) * params.dt;

  if (!first && dt > 0.0) {
    for (auto & [id, obj] : next.objects) {
      try {
        obj = kalman_predict(obj, dt, params.process_noise, road.lane_width);
      } catch (const NumericError & e) {
        next.diagnostics.emplace_back(e.what());
      }
    }
  }

  if (params.eviction_ttl) {
    for (auto it = next.objects.begin(); it != next.objects.end();) {
      const double unseen = frame.t.sim_time - it->second.last_fixation_tick.sim_time;
      it = unseen > *params.eviction_ttl ? next.objects.erase(it) : std::next(it);
    }
  }

  std::vector<const TrafficVehicle *> refixated;
  for (const auto & v : frame.traffic) {
    if (!(v.fixation_probability > params.fixation_threshold)) {
      continue;
    }
    if (next.objects.count(v.id) == 0) {
      next.objects.emplace(v.id, admit(v, road, params, frame.t));
    } else {
      refixated.push_back(&v);
    }
  }

  for (const TrafficVehicle * v : refixated) {
    auto & obj = next.objects.at(v->id);
    try {
      obj = kalman_update(obj, *v, road, params);
    } catch (const NumericError & e) {
      next.diagnostics.emplace_back(e.what());
    }
    obj.last_fixation_tick = frame.t;
    obj.last_fixation_duration = v->fixation_time;
  }

  next.ego_belief = belief_from_ego(frame.ego, road, frame.t);
  next.initialized = true;
  return next;
}

}  // namespace situ

#endif  // SITU__BELIEF_HPP_
