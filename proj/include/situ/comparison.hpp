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

#ifndef SITU__COMPARISON_HPP_
#define SITU__COMPARISON_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "situ/interpretation.hpp"
#include "situ/projection.hpp"

namespace situ
{

enum class DivergenceKind { missed_takeover_signal, missing_object, lane_divergence, position_divergence };

inline const char * to_string(DivergenceKind k)
{
  switch (k) {
    case DivergenceKind::missed_takeover_signal: return "missed_takeover_signal";
    case DivergenceKind::missing_object: return "missing_object";
    case DivergenceKind::lane_divergence: return "lane_divergence";
    case DivergenceKind::position_divergence: return "position_divergence";
  }
  return "?";
}

/// Lower rank sorts first among equal priorities.
inline int kind_rank(DivergenceKind k) { return static_cast<int>(k); }

struct Divergence
{
  DivergenceKind kind{DivergenceKind::missing_object};
  std::string object_id;
  double magnitude{0.0};  // 1.0 = at tolerance
  double staleness{0.0};  // s since last fixation
  double relevance{0.0};
  double priority{0.0};

  bool operator==(const Divergence &) const = default;
};

struct DivergenceReport
{
  Timepoint t;
  std::vector<Divergence> items;

  bool operator==(const DivergenceReport &) const = default;
};

struct ComparisonParams
{
  double w_rel{0.5};
  double w_mag{0.3};
  double w_stale{0.2};
  double stale_cap{10.0};        // s
  double pos_tolerance{2.0};     // m
  double relevance_range{50.0};  // m
  double sensor_range{150.0};    // m
};

/// Belief versus ground truth. Relevance and priority are left at zero.
inline std::vector<Divergence> compute_divergences(
  const MentalBeliefState & mbs, const InterpretationModel & im, const SceneFrame & frame,
  const ComparisonParams & params)
{
  const RoadFrame & road = *frame.road;
  const double ego_s = longitudinal_coordinate(frame.ego.position, road);
  std::vector<Divergence> out;

  if (frame.automation.takeover_request && !im.holds_value(Term{"audio_signal", {}}, kTrue)) {
    const int level = frame.automation.criticality_level;
    out.push_back({DivergenceKind::missed_takeover_signal, "", level > 0 ? static_cast<double>(level) : 1.0, 0.0});
  }

  for (const auto & v : frame.traffic) {
    const double s = longitudinal_coordinate(v.position, road);
    if (std::abs(s - ego_s) > params.sensor_range) {
      continue;
    }
    const auto it = mbs.objects.find(v.id);
    if (it == mbs.objects.end()) {
      out.push_back({DivergenceKind::missing_object, v.id, 1.0, params.stale_cap});
      continue;
    }
    const BeliefObject & b = it->second;
    const double staleness = frame.t.sim_time - b.last_fixation_tick.sim_time;
    const double ds = b.s() - s;
    const double dl = b.lateral() - lateral_coordinate(v.position, road);
    const double distance = std::hypot(ds, dl);
    if (b.believed_lane != v.lane) {
      out.push_back({DivergenceKind::lane_divergence, v.id, 1.0, staleness});
    }
    if (distance > params.pos_tolerance) {
      out.push_back({DivergenceKind::position_divergence, v.id, distance / params.pos_tolerance, staleness});
    }
  }
  return out;
}

/// How much an item matters for the current maneuver, in [0,1].
inline double relevance(
  const Divergence & div, const ProjectionModel & pm, const SceneFrame & frame, const ComparisonParams & params)
{
  if (div.kind == DivergenceKind::missed_takeover_signal) {
    return 1.0;
  }
  for (const auto & pe : pm.possible_events) {
    const auto & anchors = pe.location.anchors;
    if (std::find(anchors.begin(), anchors.end(), div.object_id) != anchors.end()) {
      return 1.0;
    }
  }
  const TrafficVehicle * v = frame.find(div.object_id);
  if (v == nullptr) {
    return 0.0;
  }
  const RoadFrame & road = *frame.road;
  const double distance =
    std::abs(longitudinal_coordinate(v->position, road) - longitudinal_coordinate(frame.ego.position, road));
  const LaneId ego_lane = frame.ego.current_lane;
  const bool near_lane = v->lane == ego_lane || lane_adjacent(v->lane, ego_lane);
  if (near_lane && distance <= params.relevance_range) {
    return 1.0;
  }
  return std::max(0.0, 1.0 - distance / params.sensor_range);
}

inline double priority_of(const Divergence & d, const ComparisonParams & params)
{
  return params.w_rel * d.relevance + params.w_mag * std::min(d.magnitude, 3.0) / 3.0 +
         params.w_stale * std::min(d.staleness, params.stale_cap) / params.stale_cap;
}

inline DivergenceReport prioritize(std::vector<Divergence> divs, Timepoint t = {})
{
  std::stable_sort(divs.begin(), divs.end(), [](const Divergence & a, const Divergence & b) {
    if (a.priority != b.priority) {
      return a.priority > b.priority;
    }
    if (a.kind != b.kind) {
      return kind_rank(a.kind) < kind_rank(b.kind);
    }
    return a.object_id < b.object_id;
  });
  return {t, std::move(divs)};
}

/// compute_divergences, then relevance and priority per item, then prioritize.
inline DivergenceReport compare_models(
  const MentalBeliefState & mbs, const InterpretationModel & im, const ProjectionModel & pm, const SceneFrame & frame,
  const ComparisonParams & params)
{
  auto divs = compute_divergences(mbs, im, frame, params);
  for (auto & d : divs) {
    d.relevance = relevance(d, pm, frame, params);
    d.priority = priority_of(d, params);
  }
  return prioritize(std::move(divs), frame.t);
}

}  // namespace situ

#endif  // SITU__COMPARISON_HPP_
