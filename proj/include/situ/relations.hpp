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

#ifndef SITU__RELATIONS_HPP_
#define SITU__RELATIONS_HPP_

#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

#include "situ/belief.hpp"

namespace situ
{

enum class RelLong { ahead, behind, overlapping };
enum class RelLaneValue { same, left, right };

struct RelLane
{
  RelLaneValue value{RelLaneValue::same};
  int lane_distance{0};

  bool operator==(const RelLane &) const = default;
};

inline const char * to_string(RelLong r)
{
  switch (r) {
    case RelLong::ahead: return "ahead";
    case RelLong::behind: return "behind";
    case RelLong::overlapping: return "overlapping";
  }
  return "?";
}

inline const char * to_string(RelLaneValue r)
{
  switch (r) {
    case RelLaneValue::same: return "same";
    case RelLaneValue::left: return "left";
    case RelLaneValue::right: return "right";
  }
  return "?";
}

inline RelLong rel_long(double ego_s, double ego_len, double obj_s, double obj_len)
{
  if (std::abs(obj_s - ego_s) <= (ego_len + obj_len) / 2.0) {
    return RelLong::overlapping;
  }
  return obj_s > ego_s ? RelLong::ahead : RelLong::behind;
}

inline RelLane rel_lane(LaneId ego_lane, LaneId obj_lane)
{
  const int e = ego_lane.value();
  const int o = obj_lane.value();
  if ((e > 0) != (o > 0)) {
    throw UnsupportedSideError(
      "rel_lane: lanes " + std::to_string(e) + " and " + std::to_string(o) + " lie on opposite sides");
  }
  RelLane r;
  r.lane_distance = std::abs(e - o);
  r.value = o == e ? RelLaneValue::same : (o > e ? RelLaneValue::left : RelLaneValue::right);
  return r;
}

/// n + 1, where n counts believed vehicles on the object's lane strictly
/// between ego and object.
inline int rel_order(const BeliefObject & ego, const BeliefObject & obj, const MentalBeliefState & mbs)
{
  const double lo = std::min(ego.s(), obj.s());
  const double hi = std::max(ego.s(), obj.s());
  int between = 0;
  for (const auto & [id, other] : mbs.objects) {
    if (id == obj.id || other.believed_lane != obj.believed_lane) {
      continue;
    }
    if (other.s() > lo && other.s() < hi) {
      ++between;
    }
  }
  return between + 1;
}

struct GapArtifact
{
  std::string rear_id;
  std::string front_id;
  LaneId lane{-1};
  double size{0.0};

  bool operator==(const GapArtifact &) const = default;
};

/// Believed traffic on `lane`, ordered by (s, id).
inline std::vector<const BeliefObject *> vehicles_on_lane(
  const MentalBeliefState & mbs, LaneId lane, const std::string & exclude = {})
{
  std::vector<const BeliefObject *> out;
  for (const auto & [id, obj] : mbs.objects) {
    if (obj.believed_lane == lane && id != exclude) {
      out.push_back(&obj);
    }
  }
  std::sort(out.begin(), out.end(), [](const BeliefObject * a, const BeliefObject * b) {
    return a->s() != b->s() ? a->s() < b->s() : a->id < b->id;
  });
  return out;
}

inline double bumper_gap(const BeliefObject & rear, const BeliefObject & front)
{
  return std::max(0.0, (front.s() - rear.s()) - (rear.length() + front.length()) / 2.0);
}

/// Consecutive same-lane pairs; sorted by (lane, rear s).
inline std::vector<GapArtifact> detect_gaps(const MentalBeliefState & mbs)
{
  std::set<LaneId> lanes;
  for (const auto & [id, obj] : mbs.objects) {
    lanes.insert(obj.believed_lane);
  }
  std::vector<GapArtifact> gaps;
  for (LaneId lane : lanes) {
    const auto row = vehicles_on_lane(mbs, lane);
    for (std::size_t i = 0; i + 1 < row.size(); ++i) {
      gaps.push_back({row[i]->id, row[i + 1]->id, lane, bumper_gap(*row[i], *row[i + 1])});
    }
  }
  return gaps;
}

enum class LocationKind { gap, ahead_of, behind, empty_lane };

inline const char * to_string(LocationKind k)
{
  switch (k) {
    case LocationKind::gap: return "gap";
    case LocationKind::ahead_of: return "ahead_of";
    case LocationKind::behind: return "behind";
    case LocationKind::empty_lane: return "empty_lane";
  }
  return "?";
}

struct FreeLocation
{
  LaneId lane{-1};
  LocationKind kind{LocationKind::empty_lane};
  std::vector<std::string> anchors;
  double s_min{0.0};
  double s_max{0.0};

  /// Symbol used as the Location argument of change_lane.
  std::string label() const
  {
    Term t{to_string(kind), anchors};
    return t.str();
  }

  bool operator==(const FreeLocation &) const = default;
};

struct LocationParams
{
  double min_gap{13.0};        // m
  double sensor_range{150.0};  // m
};

/// Free space on `lane` around the believed ego position, ordered rear to front.
inline std::vector<FreeLocation> free_locations(
  const MentalBeliefState & mbs, LaneId lane, const LocationParams & params)
{
  const double ego_s = mbs.ego_belief.s();
  const double lo = ego_s - params.sensor_range;
  const double hi = ego_s + params.sensor_range;
  const auto row = vehicles_on_lane(mbs, lane, mbs.ego_belief.id);

  std::vector<FreeLocation> out;
  if (row.empty()) {
    out.push_back({lane, LocationKind::empty_lane, {}, lo, hi});
    return out;
  }
  const auto push_if_wide = [&](FreeLocation loc) {
    if (loc.s_max - loc.s_min >= params.min_gap) {
      out.push_back(std::move(loc));
    }
  };

  const BeliefObject & rear = *row.front();
  push_if_wide({lane, LocationKind::behind, {rear.id}, lo, rear.s() - rear.length() / 2.0});
  for (std::size_t i = 0; i + 1 < row.size(); ++i) {
    const BeliefObject & a = *row[i];
    const BeliefObject & b = *row[i + 1];
    if (bumper_gap(a, b) >= params.min_gap) {
      out.push_back({lane, LocationKind::gap, {a.id, b.id}, a.s() + a.length() / 2.0, b.s() - b.length() / 2.0});
    }
  }
  const BeliefObject & front = *row.back();
  push_if_wide({lane, LocationKind::ahead_of, {front.id}, front.s() + front.length() / 2.0, hi});
  return out;
}

/// Where `entity` sits among the other believed vehicles on `lane`, as a
/// location symbol (gap(a,b), ahead_of(a), behind(a), empty_lane or occupied(a)).
inline std::string locate_on_lane(const MentalBeliefState & mbs, const BeliefObject & entity, LaneId lane)
{
  const auto row = vehicles_on_lane(mbs, lane, entity.id);
  if (row.empty()) {
    return "empty_lane";
  }
  const BeliefObject * rear = nullptr;
  const BeliefObject * front = nullptr;
  for (const BeliefObject * v : row) {
    if (rel_long(entity.s(), entity.length(), v->s(), v->length()) == RelLong::overlapping) {
      return Term{"occupied", {v->id}}.str();
    }
    if (v->s() < entity.s()) {
      rear = v;
    } else if (front == nullptr) {
      front = v;
    }
  }
  if (rear && front) {
    return Term{"gap", {rear->id, front->id}}.str();
  }
  return rear ? Term{"ahead_of", {rear->id}}.str() : Term{"behind", {front->id}}.str();
}

}  // namespace situ

#endif  // SITU__RELATIONS_HPP_
