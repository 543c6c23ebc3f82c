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

#ifndef SITU__INTERPRETATION_HPP_
#define SITU__INTERPRETATION_HPP_

#include <optional>
#include <string>
#include <vector>

#include "situ/event_calculus.hpp"
#include "situ/relations.hpp"

namespace situ
{

struct ObjectRelations
{
  std::string id;
  RelLong rel_long{RelLong::ahead};
  /// Empty when the object is believed on the opposite side of the road.
  std::optional<RelLane> rel_lane;
  int rel_order{1};

  bool operator==(const ObjectRelations &) const = default;
};

/// Relational and event-level description of the believed scene at `t`.
struct InterpretationModel
{
  Timepoint t;
  std::vector<ObjectRelations> relations;
  std::vector<GapArtifact> gaps;
  FluentStore holds;
  std::vector<EventOccurrence> occurred;

  std::optional<std::string> value_of(const Term & fluent) const
  {
    const auto it = holds.find(fluent);
    if (it == holds.end()) {
      return std::nullopt;
    }
    return it->second;
  }

  bool holds_value(const Term & fluent, const std::string & value) const
  {
    const auto v = value_of(fluent);
    return v && *v == value;
  }

  bool operator==(const InterpretationModel &) const = default;
};

struct InterpretationResult
{
  InterpretationModel im;
  FluentStore next_fluents;
};

inline std::vector<ObjectRelations> spatial_relations(const MentalBeliefState & mbs)
{
  std::vector<ObjectRelations> out;
  out.reserve(mbs.objects.size());
  const BeliefObject & ego = mbs.ego_belief;
  for (const auto & [id, obj] : mbs.objects) {
    ObjectRelations r;
    r.id = id;
    r.rel_long = rel_long(ego.s(), ego.length(), obj.s(), obj.length());
    if ((ego.believed_lane.value() > 0) == (obj.believed_lane.value() > 0)) {
      r.rel_lane = rel_lane(ego.believed_lane, obj.believed_lane);
    }
    r.rel_order = rel_order(ego, obj, mbs);
    out.push_back(std::move(r));
  }
  return out;
}

/// Builds the interpretation model from the belief state only. The fluent
/// store in `mbs` holds at `t`; an empty store is seeded with the initial fluents.
inline InterpretationResult build_interpretation_model(
  const MentalBeliefState & mbs, const SensedState & sensed, const DomainDefinition & domain, Timepoint t,
  const LocationParams & locations = {}, const RoadFrame * road = nullptr)
{
  InterpretationResult out;
  out.im.t = t;
  out.im.holds = mbs.fluents.empty() ? initial_fluents(sensed, mbs) : mbs.fluents;
  sync_entity_fluents(out.im.holds, mbs);
  out.im.relations = spatial_relations(mbs);
  out.im.gaps = detect_gaps(mbs);

  auto step = ec_step(out.im.holds, sensed, mbs, domain, t, locations, road);
  out.im.occurred = std::move(step.occurred);
  out.next_fluents = std::move(step.next);
  return out;
}

}  // namespace situ

#endif  // SITU__INTERPRETATION_HPP_
