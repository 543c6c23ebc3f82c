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

#ifndef SITU__PROJECTION_HPP_
#define SITU__PROJECTION_HPP_

#include <string>
#include <vector>

#include "situ/interpretation.hpp"

namespace situ
{

struct ProjectedEvent
{
  EventOccurrence event;
  FreeLocation location;

  bool operator==(const ProjectedEvent &) const = default;
};

/// Task-consistent events the driver could bring about from the believed scene.
struct ProjectionModel
{
  Timepoint t;
  std::vector<ProjectedEvent> possible_events;

  bool operator==(const ProjectionModel &) const = default;
};

/// Enumerates ego events that initiate the goal of the current task and whose
/// possibility conditions hold in the interpretation model.
inline ProjectionModel project(
  const InterpretationModel & im, const MentalBeliefState & mbs, const DomainDefinition & domain, Timepoint t,
  const LocationParams & locations = {}, const RoadFrame * road = nullptr)
{
  ProjectionModel pm;
  pm.t = t;
  const auto task = im.value_of(Term{"curr_task", {}});
  if (!task) {
    throw Error("project: curr_task has no value at tick " + std::to_string(t.tick));
  }
  const auto goal_it = domain.task_goals.find(*task);
  if (goal_it == domain.task_goals.end()) {
    throw UnknownTaskError("project: unknown task '" + *task + "'");
  }
  if (!goal_it->second) {
    return pm;
  }
  const Term & goal = *goal_it->second;
  const std::string & actor = mbs.ego_belief.id;
  const EvalContext ctx{im.holds, SensedState{}, mbs, road, locations};

  for (const auto & ev : domain.events) {
    if (ev.possible_when.empty()) {
      continue;
    }
    for (const auto & eff : ev.effects) {
      if (eff.kind != EffectKind::initiates || eff.fluent.name != goal.name) {
        continue;
      }
      Bindings seed;
      for (const auto & arg : eff.fluent.args) {
        if (is_variable(arg)) {
          seed[arg] = actor;
        }
      }
      const Condition * where = nullptr;
      for (const auto & c : ev.possible_when) {
        if (c.kind == ConditionKind::free_location_exists) {
          where = &c;
        }
      }
      for (const auto & b : solve(ev.possible_when, {seed}, ctx)) {
        ProjectedEvent pe;
        pe.event = {ground(ev.pattern, b), t};
        if (where != nullptr) {
          const LaneId lane = detail::lane_symbol(*detail::lookup(where->subject.args[0], b));
          const std::string label = *detail::lookup(where->subject.args[1], b);
          for (auto & loc : free_locations(mbs, lane, locations)) {
            if (loc.label() == label) {
              pe.location = std::move(loc);
              break;
            }
          }
        }
        pm.possible_events.push_back(std::move(pe));
      }
      break;
    }
  }
  return pm;
}

}  // namespace situ

#endif  // SITU__PROJECTION_HPP_
