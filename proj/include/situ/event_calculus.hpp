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

#ifndef SITU__EVENT_CALCULUS_HPP_
#define SITU__EVENT_CALCULUS_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "situ/belief.hpp"
#include "situ/domain.hpp"
#include "situ/relations.hpp"

namespace situ
{

/// Sensed (not gaze-gated) inputs to event detection.
struct SensedState
{
  bool takeover_request{false};
  bool ego_automation_state{true};
  LaneId ego_lane{-1};
  int criticality_level{0};

  static SensedState from(const SceneFrame & frame)
  {
    return {frame.automation.takeover_request, frame.automation.ego_automation_state, frame.ego.current_lane,
      frame.automation.criticality_level};
  }
};

using Bindings = std::map<std::string, std::string>;

/// Everything a rule body may consult at one tick.
struct EvalContext
{
  const FluentStore & fluents;
  const SensedState & sensed;
  const MentalBeliefState & mbs;
  const RoadFrame * road{nullptr};
  LocationParams locations;
};

namespace detail
{

inline std::optional<std::string> lookup(const std::string & symbol, const Bindings & b)
{
  if (!is_variable(symbol)) {
    return symbol;
  }
  const auto it = b.find(symbol);
  if (it == b.end()) {
    return std::nullopt;
  }
  return it->second;
}

inline LaneId lane_symbol(const std::string & s)
{
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception &) {
    throw Error("'" + s + "' is not a lane id");
  }
  if (used != s.size()) {
    throw Error("'" + s + "' is not a lane id");
  }
  return LaneId(v);
}

inline bool unify(Bindings & b, const std::string & var, const std::string & value)
{
  if (!is_variable(var)) {
    return var == value;
  }
  const auto [it, inserted] = b.emplace(var, value);
  return inserted || it->second == value;
}

inline void expand_fluent_holds(
  const Condition & c, const Bindings & b, const EvalContext & ctx, std::vector<Bindings> & out)
{
  for (const auto & [term, value] : ctx.fluents) {
    if (term.name != c.subject.name || term.args.size() != c.subject.args.size()) {
      continue;
    }
    Bindings nb = b;
    bool ok = true;
    for (std::size_t i = 0; ok && i < term.args.size(); ++i) {
      ok = unify(nb, c.subject.args[i], term.args[i]);
    }
    if (ok && unify(nb, c.value, value)) {
      out.push_back(std::move(nb));
    }
  }
}

inline bool sensed_flag(const std::string & flag, const SensedState & sensed)
{
  if (flag == "takeover_request") {
    return sensed.takeover_request;
  }
  if (flag == "ego_automation_state") {
    return sensed.ego_automation_state;
  }
  throw Error("unknown sensed flag '" + flag + "'");
}

inline void expand_adjacent(const Condition & c, const Bindings & b, const EvalContext & ctx, std::vector<Bindings> & out)
{
  const auto a = lookup(c.subject.args[0], b);
  const auto z = lookup(c.subject.args[1], b);
  if (a && z) {
    if (lane_adjacent(lane_symbol(*a), lane_symbol(*z))) {
      out.push_back(b);
    }
    return;
  }
  if (!a && !z) {
    throw Error("adjacent/2 needs at least one bound lane");
  }
  const LaneId known = lane_symbol(a ? *a : *z);
  for (int delta : {-1, 1}) {
    const int cand = known.value() + delta;
    if (cand == 0 || (cand > 0) != (known.value() > 0)) {
      continue;
    }
    const LaneId lane(cand);
    if (ctx.road != nullptr && !ctx.road->is_drivable(lane)) {
      continue;
    }
    Bindings nb = b;
    nb[a ? c.subject.args[1] : c.subject.args[0]] = to_string(lane);
    out.push_back(std::move(nb));
  }
}

inline void expand_free_location(
  const Condition & c, const Bindings & b, const EvalContext & ctx, std::vector<Bindings> & out)
{
  const auto lane = lookup(c.subject.args[0], b);
  if (!lane) {
    throw Error("free_location/2 needs a bound lane");
  }
  for (const auto & loc : free_locations(ctx.mbs, lane_symbol(*lane), ctx.locations)) {
    Bindings nb = b;
    if (unify(nb, c.subject.args[1], loc.label())) {
      out.push_back(std::move(nb));
    }
  }
}

inline void expand_lane_changed(
  const Condition & c, const Bindings & b, const EvalContext & ctx, std::vector<Bindings> & out)
{
  const auto visit = [&](const BeliefObject & entity) {
    const auto it = ctx.fluents.find(Term{"on_lane", {entity.id}});
    if (it == ctx.fluents.end()) {
      return;
    }
    const std::string now = to_string(entity.believed_lane);
    if (it->second == now) {
      return;
    }
    Bindings nb = b;
    const auto & args = c.subject.args;
    if (unify(nb, args[0], entity.id) && unify(nb, args[1], it->second) && unify(nb, args[2], now) &&
        unify(nb, args[3], locate_on_lane(ctx.mbs, entity, entity.believed_lane))) {
      out.push_back(std::move(nb));
    }
  };
  if (ctx.mbs.initialized) {
    visit(ctx.mbs.ego_belief);
  }
  for (const auto & [id, obj] : ctx.mbs.objects) {
    visit(obj);
  }
}

}  // namespace detail

/// Left-to-right evaluation of a rule body; returns every satisfying binding.
inline std::vector<Bindings> solve(const std::vector<Condition> & body, std::vector<Bindings> seeds, const EvalContext & ctx)
{
  for (const auto & c : body) {
    std::vector<Bindings> next;
    for (const auto & b : seeds) {
      switch (c.kind) {
        case ConditionKind::fluent_holds:
          detail::expand_fluent_holds(c, b, ctx, next);
          break;
        case ConditionKind::sensed_flag:
          if (bool_symbol(detail::sensed_flag(c.subject.name, ctx.sensed)) == c.value) {
            next.push_back(b);
          }
          break;
        case ConditionKind::lane_adjacent:
          detail::expand_adjacent(c, b, ctx, next);
          break;
        case ConditionKind::free_location_exists:
          detail::expand_free_location(c, b, ctx, next);
          break;
        case ConditionKind::believed_lane_changed:
          detail::expand_lane_changed(c, b, ctx, next);
          break;
      }
    }
    seeds = std::move(next);
    if (seeds.empty()) {
      break;
    }
  }
  return seeds;
}

inline Term ground(const Term & t, const Bindings & b)
{
  Term out{t.name, {}};
  out.args.reserve(t.args.size());
  for (const auto & a : t.args) {
    const auto v = detail::lookup(a, b);
    if (!v) {
      throw Error("unbound variable " + a + " in " + t.str());
    }
    out.args.push_back(*v);
  }
  return out;
}

/// Adds on_lane(e) for newly believed entities and drops it for forgotten ones.
inline void sync_entity_fluents(FluentStore & store, const MentalBeliefState & mbs)
{
  for (auto it = store.begin(); it != store.end();) {
    const bool entity_fluent = it->first.name == "on_lane" && it->first.args.size() == 1;
    it = entity_fluent && mbs.find(it->first.args[0]) == nullptr ? store.erase(it) : std::next(it);
  }
  const auto add = [&](const BeliefObject & obj) {
    store.emplace(Term{"on_lane", {obj.id}}, to_string(obj.believed_lane));
  };
  if (mbs.initialized) {
    add(mbs.ego_belief);
  }
  for (const auto & [id, obj] : mbs.objects) {
    add(obj);
  }
}

inline FluentStore initial_fluents(const SensedState & sensed, const MentalBeliefState & mbs)
{
  FluentStore store;
  store[Term{"automation", {}}] = bool_symbol(sensed.ego_automation_state);
  store[Term{"audio_signal", {}}] = kFalse;
  store[Term{"curr_task", {}}] = tasks::monitor;
  sync_entity_fluents(store, mbs);
  return store;
}

struct EcStepResult
{
  std::vector<EventOccurrence> occurred;
  FluentStore next;
};

/// Detects the events occurring at `t` and derives the fluents holding at t+1.
inline EcStepResult ec_step(
  const FluentStore & at_t, const SensedState & sensed, const MentalBeliefState & mbs, const DomainDefinition & domain,
  Timepoint t, const LocationParams & locations = {}, const RoadFrame * road = nullptr)
{
  for (const auto & decl : domain.fluents) {
    if (decl.params.empty() && at_t.count(Term{decl.name, {}}) == 0) {
      throw Error("ec_step: fluent '" + decl.name + "' has no value at tick " + std::to_string(t.tick));
    }
  }
  const EvalContext ctx{at_t, sensed, mbs, road, locations};

  struct Pending
  {
    std::set<std::string> initiated;
    std::set<std::string> terminated;
    std::vector<std::string> sources;
  };
  std::map<Term, Pending> pending;

  EcStepResult result;
  for (const auto & ev : domain.events) {
    if (ev.occurs_when.empty()) {
      continue;
    }
    std::set<Term> seen;
    std::vector<std::pair<Term, Bindings>> hits;
    for (auto & b : solve(ev.occurs_when, {Bindings{}}, ctx)) {
      Term g = ground(ev.pattern, b);
      if (seen.insert(g).second) {
        hits.emplace_back(std::move(g), std::move(b));
      }
    }
    std::sort(hits.begin(), hits.end(), [](const auto & x, const auto & y) { return x.first < y.first; });
    for (const auto & [g, b] : hits) {
      result.occurred.push_back({g, t});
      for (const auto & eff : ev.effects) {
        auto & p = pending[ground(eff.fluent, b)];
        const std::string value = *detail::lookup(eff.value, b);
        (eff.kind == EffectKind::initiates ? p.initiated : p.terminated).insert(value);
        p.sources.push_back(g.str());
      }
    }
  }

  result.next = at_t;
  for (const auto & [fluent, p] : pending) {
    bool conflict = p.initiated.size() > 1;
    for (const auto & v : p.initiated) {
      conflict = conflict || p.terminated.count(v) > 0;
    }
    if (conflict) {
      std::string names;
      for (const auto & s : p.sources) {
        names += (names.empty() ? "" : ", ") + s;
      }
      throw DomainConflictError(
        "conflicting effects on " + fluent.str() + " at tick " + std::to_string(t.tick) + " from " + names);
    }
    if (!p.initiated.empty()) {
      result.next[fluent] = *p.initiated.begin();
      continue;
    }
    const auto it = at_t.find(fluent);
    if (it != at_t.end() && p.terminated.count(it->second) > 0) {
      const FluentDecl * decl = domain.fluent(fluent.name);
      if (decl == nullptr || decl->released.empty()) {
        result.next.erase(fluent);
      } else {
        result.next[fluent] = decl->released;
      }
    }
  }
  return result;
}

}  // namespace situ

#endif  // SITU__EVENT_CALCULUS_HPP_
