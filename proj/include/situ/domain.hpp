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

#ifndef SITU__DOMAIN_HPP_
#define SITU__DOMAIN_HPP_

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "situ/errors.hpp"
#include "situ/fluents.hpp"

namespace situ
{

enum class ConditionKind
{
  fluent_holds,           // fluent term has value
  sensed_flag,            // sensed automation flag has value
  lane_adjacent,          // args: lane, lane
  free_location_exists,   // args: lane, location
  believed_lane_changed,  // args: entity, from, to, location (occurrence trigger only)
};

inline const char * to_string(ConditionKind k)
{
  switch (k) {
    case ConditionKind::fluent_holds: return "holds";
    case ConditionKind::sensed_flag: return "sensed";
    case ConditionKind::lane_adjacent: return "adjacent";
    case ConditionKind::free_location_exists: return "free_location";
    case ConditionKind::believed_lane_changed: return "believed_lane_changed";
  }
  return "?";
}

struct Condition
{
  ConditionKind kind{ConditionKind::fluent_holds};
  Term subject;  // fluent term, sensed flag name, or argument list under the condition name
  std::string value;

  static Condition holds(Term fluent, std::string value)
  {
    return {ConditionKind::fluent_holds, std::move(fluent), std::move(value)};
  }
  static Condition sensed(std::string flag, bool value)
  {
    return {ConditionKind::sensed_flag, Term{std::move(flag), {}}, bool_symbol(value)};
  }
  static Condition adjacent(std::string a, std::string b)
  {
    return {ConditionKind::lane_adjacent, Term{"adjacent", {std::move(a), std::move(b)}}, {}};
  }
  static Condition free_location(std::string lane, std::string location)
  {
    return {ConditionKind::free_location_exists, Term{"free_location", {std::move(lane), std::move(location)}}, {}};
  }
  static Condition lane_changed(std::string entity, std::string from, std::string to, std::string location)
  {
    return {ConditionKind::believed_lane_changed,
      Term{"believed_lane_changed", {std::move(entity), std::move(from), std::move(to), std::move(location)}}, {}};
  }

  std::string str() const
  {
    switch (kind) {
      case ConditionKind::fluent_holds: return "holds(" + subject.str() + ", " + value + ")";
      case ConditionKind::sensed_flag: return "sensed(" + subject.name + ", " + value + ")";
      default: return subject.str();
    }
  }
};

enum class EffectKind { initiates, terminates };

struct Effect
{
  EffectKind kind{EffectKind::initiates};
  Term fluent;
  std::string value;

  std::string str() const
  {
    return std::string(kind == EffectKind::initiates ? "initiates" : "terminates") + "(" + fluent.str() + ", " +
           value + ")";
  }
};

struct FluentDecl
{
  std::string name;
  std::vector<std::string> params;
  /// Value after the current value is terminated with nothing initiated.
  /// Empty for fluents that are never terminated.
  std::string released;
  /// Allowed values; empty means any symbol.
  std::vector<std::string> values;
};

struct EventDecl
{
  Term pattern;
  std::vector<Condition> occurs_when;
  std::vector<Condition> possible_when;
  std::vector<Effect> effects;
};

/// Fluents, events with their effects and conditions, and task goals.
struct DomainDefinition
{
  std::vector<FluentDecl> fluents;
  std::vector<EventDecl> events;
  /// Task name to goal fluent; tasks with no maneuver goal map to nullopt.
  std::map<std::string, std::optional<Term>> task_goals;

  const FluentDecl * fluent(const std::string & name) const
  {
    for (const auto & f : fluents) {
      if (f.name == name) {
        return &f;
      }
    }
    return nullptr;
  }

  std::size_t event_rank(const std::string & name) const
  {
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (events[i].pattern.name == name) {
        return i;
      }
    }
    return events.size();
  }

  void validate() const
  {
    std::set<std::string> names;
    for (const auto & f : fluents) {
      if (!names.insert(f.name).second) {
        throw Error("domain: fluent '" + f.name + "' declared twice");
      }
    }
    const auto check_fluent = [&](const Term & t, const std::string & where) {
      const FluentDecl * decl = fluent(t.name);
      if (decl == nullptr) {
        throw Error("domain: " + where + " references undeclared fluent '" + t.name + "'");
      }
      if (decl->params.size() != t.args.size()) {
        throw Error("domain: " + where + " uses '" + t.name + "' with wrong arity");
      }
    };
    for (const auto & e : events) {
      for (const auto & eff : e.effects) {
        check_fluent(eff.fluent, "event " + e.pattern.name);
      }
      for (const auto & c : e.occurs_when) {
        if (c.kind == ConditionKind::fluent_holds) {
          check_fluent(c.subject, "event " + e.pattern.name);
        }
      }
      for (const auto & c : e.possible_when) {
        if (c.kind == ConditionKind::believed_lane_changed) {
          throw Error("domain: believed_lane_changed is not a possibility condition");
        }
        if (c.kind == ConditionKind::fluent_holds) {
          check_fluent(c.subject, "event " + e.pattern.name);
        }
      }
    }
    for (const auto & [task, goal] : task_goals) {
      if (goal) {
        check_fluent(*goal, "task " + task);
      }
    }
  }

  /// Read-only listing of the active domain.
  std::string dump() const
  {
    std::ostringstream os;
    os << "% fluents\n";
    for (const auto & f : fluents) {
      os << "fluent " << Term{f.name, f.params}.str();
      if (!f.values.empty()) {
        os << " in {";
        for (std::size_t i = 0; i < f.values.size(); ++i) {
          os << (i ? ", " : "") << f.values[i];
        }
        os << "}";
      }
      if (!f.released.empty()) {
        os << " released " << f.released;
      }
      os << "\n";
    }
    os << "% events\n";
    for (const auto & e : events) {
      os << "event " << e.pattern.str() << "\n";
      for (const auto & c : e.occurs_when) {
        os << "  occurs_when " << c.str() << "\n";
      }
      for (const auto & c : e.possible_when) {
        os << "  possible_when " << c.str() << "\n";
      }
      for (const auto & eff : e.effects) {
        os << "  " << eff.str() << "\n";
      }
    }
    os << "% tasks\n";
    for (const auto & [task, goal] : task_goals) {
      os << "task " << task << " goal " << (goal ? goal->str() : std::string("none")) << "\n";
    }
    return os.str();
  }
};

namespace tasks
{
inline const std::string monitor = "monitor";
inline const std::string build_sit_aware = "build_sit_aware";
inline const std::string change_lane = "change_lane";
}  // namespace tasks

/// Take-over domain: the events and fluents of the construction-site use case.
inline DomainDefinition builtin_domain()
{
  DomainDefinition d;
  d.fluents = {
    {"curr_task", {}, tasks::monitor, {tasks::monitor, tasks::build_sit_aware, tasks::change_lane}},
    {"automation", {}, kFalse, {kTrue, kFalse}},
    {"audio_signal", {}, kFalse, {kTrue, kFalse}},
    {"on_lane", {"Entity"}, "", {}},
  };

  EventDecl change_lane;
  change_lane.pattern = {"change_lane", {"E", "L1", "L2", "Loc"}};
  change_lane.occurs_when = {Condition::lane_changed("E", "L1", "L2", "Loc")};
  change_lane.possible_when = {
    Condition::holds({"on_lane", {"E"}}, "L1"),
    Condition::adjacent("L1", "L2"),
    Condition::free_location("L2", "Loc"),
  };
  change_lane.effects = {{EffectKind::initiates, {"on_lane", {"E"}}, "L2"}};

  EventDecl audio_start;
  audio_start.pattern = {"audio_signal_start", {}};
  audio_start.occurs_when = {Condition::sensed("takeover_request", true), Condition::holds({"audio_signal", {}}, kFalse)};
  audio_start.effects = {
    {EffectKind::initiates, {"audio_signal", {}}, kTrue},
    {EffectKind::initiates, {"curr_task", {}}, tasks::build_sit_aware},
  };

  EventDecl audio_end;
  audio_end.pattern = {"audio_signal_end", {}};
  audio_end.occurs_when = {Condition::sensed("takeover_request", false), Condition::holds({"audio_signal", {}}, kTrue)};
  audio_end.effects = {{EffectKind::terminates, {"audio_signal", {}}, kTrue}};

  EventDecl takeover_manual;
  takeover_manual.pattern = {"takeover_manual", {}};
  takeover_manual.occurs_when = {
    Condition::holds({"automation", {}}, kTrue), Condition::sensed("ego_automation_state", false)};
  takeover_manual.effects = {
    {EffectKind::initiates, {"curr_task", {}}, tasks::change_lane},
    {EffectKind::terminates, {"automation", {}}, kTrue},
    {EffectKind::terminates, {"curr_task", {}}, tasks::build_sit_aware},
  };

  EventDecl takeover_automation;
  takeover_automation.pattern = {"takeover_automation", {}};
  takeover_automation.occurs_when = {
    Condition::holds({"automation", {}}, kFalse), Condition::sensed("ego_automation_state", true)};
  takeover_automation.effects = {
    {EffectKind::initiates, {"automation", {}}, kTrue},
    {EffectKind::terminates, {"curr_task", {}}, tasks::change_lane},
  };

  d.events = {change_lane, audio_start, audio_end, takeover_manual, takeover_automation};
  d.task_goals = {
    {tasks::monitor, std::nullopt},
    {tasks::build_sit_aware, std::nullopt},
    {tasks::change_lane, Term{"on_lane", {"E"}}},
  };
  d.validate();
  return d;
}

}  // namespace situ

#endif  // SITU__DOMAIN_HPP_
