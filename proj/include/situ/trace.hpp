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

#ifndef SITU__TRACE_HPP_
#define SITU__TRACE_HPP_

#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "situ/errors.hpp"

namespace situ
{

inline constexpr int kTraceSchemaVersion = 1;

using Triple = std::array<double, 3>;

struct EgoSummary
{
  std::string id;
  double s{0.0};
  double lateral{0.0};
  double speed{0.0};
  int lane{-1};
  Triple position{};
  bool operator==(const EgoSummary &) const = default;
};

struct AutomationSummary
{
  bool takeover_request{false};
  double time_until_odd_boundary{0.0};
  int criticality_level{0};
  std::string takeover_reason;
  bool ego_automation_state{true};
  bool operator==(const AutomationSummary &) const = default;
};

struct VehicleSummary
{
  std::string id;
  double s{0.0};
  double lateral{0.0};
  int lane{-1};
  double fixation_probability{0.0};
  std::int64_t fixation_time{0};
  Triple position{};
  bool operator==(const VehicleSummary &) const = default;
};

struct FrameSummary
{
  EgoSummary ego;
  AutomationSummary automation;
  std::vector<VehicleSummary> traffic;
  bool operator==(const FrameSummary &) const = default;
};

struct BeliefSummary
{
  std::string id;
  double s{0.0};
  double lateral{0.0};
  double v_s{0.0};
  double v_lateral{0.0};
  int lane{-1};
  double covariance_trace{0.0};
  std::int64_t last_fixation_tick{0};
  Triple position{};
  bool operator==(const BeliefSummary &) const = default;
};

struct RelationSummary
{
  std::string id;
  std::string rel_long;
  std::string rel_lane;  // empty for the opposite side
  int lane_distance{0};
  int rel_order{1};
  bool operator==(const RelationSummary &) const = default;
};

struct GapSummary
{
  std::string rear_id;
  std::string front_id;
  int lane{-1};
  double size{0.0};
  bool operator==(const GapSummary &) const = default;
};

struct FluentSummary
{
  std::string fluent;
  std::string value;
  bool operator==(const FluentSummary &) const = default;
};

struct CandidateSummary
{
  std::string event;
  std::string kind;
  int lane{-1};
  std::vector<std::string> anchors;
  double s_min{0.0};
  double s_max{0.0};
  bool operator==(const CandidateSummary &) const = default;
};

struct DivergenceSummary
{
  std::string kind;
  std::string object_id;
  double magnitude{0.0};
  double staleness{0.0};
  double relevance{0.0};
  double priority{0.0};
  bool operator==(const DivergenceSummary &) const = default;
};

/// Wall-clock cost of each pipeline stage in microseconds.
struct StageLatencies
{
  double simulate{0.0};
  double perceive{0.0};
  double belief{0.0};
  double interpret{0.0};
  double project{0.0};
  double compare{0.0};
  double prioritize{0.0};
  double emit{0.0};
  double total{0.0};
  bool operator==(const StageLatencies &) const = default;
};

/// One line of a trace file.
struct TickRecord
{
  int schema{kTraceSchemaVersion};
  std::int64_t tick{0};
  double sim_time{0.0};
  FrameSummary frame;
  std::optional<BeliefSummary> ego_belief;
  std::vector<BeliefSummary> believed;
  std::vector<RelationSummary> relations;
  std::vector<GapSummary> gaps;
  std::vector<FluentSummary> fluents;
  std::vector<std::string> events;
  std::vector<CandidateSummary> possible_events;
  std::vector<DivergenceSummary> divergences;
  std::vector<std::string> errors;
  std::optional<StageLatencies> latencies;
  bool operator==(const TickRecord &) const = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EgoSummary, id, s, lateral, speed, lane, position)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(
  AutomationSummary, takeover_request, time_until_odd_boundary, criticality_level, takeover_reason,
  ego_automation_state)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(VehicleSummary, id, s, lateral, lane, fixation_probability, fixation_time, position)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FrameSummary, ego, automation, traffic)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(
  BeliefSummary, id, s, lateral, v_s, v_lateral, lane, covariance_trace, last_fixation_tick, position)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RelationSummary, id, rel_long, rel_lane, lane_distance, rel_order)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GapSummary, rear_id, front_id, lane, size)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FluentSummary, fluent, value)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CandidateSummary, event, kind, lane, anchors, s_min, s_max)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DivergenceSummary, kind, object_id, magnitude, staleness, relevance, priority)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(
  StageLatencies, simulate, perceive, belief, interpret, project, compare, prioritize, emit, total)

inline void to_json(nlohmann::json & j, const TickRecord & r)
{
  j = nlohmann::json{
    {"schema", r.schema},
    {"tick", r.tick},
    {"sim_time", r.sim_time},
    {"frame", r.frame},
    {"believed", r.believed},
    {"relations", r.relations},
    {"gaps", r.gaps},
    {"fluents", r.fluents},
    {"events", r.events},
    {"possible_events", r.possible_events},
    {"divergences", r.divergences},
    {"errors", r.errors},
  };
  if (r.ego_belief) {
    j["ego_belief"] = *r.ego_belief;
  }
  if (r.latencies) {
    j["latencies"] = *r.latencies;
  }
}

inline void from_json(const nlohmann::json & j, TickRecord & r)
{
  j.at("schema").get_to(r.schema);
  j.at("tick").get_to(r.tick);
  j.at("sim_time").get_to(r.sim_time);
  j.at("frame").get_to(r.frame);
  j.at("believed").get_to(r.believed);
  j.at("relations").get_to(r.relations);
  j.at("gaps").get_to(r.gaps);
  j.at("fluents").get_to(r.fluents);
  j.at("events").get_to(r.events);
  j.at("possible_events").get_to(r.possible_events);
  j.at("divergences").get_to(r.divergences);
  j.at("errors").get_to(r.errors);
  r.ego_belief.reset();
  if (j.contains("ego_belief")) {
    r.ego_belief = j.at("ego_belief").get<BeliefSummary>();
  }
  r.latencies.reset();
  if (j.contains("latencies")) {
    r.latencies = j.at("latencies").get<StageLatencies>();
  }
}

inline std::string encode_record(const TickRecord & r) { return nlohmann::json(r).dump(); }

inline void write_record(std::ostream & out, const TickRecord & r) { out << encode_record(r) << '\n'; }

inline void write_trace(std::ostream & out, const std::vector<TickRecord> & records)
{
  for (const auto & r : records) {
    write_record(out, r);
  }
}

inline TickRecord decode_record(const std::string & line, std::size_t index)
{
  try {
    const auto j = nlohmann::json::parse(line);
    const int schema = j.at("schema").get<int>();
    if (schema != kTraceSchemaVersion) {
      throw TraceError(index, "unsupported schema version " + std::to_string(schema));
    }
    return j.get<TickRecord>();
  } catch (const nlohmann::json::exception & e) {
    throw TraceError(index, std::string("corrupt record: ") + e.what());
  }
}

/// Newline-delimited records; blank lines are skipped.
inline std::vector<TickRecord> read_trace(std::istream & in)
{
  std::vector<TickRecord> out;
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    out.push_back(decode_record(line, index++));
  }
  return out;
}

inline std::vector<TickRecord> read_trace_file(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open trace file '" + path + "'");
  }
  return read_trace(in);
}

}  // namespace situ

#endif  // SITU__TRACE_HPP_
