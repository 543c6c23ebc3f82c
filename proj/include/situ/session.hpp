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

#ifndef SITU__SESSION_HPP_
#define SITU__SESSION_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "situ/belief.hpp"
#include "situ/comparison.hpp"
#include "situ/interpretation.hpp"
#include "situ/projection.hpp"
#include "situ/scenario.hpp"
#include "situ/trace.hpp"

namespace situ
{

struct SessionConfig
{
  std::string scenario_path;
  std::optional<double> tick_rate;  // Hz; overrides the scenario's rate when set
  TrackerParams tracker;
  LocationParams locations;
  ComparisonParams comparison;
  std::string trace_path;
  std::optional<int> stream_port;
  std::optional<std::uint64_t> seed;  // overrides meta.seed when set
  bool record_latencies{false};
  bool interactive{false};  // live gaze wins over the script

  void validate() const
  {
    if (tick_rate && !(*tick_rate > 0.0)) {
      throw Error("tick_rate must be positive");
    }
    tracker.validate();
    if (!(locations.min_gap >= 0.0) || !(locations.sensor_range > 0.0)) {
      throw Error("min_gap must be >= 0 and sensor_range > 0");
    }
    if (!(comparison.stale_cap > 0.0) || !(comparison.pos_tolerance > 0.0)) {
      throw Error("stale_cap and pos_tolerance must be positive");
    }
  }
};

/// Reads the scenario named by the config and applies its overrides.
inline Scenario load_session_scenario(const SessionConfig & cfg)
{
  std::ifstream in(cfg.scenario_path);
  if (!in) {
    throw ScenarioError(cfg.scenario_path, "cannot open scenario file");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error & e) {
    throw ScenarioError(cfg.scenario_path, std::string("malformed document: ") + e.what());
  }
  if (doc.is_object() && doc.contains("meta") && doc["meta"].is_object()) {
    if (cfg.seed) {
      doc["meta"]["seed"] = *cfg.seed;
    }
    if (cfg.tick_rate) {
      doc["meta"]["tick_rate"] = *cfg.tick_rate;
    }
  }
  return load_scenario(doc.dump());
}

/// Full in-memory result of one tick.
struct TickOutput
{
  SceneFrame frame;
  MentalBeliefState mbs;
  InterpretationModel im;
  ProjectionModel pm;
  DivergenceReport report;
  StageLatencies latencies;
  std::vector<std::string> errors;
};

namespace detail
{

inline Triple triple(const Vec3 & v) { return {v.x(), v.y(), v.z()}; }

class StageClock
{
public:
  StageClock() : last_(std::chrono::steady_clock::now()) {}

  double lap()
  {
    const auto now = std::chrono::steady_clock::now();
    const double us = std::chrono::duration<double, std::micro>(now - last_).count();
    last_ = now;
    return us;
  }

private:
  std::chrono::steady_clock::time_point last_;
};

}  // namespace detail

inline TickRecord summarize(const TickOutput & out, bool with_latencies)
{
  const SceneFrame & f = out.frame;
  const RoadFrame & road = *f.road;
  TickRecord r;
  r.tick = f.t.tick;
  r.sim_time = f.t.sim_time;

  r.frame.ego = {f.ego.id, longitudinal_coordinate(f.ego.position, road), lateral_coordinate(f.ego.position, road),
    f.ego.velocity.dot(road.heading), f.ego.current_lane.value(), detail::triple(f.ego.position)};
  r.frame.automation = {f.automation.takeover_request, f.automation.time_until_odd_boundary,
    f.automation.criticality_level, f.automation.takeover_reason, f.automation.ego_automation_state};
  for (const auto & v : f.traffic) {
    r.frame.traffic.push_back({v.id, longitudinal_coordinate(v.position, road), lateral_coordinate(v.position, road),
      v.lane.value(), v.fixation_probability, v.fixation_time, detail::triple(v.position)});
  }

  const auto belief = [&](const BeliefObject & b) {
    return BeliefSummary{b.id, b.s(), b.lateral(), b.state(2), b.state(3), b.believed_lane.value(),
      b.covariance.trace(), b.last_fixation_tick.tick, detail::triple(road_to_world(b.s(), b.lateral(), road))};
  };
  if (out.mbs.initialized) {
    r.ego_belief = belief(out.mbs.ego_belief);
  }
  for (const auto & [id, b] : out.mbs.objects) {
    r.believed.push_back(belief(b));
  }
  for (const auto & rel : out.im.relations) {
    r.relations.push_back({rel.id, to_string(rel.rel_long), rel.rel_lane ? to_string(rel.rel_lane->value) : "",
      rel.rel_lane ? rel.rel_lane->lane_distance : 0, rel.rel_order});
  }
  for (const auto & g : out.im.gaps) {
    r.gaps.push_back({g.rear_id, g.front_id, g.lane.value(), g.size});
  }
  for (const auto & [term, value] : out.im.holds) {
    r.fluents.push_back({term.str(), value});
  }
  for (const auto & e : out.im.occurred) {
    r.events.push_back(e.event.str());
  }
  for (const auto & pe : out.pm.possible_events) {
    r.possible_events.push_back({pe.event.event.str(), to_string(pe.location.kind), pe.location.lane.value(),
      pe.location.anchors, pe.location.s_min, pe.location.s_max});
  }
  for (const auto & d : out.report.items) {
    r.divergences.push_back({to_string(d.kind), d.object_id, d.magnitude, d.staleness, d.relevance, d.priority});
  }
  r.errors = out.errors;
  if (with_latencies) {
    r.latencies = out.latencies;
  }
  return r;
}

/// One driver session: owns all mutable engine state and advances it a tick
/// at a time through the fixed pipeline.
class Session
{
public:
  Session(Scenario scenario, SessionConfig cfg, DomainDefinition domain = builtin_domain())
  : scenario_(std::make_shared<const Scenario>(std::move(scenario))), cfg_(std::move(cfg)), domain_(std::move(domain))
  {
    cfg_.tracker.dt = scenario_->dt();
    cfg_.validate();
    domain_.validate();
  }

  const Scenario & scenario() const { return *scenario_; }
  const SessionConfig & config() const { return cfg_; }
  const DomainDefinition & domain() const { return domain_; }
  std::int64_t next_tick() const { return tick_; }
  bool finished() const { return tick_ >= scenario_->tick_count(); }
  const MentalBeliefState & belief() const { return mbs_; }

  /// Sensed automation switches off from the next tick on.
  void request_takeover()
  {
    if (!overrides_.manual_from_tick || *overrides_.manual_from_tick > tick_) {
      overrides_.manual_from_tick = tick_;
    }
  }

  void restart()
  {
    tick_ = 0;
    mbs_ = MentalBeliefState{};
    fixations_.reset();
    overrides_ = ScenarioOverrides{};
  }

  /// Runs simulate, perceive, belief, interpret, project, compare and
  /// prioritize for the next tick. `live_gaze` is used in interactive mode.
  TickOutput step(const std::optional<Vec3> & live_gaze = std::nullopt)
  {
    const Scenario & scn = *scenario_;
    TickOutput out;
    detail::StageClock clock;
    const auto start = std::chrono::steady_clock::now();

    out.frame = step_scenario(scn, tick_, overrides_);
    out.latencies.simulate = clock.lap();

    perceive(out.frame, live_gaze, out.errors);
    out.latencies.perceive = clock.lap();

    mbs_ = belief_tick(mbs_, out.frame, cfg_.tracker);
    for (const auto & d : mbs_.diagnostics) {
      out.errors.push_back(d);
    }
    out.latencies.belief = clock.lap();

    const SensedState sensed = SensedState::from(out.frame);
    const Timepoint t = out.frame.t;
    try {
      auto interpretation = build_interpretation_model(mbs_, sensed, domain_, t, cfg_.locations, &scn.road);
      out.im = std::move(interpretation.im);
      mbs_.fluents = std::move(interpretation.next_fluents);
    } catch (const DomainConflictError & e) {
      out.errors.emplace_back(e.what());
      out.im.t = t;
      out.im.holds = mbs_.fluents.empty() ? initial_fluents(sensed, mbs_) : mbs_.fluents;
      sync_entity_fluents(out.im.holds, mbs_);
      out.im.relations = spatial_relations(mbs_);
      out.im.gaps = detect_gaps(mbs_);
      mbs_.fluents = out.im.holds;
    }
    out.latencies.interpret = clock.lap();

    try {
      out.pm = project(out.im, mbs_, domain_, t, cfg_.locations, &scn.road);
    } catch (const UnknownTaskError & e) {
      out.errors.emplace_back(e.what());
      out.pm.t = t;
    }
    out.latencies.project = clock.lap();

    auto divs = compute_divergences(mbs_, out.im, out.frame, cfg_.comparison);
    for (auto & d : divs) {
      d.relevance = relevance(d, out.pm, out.frame, cfg_.comparison);
      d.priority = priority_of(d, cfg_.comparison);
    }
    out.latencies.compare = clock.lap();

    out.report = prioritize(std::move(divs), t);
    out.latencies.prioritize = clock.lap();

    out.mbs = mbs_;
    out.latencies.total = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
    ++tick_;
    return out;
  }

private:
  void perceive(SceneFrame & frame, const std::optional<Vec3> & live_gaze, std::vector<std::string> & errors)
  {
    const Scenario & scn = *scenario_;
    const auto elapsed_ms = static_cast<std::int64_t>(std::llround(1000.0 / scn.tick_rate));
    std::map<std::string, double> probabilities;
    std::optional<Vec3> gaze;
    if (cfg_.interactive) {
      gaze = live_gaze;
    } else if (scn.gaze.mode == GazeMode::scripted) {
      gaze = scripted_gaze(scn, frame);
    }
    if (!cfg_.interactive && scn.gaze.mode == GazeMode::full_attention) {
      for (const auto & v : frame.traffic) {
        probabilities[v.id] = 1.0;
      }
    } else if (gaze) {
      try {
        probabilities = gaze_to_fixation(*gaze, frame, scn.gaze_model);
      } catch (const InvalidGazeError & e) {
        errors.emplace_back(e.what());
      }
    }
    fixations_.apply(frame, probabilities, elapsed_ms);
  }

  std::shared_ptr<const Scenario> scenario_;
  SessionConfig cfg_;
  DomainDefinition domain_;
  MentalBeliefState mbs_;
  FixationTracker fixations_;
  ScenarioOverrides overrides_;
  std::int64_t tick_{0};
};

struct RunResult
{
  int exit_code{0};
  std::int64_t ticks{0};
  std::string message;
};

/// Runs a whole scenario headless, writing one record per tick to `trace`.
inline RunResult run_session(const Scenario & scenario, const SessionConfig & cfg, std::ostream & trace)
{
  Session session(scenario, cfg);
  RunResult result;
  while (!session.finished()) {
    auto out = session.step();
    detail::StageClock clock;
    const std::string line = encode_record(summarize(out, false));
    out.latencies.emit = clock.lap();
    if (cfg.record_latencies) {
      write_record(trace, summarize(out, true));
    } else {
      trace << line << '\n';
    }
    ++result.ticks;
  }
  return result;
}

/// File-level entry point: never throws, reports problems through the exit code.
inline RunResult run_session(const SessionConfig & cfg)
{
  RunResult result;
  try {
    cfg.validate();
    const Scenario scn = load_session_scenario(cfg);
    if (cfg.trace_path.empty()) {
      std::ostringstream sink;
      return run_session(scn, cfg, sink);
    }
    std::ofstream out(cfg.trace_path, std::ios::binary | std::ios::trunc);
    if (!out) {
      return {2, 0, "cannot write trace file '" + cfg.trace_path + "'"};
    }
    result = run_session(scn, cfg, out);
    out.flush();
    if (!out) {
      return {2, result.ticks, "error while writing '" + cfg.trace_path + "'"};
    }
    return result;
  } catch (const std::exception & e) {
    return {1, 0, e.what()};
  }
}

struct ReplayFilters
{
  std::optional<std::int64_t> tick;
  std::optional<std::string> object;
  bool events{false};
};

namespace detail
{

inline std::string fixed(double v, int digits = 2)
{
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline void render_tick(std::ostream & out, const TickRecord & r, const std::optional<std::string> & object)
{
  const auto keep = [&](const std::string & id) { return !object || id == *object; };
  out << "tick " << r.tick << " t=" << fixed(r.sim_time, 3) << "s\n";
  for (const auto & b : r.believed) {
    if (keep(b.id)) {
      out << "  believed " << b.id << " s=" << fixed(b.s) << " lat=" << fixed(b.lateral) << " lane=" << b.lane
          << " cov_trace=" << fixed(b.covariance_trace, 4) << "\n";
    }
  }
  for (const auto & rel : r.relations) {
    if (keep(rel.id)) {
      out << "  relation " << rel.id << " " << rel.rel_long << " " << (rel.rel_lane.empty() ? "-" : rel.rel_lane)
          << " lane_distance=" << rel.lane_distance << " order=" << rel.rel_order << "\n";
    }
  }
  for (const auto & g : r.gaps) {
    if (keep(g.rear_id) || keep(g.front_id)) {
      out << "  gap " << g.rear_id << " -> " << g.front_id << " lane=" << g.lane << " size=" << fixed(g.size) << "\n";
    }
  }
  if (!object) {
    for (const auto & fl : r.fluents) {
      out << "  holds " << fl.fluent << " = " << fl.value << "\n";
    }
    for (const auto & e : r.events) {
      out << "  occurs " << e << "\n";
    }
  }
  for (const auto & c : r.possible_events) {
    const bool anchored = std::find(c.anchors.begin(), c.anchors.end(), object.value_or("")) != c.anchors.end();
    if (!object || anchored) {
      out << "  possible " << c.event << " span=[" << fixed(c.s_min) << ", " << fixed(c.s_max) << "]\n";
    }
  }
  for (const auto & d : r.divergences) {
    if (keep(d.object_id)) {
      out << "  divergence " << d.kind << " " << (d.object_id.empty() ? "-" : d.object_id)
          << " priority=" << fixed(d.priority, 3) << " magnitude=" << fixed(d.magnitude, 3) << "\n";
    }
  }
  for (const auto & e : r.errors) {
    out << "  error " << e << "\n";
  }
}

}  // namespace detail

/// Renders stored records. Throws RangeError for a tick not in the trace.
inline void replay(const std::vector<TickRecord> & records, const ReplayFilters & filters, std::ostream & out)
{
  if (filters.tick) {
    const auto it = std::find_if(
      records.begin(), records.end(), [&](const TickRecord & r) { return r.tick == *filters.tick; });
    if (it == records.end()) {
      const std::string range =
        records.empty() ? "trace is empty"
                        : "available ticks " + std::to_string(records.front().tick) + ".." +
                            std::to_string(records.back().tick);
      throw RangeError("tick " + std::to_string(*filters.tick) + " out of range (" + range + ")");
    }
  }
  for (const auto & r : records) {
    if (filters.tick && r.tick != *filters.tick) {
      continue;
    }
    if (filters.events) {
      for (const auto & e : r.events) {
        if (filters.object && e.find("(" + *filters.object) == std::string::npos) {
          continue;
        }
        out << "t=" << r.tick << " " << detail::fixed(r.sim_time, 3) << "s occurs " << e << "\n";
      }
      continue;
    }
    if (filters.tick || filters.object) {
      detail::render_tick(out, r, filters.object);
      continue;
    }
    out << "tick " << r.tick << " believed=" << r.believed.size() << " gaps=" << r.gaps.size()
        << " events=" << r.events.size() << " possible=" << r.possible_events.size();
    if (!r.divergences.empty()) {
      const auto & top = r.divergences.front();
      out << " top=" << top.kind << (top.object_id.empty() ? "" : ":" + top.object_id);
    }
    out << "\n";
  }
}

struct LatencyStats
{
  double median{0.0};  // us
  double p99{0.0};     // us
};

/// Nearest-rank percentile, q in (0, 1].
inline double percentile(std::vector<double> values, double q)
{
  if (values.empty()) {
    return 0.0;
  }
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

inline LatencyStats stats_of(const std::vector<double> & samples)
{
  return {percentile(samples, 0.5), percentile(samples, 0.99)};
}

struct BenchRow
{
  int vehicles{0};
  std::int64_t ticks{0};
  std::map<std::string, LatencyStats> stages;
  LatencyStats end_to_end;
  std::size_t emitted_bytes{0};
};

struct BenchConfig
{
  std::vector<int> vehicle_counts{1, 5, 10, 20, 50};
  std::int64_t ticks{10000};
  double tick_rate{30.0};
  std::uint64_t seed{1};
};

inline const std::vector<std::string> & stage_names()
{
  static const std::vector<std::string> names{
    "simulate", "perceive", "belief", "interpret", "project", "compare", "prioritize", "emit"};
  return names;
}

/// Headless latency run for one vehicle count. Virtual time: no sleeping.
inline BenchRow bench_one(int vehicles, std::int64_t ticks, double tick_rate, std::uint64_t seed)
{
  const double duration = static_cast<double>(ticks) / tick_rate;
  SessionConfig cfg;
  Session session(make_procedural_scenario(vehicles, seed, duration, tick_rate), cfg);
  std::map<std::string, std::vector<double>> samples;
  std::vector<double> totals;
  totals.reserve(static_cast<std::size_t>(ticks));
  std::size_t emitted_bytes = 0;
  while (!session.finished()) {
    const auto t0 = std::chrono::steady_clock::now();
    auto out = session.step();
    detail::StageClock clock;
    const std::string line = encode_record(summarize(out, false));
    out.latencies.emit = clock.lap();
    totals.push_back(std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count());
    const auto & l = out.latencies;
    const double values[] = {l.simulate, l.perceive, l.belief, l.interpret, l.project, l.compare, l.prioritize, l.emit};
    for (std::size_t i = 0; i < stage_names().size(); ++i) {
      samples[stage_names()[i]].push_back(values[i]);
    }
    emitted_bytes += line.size();
  }
  BenchRow row;
  row.vehicles = vehicles;
  row.ticks = static_cast<std::int64_t>(totals.size());
  for (const auto & [name, s] : samples) {
    row.stages[name] = stats_of(s);
  }
  row.end_to_end = stats_of(totals);
  row.emitted_bytes = emitted_bytes;
  return row;
}

struct BenchReport
{
  std::vector<BenchRow> rows;

  nlohmann::json to_json() const
  {
    nlohmann::json j = nlohmann::json::array();
    for (const auto & r : rows) {
      nlohmann::json stages;
      for (const auto & [name, s] : r.stages) {
        stages[name] = {{"median_us", s.median}, {"p99_us", s.p99}};
      }
      j.push_back({{"vehicles", r.vehicles}, {"ticks", r.ticks}, {"stages", stages},
        {"end_to_end", {{"median_us", r.end_to_end.median}, {"p99_us", r.end_to_end.p99}}}});
    }
    return {{"unit", "microseconds"}, {"rows", j}};
  }

  std::string table() const
  {
    std::ostringstream os;
    os << std::left << std::setw(10) << "vehicles" << std::setw(12) << "stage" << std::right << std::setw(14)
       << "median_us" << std::setw(14) << "p99_us" << "\n";
    for (const auto & r : rows) {
      for (const auto & name : stage_names()) {
        const auto & s = r.stages.at(name);
        os << std::left << std::setw(10) << r.vehicles << std::setw(12) << name << std::right << std::setw(14)
           << detail::fixed(s.median, 2) << std::setw(14) << detail::fixed(s.p99, 2) << "\n";
      }
      os << std::left << std::setw(10) << r.vehicles << std::setw(12) << "end_to_end" << std::right << std::setw(14)
         << detail::fixed(r.end_to_end.median, 2) << std::setw(14) << detail::fixed(r.end_to_end.p99, 2) << "\n";
    }
    return os.str();
  }
};

inline BenchReport bench(const BenchConfig & cfg)
{
  BenchReport report;
  for (int n : cfg.vehicle_counts) {
    report.rows.push_back(bench_one(n, cfg.ticks, cfg.tick_rate, cfg.seed));
  }
  return report;
}

}  // namespace situ

#endif  // SITU__SESSION_HPP_
