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

#ifndef SITU__SCENARIO_HPP_
#define SITU__SCENARIO_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "situ/gaze.hpp"
#include "situ/scene.hpp"

namespace situ
{

struct EgoSegment
{
  double start{0.0};  // s
  LaneId lane{-1};
  double speed{0.0};  // m/s
  bool automation{true};
};

struct EgoScript
{
  std::string id{"ego"};
  std::string type{"car"};
  Vec3 dimension{5.0, 1.9, 1.5};
  int speed_limit{130};  // km/h
  double start_s{0.0};
  std::vector<EgoSegment> segments;
};

struct TrafficSegment
{
  double start{0.0};
  LaneId lane{-1};
  double speed{0.0};
};

struct TrafficScript
{
  std::string id;
  std::string type{"car"};
  Vec3 dimension{4.5, 1.8, 1.5};
  double start_s{0.0};
  std::vector<TrafficSegment> segments;
};

struct AutomationScript
{
  std::optional<double> takeover_request_onset;  // s
  double lead_time{10.0};                        // s from onset to the ODD boundary
  int criticality_level{1};
  std::string takeover_reason;
};

enum class GazeMode { none, scripted, full_attention };

struct GazeSample
{
  double time{0.0};
  std::optional<Vec3> direction;
  std::string target;  // vehicle id; used when direction is absent
};

struct GazeScript
{
  GazeMode mode{GazeMode::none};
  std::vector<GazeSample> samples;
};

struct Scenario
{
  std::string name;
  RoadFrame road;
  double duration{1.0};    // s
  double tick_rate{30.0};  // Hz
  std::uint64_t seed{0};
  EgoScript ego;
  std::vector<TrafficScript> traffic;
  AutomationScript automation;
  GazeScript gaze;
  GazeModelParams gaze_model;

  double dt() const { return 1.0 / tick_rate; }
  std::int64_t tick_count() const { return static_cast<std::int64_t>(std::llround(duration * tick_rate)); }
};

/// Live adjustments applied on top of the script.
struct ScenarioOverrides
{
  std::optional<std::int64_t> manual_from_tick;
};

namespace detail
{

using json = nlohmann::json;

class Reader
{
public:
  static const json & field(const json & obj, const std::string & key, const std::string & path)
  {
    if (!obj.is_object()) {
      throw ScenarioError(path, "expected an object");
    }
    const auto it = obj.find(key);
    if (it == obj.end()) {
      throw ScenarioError(join(path, key), "missing required field");
    }
    return *it;
  }

  static bool has(const json & obj, const std::string & key) { return obj.is_object() && obj.contains(key); }

  static std::string join(const std::string & path, const std::string & key)
  {
    return path.empty() ? key : path + "." + key;
  }

  static std::string index(const std::string & path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

  static double number(const json & j, const std::string & path)
  {
    if (!j.is_number()) {
      throw ScenarioError(path, "expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      throw ScenarioError(path, "expected a finite number");
    }
    return v;
  }

  static double number(const json & obj, const std::string & key, const std::string & path, double fallback)
  {
    return has(obj, key) ? number(obj.at(key), join(path, key)) : fallback;
  }

  static int integer(const json & j, const std::string & path)
  {
    if (!j.is_number_integer()) {
      throw ScenarioError(path, "expected an integer");
    }
    return j.get<int>();
  }

  static bool boolean(const json & j, const std::string & path)
  {
    if (!j.is_boolean()) {
      throw ScenarioError(path, "expected a boolean");
    }
    return j.get<bool>();
  }

  static std::string string(const json & j, const std::string & path)
  {
    if (!j.is_string()) {
      throw ScenarioError(path, "expected a string");
    }
    return j.get<std::string>();
  }

  static Vec3 vec3(const json & j, const std::string & path)
  {
    if (!j.is_array() || j.size() != 3) {
      throw ScenarioError(path, "expected an array of 3 numbers");
    }
    return {number(j[0], index(path, 0)), number(j[1], index(path, 1)), number(j[2], index(path, 2))};
  }

  static LaneId lane(const json & j, const std::string & path)
  {
    const int id = integer(j, path);
    if (id == 0) {
      throw ScenarioError(path, "invalid lane id 0 (road middle)");
    }
    return LaneId(id);
  }

  static const json & array(const json & j, const std::string & path)
  {
    if (!j.is_array()) {
      throw ScenarioError(path, "expected an array");
    }
    return j;
  }
};

inline double unit_double(std::mt19937_64 & rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename Segment>
void check_segments(const std::vector<Segment> & segs, double duration, const std::string & path)
{
  if (segs.empty()) {
    throw ScenarioError(path, "at least one segment is required");
  }
  if (segs.front().start != 0.0) {
    throw ScenarioError(Reader::index(path, 0) + ".start", "first segment must start at 0");
  }
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (segs[i].start < 0.0 || segs[i].start > duration) {
      throw ScenarioError(Reader::index(path, i) + ".start", "outside [0, duration]");
    }
    if (i > 0 && !(segs[i].start > segs[i - 1].start)) {
      throw ScenarioError(Reader::index(path, i) + ".start", "overlapping script segments");
    }
  }
}

inline Vec3 positive_dimension(const json & j, const std::string & path)
{
  const Vec3 d = Reader::vec3(j, path);
  if (!(d.array() > 0.0).all()) {
    throw ScenarioError(path, "dimension components must be positive");
  }
  return d;
}

inline RoadFrame read_road(const json & j, const std::string & path)
{
  using R = Reader;
  RoadFrame road;
  if (R::has(j, "origin")) {
    road.origin = R::vec3(j.at("origin"), R::join(path, "origin"));
  }
  if (R::has(j, "heading")) {
    const Vec3 h = R::vec3(j.at("heading"), R::join(path, "heading"));
    if (!(h.norm() > 0.0)) {
      throw ScenarioError(R::join(path, "heading"), "heading must be non-zero");
    }
    road.heading = h.normalized();
  }
  road.lane_width = R::number(j, "lane_width", path, road.lane_width);
  if (!(road.lane_width > 0.0)) {
    throw ScenarioError(R::join(path, "lane_width"), "must be positive");
  }
  const auto & lanes = R::array(R::field(j, "drivable_lanes", path), R::join(path, "drivable_lanes"));
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    road.drivable_lanes.insert(R::lane(lanes[i], R::index(R::join(path, "drivable_lanes"), i)));
  }
  if (road.drivable_lanes.empty()) {
    throw ScenarioError(R::join(path, "drivable_lanes"), "at least one drivable lane is required");
  }
  if (R::has(j, "construction_site_s") && !j.at("construction_site_s").is_null()) {
    road.construction_site_s = R::number(j.at("construction_site_s"), R::join(path, "construction_site_s"));
  }
  return road;
}

inline void check_lane_drivable(const RoadFrame & road, LaneId lane, const std::string & path)
{
  if (!road.is_drivable(lane)) {
    throw ScenarioError(path, "lane " + to_string(lane) + " is not a drivable lane");
  }
}

inline TrafficScript read_vehicle(const json & j, const std::string & path, const Scenario & scn)
{
  using R = Reader;
  TrafficScript v;
  v.id = R::string(R::field(j, "id", path), R::join(path, "id"));
  if (v.id.empty()) {
    throw ScenarioError(R::join(path, "id"), "must not be empty");
  }
  if (R::has(j, "type")) {
    v.type = R::string(j.at("type"), R::join(path, "type"));
  }
  if (R::has(j, "dimension")) {
    v.dimension = positive_dimension(j.at("dimension"), R::join(path, "dimension"));
  }
  v.start_s = R::number(j, "start_s", path, 0.0);
  const std::string seg_path = R::join(path, "segments");
  const auto & segs = R::array(R::field(j, "segments", path), seg_path);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string p = R::index(seg_path, i);
    TrafficSegment s;
    s.start = R::number(R::field(segs[i], "start", p), R::join(p, "start"));
    s.lane = R::lane(R::field(segs[i], "lane", p), R::join(p, "lane"));
    check_lane_drivable(scn.road, s.lane, R::join(p, "lane"));
    s.speed = R::number(R::field(segs[i], "speed", p), R::join(p, "speed"));
    v.segments.push_back(s);
  }
  check_segments(v.segments, scn.duration, seg_path);
  return v;
}

/// Expands {"generate": {...}} into seeded random constant-speed vehicles.
inline std::vector<TrafficScript> generate_vehicles(const json & g, const std::string & path, const Scenario & scn)
{
  using R = Reader;
  const int count = R::integer(R::field(g, "count", path), R::join(path, "count"));
  if (count < 0) {
    throw ScenarioError(R::join(path, "count"), "must be non-negative");
  }
  std::vector<LaneId> lanes;
  if (R::has(g, "lanes")) {
    const auto & arr = R::array(g.at("lanes"), R::join(path, "lanes"));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = R::index(R::join(path, "lanes"), i);
      lanes.push_back(R::lane(arr[i], p));
      check_lane_drivable(scn.road, lanes.back(), p);
    }
  } else {
    lanes.assign(scn.road.drivable_lanes.begin(), scn.road.drivable_lanes.end());
  }
  if (lanes.empty()) {
    throw ScenarioError(R::join(path, "lanes"), "at least one lane is required");
  }
  const auto range = [&](const char * key, double lo, double hi) {
    if (!R::has(g, key)) {
      return std::pair{lo, hi};
    }
    const auto & a = g.at(key);
    const std::string p = R::join(path, key);
    if (!a.is_array() || a.size() != 2) {
      throw ScenarioError(p, "expected [min, max]");
    }
    const double x = R::number(a[0], R::index(p, 0));
    const double y = R::number(a[1], R::index(p, 1));
    if (y < x) {
      throw ScenarioError(p, "max must not be below min");
    }
    return std::pair{x, y};
  };
  const auto [s_lo, s_hi] = range("s_range", -100.0, 300.0);
  const auto [v_lo, v_hi] = range("speed_range", 20.0, 35.0);
  const std::string prefix = R::has(g, "id_prefix") ? R::string(g.at("id_prefix"), R::join(path, "id_prefix")) : "gen";

  std::mt19937_64 rng(scn.seed);
  std::vector<TrafficScript> out;
  for (int i = 0; i < count; ++i) {
    TrafficScript v;
    v.id = prefix + std::to_string(i);
    v.start_s = s_lo + (s_hi - s_lo) * unit_double(rng);
    const LaneId lane = lanes[static_cast<std::size_t>(rng() % lanes.size())];
    const double speed = v_lo + (v_hi - v_lo) * unit_double(rng);
    v.segments.push_back({0.0, lane, speed});
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace detail

/// Parses and validates a scenario document. Errors carry the offending path.
inline Scenario load_scenario(std::string_view document)
{
  using detail::Reader;
  using R = Reader;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error & e) {
    throw ScenarioError("$", std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ScenarioError("$", "expected an object at top level");
  }

  Scenario scn;
  const auto & meta = R::field(doc, "meta", "");
  if (R::has(meta, "name")) {
    scn.name = R::string(meta.at("name"), "meta.name");
  }
  scn.duration = R::number(R::field(meta, "duration", "meta"), "meta.duration");
  if (!(scn.duration > 0.0)) {
    throw ScenarioError("meta.duration", "must be positive");
  }
  scn.tick_rate = R::number(meta, "tick_rate", "meta", 30.0);
  if (!(scn.tick_rate > 0.0)) {
    throw ScenarioError("meta.tick_rate", "must be positive");
  }
  if (R::has(meta, "seed")) {
    const auto & s = meta.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw ScenarioError("meta.seed", "expected a non-negative integer");
    }
    scn.seed = s.get<std::uint64_t>();
  }

  scn.road = detail::read_road(R::field(doc, "road", ""), "road");

  const auto & ego = R::field(doc, "ego", "");
  if (R::has(ego, "id")) {
    scn.ego.id = R::string(ego.at("id"), "ego.id");
  }
  if (R::has(ego, "type")) {
    scn.ego.type = R::string(ego.at("type"), "ego.type");
  }
  if (R::has(ego, "dimension")) {
    scn.ego.dimension = detail::positive_dimension(ego.at("dimension"), "ego.dimension");
  }
  if (R::has(ego, "speed_limit")) {
    scn.ego.speed_limit = R::integer(ego.at("speed_limit"), "ego.speed_limit");
  }
  scn.ego.start_s = R::number(ego, "start_s", "ego", 0.0);
  const auto & ego_segs = R::array(R::field(ego, "segments", "ego"), "ego.segments");
  for (std::size_t i = 0; i < ego_segs.size(); ++i) {
    const std::string p = R::index("ego.segments", i);
    EgoSegment s;
    s.start = R::number(R::field(ego_segs[i], "start", p), p + ".start");
    s.lane = R::lane(R::field(ego_segs[i], "lane", p), p + ".lane");
    detail::check_lane_drivable(scn.road, s.lane, p + ".lane");
    s.speed = R::number(R::field(ego_segs[i], "speed", p), p + ".speed");
    if (R::has(ego_segs[i], "automation")) {
      s.automation = R::boolean(ego_segs[i].at("automation"), p + ".automation");
    }
    scn.ego.segments.push_back(s);
  }
  detail::check_segments(scn.ego.segments, scn.duration, "ego.segments");

  std::set<std::string> ids{scn.ego.id};
  if (R::has(doc, "traffic")) {
    const auto & traffic = R::array(doc.at("traffic"), "traffic");
    for (std::size_t i = 0; i < traffic.size(); ++i) {
      const std::string p = R::index("traffic", i);
      std::vector<TrafficScript> vs;
      if (R::has(traffic[i], "generate")) {
        vs = detail::generate_vehicles(traffic[i].at("generate"), p + ".generate", scn);
      } else {
        vs.push_back(detail::read_vehicle(traffic[i], p, scn));
      }
      for (auto & v : vs) {
        if (!ids.insert(v.id).second) {
          throw ScenarioError(p + ".id", "duplicate vehicle id '" + v.id + "'");
        }
        scn.traffic.push_back(std::move(v));
      }
    }
  }

  if (R::has(doc, "automation")) {
    const auto & a = doc.at("automation");
    if (R::has(a, "takeover_request_onset") && !a.at("takeover_request_onset").is_null()) {
      const double onset = R::number(a.at("takeover_request_onset"), "automation.takeover_request_onset");
      if (onset < 0.0 || onset > scn.duration) {
        throw ScenarioError("automation.takeover_request_onset", "outside [0, duration]");
      }
      scn.automation.takeover_request_onset = onset;
    }
    scn.automation.lead_time = R::number(a, "lead_time", "automation", scn.automation.lead_time);
    if (scn.automation.lead_time < 0.0) {
      throw ScenarioError("automation.lead_time", "must be non-negative");
    }
    if (R::has(a, "criticality_level")) {
      scn.automation.criticality_level = R::integer(a.at("criticality_level"), "automation.criticality_level");
    }
    if (R::has(a, "takeover_reason")) {
      scn.automation.takeover_reason = R::string(a.at("takeover_reason"), "automation.takeover_reason");
    }
  }

  if (R::has(doc, "gaze")) {
    const auto & g = doc.at("gaze");
    const std::string mode = R::has(g, "mode") ? R::string(g.at("mode"), "gaze.mode") : "scripted";
    if (mode == "none") {
      scn.gaze.mode = GazeMode::none;
    } else if (mode == "scripted") {
      scn.gaze.mode = GazeMode::scripted;
    } else if (mode == "full_attention") {
      scn.gaze.mode = GazeMode::full_attention;
    } else {
      throw ScenarioError("gaze.mode", "unknown mode '" + mode + "'");
    }
    scn.gaze_model.tracker_accuracy = R::number(g, "tracker_accuracy", "gaze", scn.gaze_model.tracker_accuracy);
    scn.gaze_model.spread = R::number(g, "spread", "gaze", scn.gaze_model.spread);
    scn.gaze_model.sample_rate = R::number(g, "sample_rate", "gaze", scn.gaze_model.sample_rate);
    try {
      scn.gaze_model.validate();
    } catch (const Error & e) {
      throw ScenarioError("gaze", e.what());
    }
    if (R::has(g, "samples")) {
      const auto & samples = R::array(g.at("samples"), "gaze.samples");
      double last = -1.0;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::string p = R::index("gaze.samples", i);
        GazeSample s;
        s.time = R::number(R::field(samples[i], "time", p), p + ".time");
        if (s.time < 0.0 || s.time > scn.duration) {
          throw ScenarioError(p + ".time", "outside [0, duration]");
        }
        if (!(s.time > last)) {
          throw ScenarioError(p + ".time", "samples must be strictly increasing in time");
        }
        last = s.time;
        if (R::has(samples[i], "direction")) {
          const Vec3 d = R::vec3(samples[i].at("direction"), p + ".direction");
          if (!(d.norm() > 0.0)) {
            throw ScenarioError(p + ".direction", "gaze direction must be non-zero");
          }
          s.direction = d.normalized();
        } else {
          s.target = R::string(R::field(samples[i], "target", p), p + ".target");
          if (ids.count(s.target) == 0 || s.target == scn.ego.id) {
            throw ScenarioError(p + ".target", "unknown vehicle reference '" + s.target + "'");
          }
        }
        scn.gaze.samples.push_back(std::move(s));
      }
    }
  }
  return scn;
}

inline Scenario load_scenario_file(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError(path, "cannot open scenario file");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

namespace detail
{

template <typename Segment>
std::size_t active_segment(const std::vector<Segment> & segs, double time)
{
  std::size_t k = 0;
  while (k + 1 < segs.size() && segs[k + 1].start <= time) {
    ++k;
  }
  return k;
}

/// Longitudinal position under piecewise constant speed.
template <typename Segment>
double integrate_s(double start_s, const std::vector<Segment> & segs, double time)
{
  double s = start_s;
  const std::size_t k = active_segment(segs, time);
  for (std::size_t i = 0; i < k; ++i) {
    s += segs[i].speed * (segs[i + 1].start - segs[i].start);
  }
  return s + segs[k].speed * (time - segs[k].start);
}

inline Vec3 heading_orientation(const RoadFrame & road)
{
  return {0.0, 0.0, std::atan2(road.heading.y(), road.heading.x())};
}

}  // namespace detail

inline bool automation_active(const Scenario & scn, const ScenarioOverrides & ov, std::int64_t tick)
{
  if (ov.manual_from_tick && tick >= *ov.manual_from_tick) {
    return false;
  }
  const double time = static_cast<double>(tick) * scn.dt();
  return scn.ego.segments[detail::active_segment(scn.ego.segments, time)].automation;
}

/// Ground truth at `tick`, fixation fields zeroed. The road reference points
/// into `scn`, which must outlive the frame.
inline SceneFrame step_scenario(const Scenario & scn, std::int64_t tick, const ScenarioOverrides & ov = {})
{
  const Timepoint t = Timepoint::at(tick, scn.dt());
  if (tick < 0 || t.sim_time > scn.duration + 1e-9) {
    throw EndOfScenario("tick " + std::to_string(tick) + " is beyond the scenario duration");
  }
  const RoadFrame & road = scn.road;
  const Vec3 orientation = detail::heading_orientation(road);

  SceneFrame f;
  f.t = t;
  f.road = &scn.road;

  const auto & eseg = scn.ego.segments[detail::active_segment(scn.ego.segments, t.sim_time)];
  f.ego.id = scn.ego.id;
  f.ego.type = scn.ego.type;
  f.ego.current_lane = eseg.lane;
  f.ego.position = road_to_world(
    detail::integrate_s(scn.ego.start_s, scn.ego.segments, t.sim_time), lane_center(eseg.lane, road.lane_width), road);
  f.ego.velocity = eseg.speed * road.heading;
  f.ego.orientation = orientation;
  f.ego.current_speed_limit = scn.ego.speed_limit;
  f.ego.dimension = scn.ego.dimension;

  const bool automation = automation_active(scn, ov, tick);
  f.automation.ego_automation_state = automation;
  f.automation.criticality_level = scn.automation.criticality_level;
  f.automation.takeover_reason = scn.automation.takeover_reason;
  if (const auto & onset = scn.automation.takeover_request_onset) {
    f.automation.takeover_request = automation && t.sim_time >= *onset;
    f.automation.time_until_odd_boundary = std::max(0.0, *onset + scn.automation.lead_time - t.sim_time);
  }

  f.traffic.reserve(scn.traffic.size());
  for (const auto & v : scn.traffic) {
    const auto & seg = v.segments[detail::active_segment(v.segments, t.sim_time)];
    TrafficVehicle tv;
    tv.id = v.id;
    tv.type = v.type;
    tv.lane = seg.lane;
    tv.position =
      road_to_world(detail::integrate_s(v.start_s, v.segments, t.sim_time), lane_center(seg.lane, road.lane_width), road);
    tv.velocity = seg.speed * road.heading;
    tv.orientation = orientation;
    tv.dimension = v.dimension;
    f.traffic.push_back(std::move(tv));
  }
  return f;
}

/// Scripted gaze direction at `time`: the latest sample not after it.
inline std::optional<Vec3> scripted_gaze(const Scenario & scn, const SceneFrame & frame)
{
  const GazeSample * latest = nullptr;
  for (const auto & s : scn.gaze.samples) {
    if (s.time <= frame.t.sim_time + 1e-9) {
      latest = &s;
    }
  }
  if (latest == nullptr) {
    return std::nullopt;
  }
  if (latest->direction) {
    return latest->direction;
  }
  const TrafficVehicle * v = frame.find(latest->target);
  if (v == nullptr) {
    return std::nullopt;
  }
  const Vec3 d = v->position - frame.ego.position;
  return d.norm() > 0.0 ? std::optional<Vec3>(d.normalized()) : std::nullopt;
}

/// Programmatic scenario with `count` random vehicles, used by the benchmark.
inline Scenario make_procedural_scenario(int count, std::uint64_t seed, double duration, double tick_rate = 30.0)
{
  nlohmann::json doc = {
    {"meta", {{"name", "procedural"}, {"duration", duration}, {"tick_rate", tick_rate}, {"seed", seed}}},
    {"road", {{"drivable_lanes", {-3, -2, -1}}, {"lane_width", 3.5}}},
    {"ego",
      {{"segments",
        {{{"start", 0.0}, {"lane", -2}, {"speed", 27.0}, {"automation", true}},
          {{"start", std::min(2.0, duration)}, {"lane", -2}, {"speed", 27.0}, {"automation", false}}}}}},
    {"traffic", {{{"generate", {{"count", count}, {"s_range", {-150.0, 250.0}}, {"speed_range", {22.0, 32.0}}}}}}},
    {"automation", {{"takeover_request_onset", std::min(1.0, duration)}, {"lead_time", 10.0}, {"criticality_level", 2}}},
    {"gaze", {{"mode", "full_attention"}}},
  };
  if (duration <= 2.0) {
    doc["ego"]["segments"].erase(1);
  }
  return load_scenario(doc.dump());
}

}  // namespace situ

#endif  // SITU__SCENARIO_HPP_
