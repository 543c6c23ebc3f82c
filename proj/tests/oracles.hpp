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

// Brute-force reference implementations for the relational layer. These
// deliberately avoid the library's sorting and neighbour logic.

#ifndef SITU_TESTS__ORACLES_HPP_
#define SITU_TESTS__ORACLES_HPP_

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "situ/situ.hpp"

namespace situ::oracle
{

/// Closed interval intersection of the two longitudinal footprints.
inline std::string rel_long(double ego_s, double ego_len, double obj_s, double obj_len)
{
  const double e_lo = ego_s - ego_len / 2.0;
  const double e_hi = ego_s + ego_len / 2.0;
  const double o_lo = obj_s - obj_len / 2.0;
  const double o_hi = obj_s + obj_len / 2.0;
  if (o_lo <= e_hi && e_lo <= o_hi) {
    return "overlapping";
  }
  return o_lo > e_hi ? "ahead" : "behind";
}

/// Walks lane by lane from the ego lane until the object lane is reached.
inline std::pair<std::string, int> rel_lane(int ego_lane, int obj_lane)
{
  if (ego_lane == obj_lane) {
    return {"same", 0};
  }
  for (int steps = 1; steps <= 16; ++steps) {
    if (ego_lane + steps == obj_lane) {
      return {"left", steps};
    }
    if (ego_lane - steps == obj_lane) {
      return {"right", steps};
    }
  }
  return {"unreachable", -1};
}

struct Car
{
  std::string id;
  int lane;
  double s;
  double len;
};

inline std::vector<Car> cars_of(const MentalBeliefState & mbs)
{
  std::vector<Car> out;
  for (const auto & [id, b] : mbs.objects) {
    out.push_back({id, b.believed_lane.value(), b.s(), b.length()});
  }
  return out;
}

inline int rel_order(const Car & ego, const Car & obj, const std::vector<Car> & cars)
{
  int n = 0;
  for (const auto & c : cars) {
    if (c.id == obj.id || c.lane != obj.lane) {
      continue;
    }
    const bool between = (c.s > ego.s && c.s < obj.s) || (c.s < ego.s && c.s > obj.s);
    n += between ? 1 : 0;
  }
  return n + 1;
}

/// (s, id) strict order used to break exact position ties.
inline bool before(const Car & a, const Car & b) { return std::tie(a.s, a.id) < std::tie(b.s, b.id); }

struct Gap
{
  std::string rear;
  std::string front;
  int lane;
  double size;

  bool operator==(const Gap &) const = default;
  bool operator<(const Gap & o) const { return std::tie(lane, rear, front) < std::tie(o.lane, o.rear, o.front); }
};

/// All ordered same-lane pairs with no third vehicle between them.
inline std::vector<Gap> gaps(const std::vector<Car> & cars)
{
  std::vector<Gap> out;
  for (const auto & a : cars) {
    for (const auto & b : cars) {
      if (a.id == b.id || a.lane != b.lane || !before(a, b)) {
        continue;
      }
      bool blocked = false;
      for (const auto & c : cars) {
        if (c.id != a.id && c.id != b.id && c.lane == a.lane && before(a, c) && before(c, b)) {
          blocked = true;
        }
      }
      if (!blocked) {
        out.push_back({a.id, b.id, a.lane, std::max(0.0, b.s - a.s - (a.len + b.len) / 2.0)});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct Location
{
  std::string label;
  double s_min;
  double s_max;

  bool operator==(const Location &) const = default;
};

/// Free locations built from the gap oracle plus the outermost vehicles.
inline std::vector<Location> free_locations(
  const std::vector<Car> & cars, int lane, double ego_s, double min_gap, double range)
{
  const Car * rear = nullptr;
  const Car * front = nullptr;
  for (const auto & c : cars) {
    if (c.lane != lane) {
      continue;
    }
    if (rear == nullptr || before(c, *rear)) {
      rear = &c;
    }
    if (front == nullptr || before(*front, c)) {
      front = &c;
    }
  }
  if (rear == nullptr) {
    return {{"empty_lane", ego_s - range, ego_s + range}};
  }
  std::vector<Location> out;
  const double behind_hi = rear->s - rear->len / 2.0;
  if (behind_hi - (ego_s - range) >= min_gap) {
    out.push_back({"behind(" + rear->id + ")", ego_s - range, behind_hi});
  }
  for (const auto & g : gaps(cars)) {
    if (g.lane != lane || g.size < min_gap) {
      continue;
    }
    double lo = 0.0;
    double hi = 0.0;
    for (const auto & c : cars) {
      if (c.id == g.rear) {
        lo = c.s + c.len / 2.0;
      }
      if (c.id == g.front) {
        hi = c.s - c.len / 2.0;
      }
    }
    out.push_back({"gap(" + g.rear + "," + g.front + ")", lo, hi});
  }
  const double ahead_lo = front->s + front->len / 2.0;
  if ((ego_s + range) - ahead_lo >= min_gap) {
    out.push_back({"ahead_of(" + front->id + ")", ahead_lo, ego_s + range});
  }
  return out;
}

struct Candidate
{
  std::string event;
  double s_min;
  double s_max;

  bool operator==(const Candidate &) const = default;
  bool operator<(const Candidate & o) const { return event < o.event; }
};

/// Every adjacent drivable lane times every free location on it.
inline std::vector<Candidate> project(
  const std::string & task, const std::string & ego_id, int ego_lane, double ego_s, const std::vector<Car> & cars,
  const std::vector<int> & drivable, double min_gap, double range)
{
  std::vector<Candidate> out;
  if (task != "change_lane") {
    return out;
  }
  for (int lane : drivable) {
    const bool adjacent = (lane == ego_lane + 1 || lane == ego_lane - 1) && lane != 0 && ((lane > 0) == (ego_lane > 0));
    if (!adjacent) {
      continue;
    }
    for (const auto & loc : free_locations(cars, lane, ego_s, min_gap, range)) {
      out.push_back({"change_lane(" + ego_id + "," + std::to_string(ego_lane) + "," + std::to_string(lane) + "," +
                       loc.label + ")",
        loc.s_min, loc.s_max});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Random believed scene: up to six vehicles on lanes -3..-1. Positions are
/// quantized to 0.5 m so that contact and tie cases actually occur.
struct RandomScene
{
  RoadFrame road;
  MentalBeliefState mbs;
  std::string task;
};

inline RandomScene random_scene(std::mt19937_64 & rng)
{
  RandomScene scene;
  scene.road.drivable_lanes = {LaneId(-3), LaneId(-2), LaneId(-1)};
  std::uniform_int_distribution<int> lane_dist(-3, -1);
  std::uniform_int_distribution<int> count_dist(0, 6);
  std::uniform_int_distribution<int> s_dist(-160, 160);
  std::uniform_int_distribution<int> len_dist(8, 24);
  std::uniform_int_distribution<int> task_dist(0, 2);

  const std::string tasks[] = {"monitor", "build_sit_aware", "change_lane"};
  scene.task = tasks[task_dist(rng)];

  auto & mbs = scene.mbs;
  mbs.initialized = true;
  mbs.ego_belief.id = "ego";
  mbs.ego_belief.believed_lane = LaneId(lane_dist(rng));
  mbs.ego_belief.state = Vec4(0.5 * s_dist(rng), lane_center(mbs.ego_belief.believed_lane, 3.5), 25.0, 0.0);
  mbs.ego_belief.dimension = Vec3(0.5 * len_dist(rng), 1.9, 1.5);

  const int n = count_dist(rng);
  for (int i = 0; i < n; ++i) {
    BeliefObject b;
    b.id = "v" + std::to_string(i);
    b.believed_lane = LaneId(lane_dist(rng));
    b.state = Vec4(mbs.ego_belief.s() + 0.5 * s_dist(rng), lane_center(b.believed_lane, 3.5), 20.0, 0.0);
    b.dimension = Vec3(0.5 * len_dist(rng), 1.8, 1.5);
    mbs.objects.emplace(b.id, b);
  }
  mbs.fluents = initial_fluents(SensedState{}, mbs);
  mbs.fluents[Term{"curr_task", {}}] = scene.task;
  return scene;
}

}  // namespace situ::oracle

#endif  // SITU_TESTS__ORACLES_HPP_
