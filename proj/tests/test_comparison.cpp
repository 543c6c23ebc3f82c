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

#include <gtest/gtest.h>

#include <random>

#include "situ/belief.hpp"
#include "situ/comparison.hpp"

namespace situ
{
namespace
{

struct World
{
  RoadFrame road;
  SceneFrame frame;
  MentalBeliefState mbs;
  InterpretationModel im;

  World()
  {
    road.drivable_lanes = {LaneId(-3), LaneId(-2), LaneId(-1)};
    frame.road = &road;
    frame.t = Timepoint::at(300, 1.0 / 30.0);
    frame.ego.current_lane = LaneId(-2);
    frame.ego.position = Vec3(0.0, -5.25, 0.0);
    frame.ego.velocity = Vec3(25.0, 0.0, 0.0);
    mbs.initialized = true;
    mbs.ego_belief = belief_from_ego(frame.ego, road, frame.t);
    im.holds[Term{"audio_signal", {}}] = kFalse;
  }

  TrafficVehicle & add(const std::string & id, int lane, double s)
  {
    TrafficVehicle v;
    v.id = id;
    v.lane = LaneId(lane);
    v.position = Vec3(s, lane_center(LaneId(lane), road.lane_width), 0.0);
    frame.traffic.push_back(v);
    return frame.traffic.back();
  }

  BeliefObject & believe(const TrafficVehicle & v, double fixated_at = 10.0)
  {
    BeliefObject b;
    b.id = v.id;
    b.state = measurement_of(v, road);
    b.believed_lane = v.lane;
    b.dimension = v.dimension;
    b.last_fixation_tick = Timepoint{0, fixated_at};
    return mbs.objects[v.id] = b;
  }
};

TEST(ComputeDivergences, ExactBeliefIsQuiet)
{
  World w;
  w.believe(w.add("a", -1, 40));
  w.believe(w.add("b", -3, -20));
  EXPECT_TRUE(compute_divergences(w.mbs, w.im, w.frame, {}).empty());
}

TEST(ComputeDivergences, NeverFixatedIsMissing)
{
  World w;
  w.add("a", -1, 40);
  const auto divs = compute_divergences(w.mbs, w.im, w.frame, {});
  ASSERT_EQ(divs.size(), 1u);
  EXPECT_EQ(divs[0].kind, DivergenceKind::missing_object);
  EXPECT_EQ(divs[0].object_id, "a");
  EXPECT_EQ(divs[0].magnitude, 1.0);
}

TEST(ComputeDivergences, PositionMagnitudeIsDistanceOverTolerance)
{
  World w;
  auto & b = w.believe(w.add("a", -2, 104));
  b.state(0) = 100.0;
  const auto divs = compute_divergences(w.mbs, w.im, w.frame, {});
  ASSERT_EQ(divs.size(), 1u);
  EXPECT_EQ(divs[0].kind, DivergenceKind::position_divergence);
  EXPECT_DOUBLE_EQ(divs[0].magnitude, 2.0);
  EXPECT_DOUBLE_EQ(divs[0].staleness, w.frame.t.sim_time - 10.0);
}

TEST(ComputeDivergences, LaneAndSignal)
{
  World w;
  auto & b = w.believe(w.add("a", -1, 60));
  b.believed_lane = LaneId(-2);
  w.frame.automation.takeover_request = true;
  w.frame.automation.criticality_level = 2;
  const auto divs = compute_divergences(w.mbs, w.im, w.frame, {});
  ASSERT_EQ(divs.size(), 2u);
  EXPECT_EQ(divs[0].kind, DivergenceKind::missed_takeover_signal);
  EXPECT_EQ(divs[0].magnitude, 2.0);
  EXPECT_EQ(divs[1].kind, DivergenceKind::lane_divergence);

  w.im.holds[Term{"audio_signal", {}}] = kTrue;
  EXPECT_EQ(compute_divergences(w.mbs, w.im, w.frame, {}).size(), 1u);
}

TEST(ComputeDivergences, OutOfRangeIgnored)
{
  World w;
  w.add("far", -1, 151);
  EXPECT_TRUE(compute_divergences(w.mbs, w.im, w.frame, {}).empty());
}

TEST(Relevance, Examples)
{
  World w;
  w.add("anchor", -3, 120);
  w.add("far", -3, 75);
  w.add("gone", -3, 200);
  w.add("near", -1, 30);
  ProjectionModel pm;
  ProjectedEvent pe;
  pe.location.anchors = {"anchor"};
  pm.possible_events.push_back(pe);
  const ComparisonParams params;
  const auto rel = [&](const std::string & id) {
    return relevance({DivergenceKind::missing_object, id}, pm, w.frame, params);
  };
  EXPECT_EQ(rel("anchor"), 1.0);
  EXPECT_DOUBLE_EQ(rel("far"), 0.5);
  EXPECT_EQ(rel("gone"), 0.0);
  EXPECT_EQ(rel("near"), 1.0);
  EXPECT_EQ(relevance({DivergenceKind::missed_takeover_signal}, pm, w.frame, params), 1.0);
}

TEST(Prioritize, Examples)
{
  EXPECT_TRUE(prioritize({}).items.empty());

  const auto ties = prioritize({{DivergenceKind::missing_object, "b"}, {DivergenceKind::missing_object, "a"}});
  EXPECT_EQ(ties.items[0].object_id, "a");
  EXPECT_EQ(ties.items[1].object_id, "b");

  std::vector<Divergence> divs(3);
  divs[0].priority = 0.2;
  divs[1].priority = 0.9;
  divs[2].priority = 0.5;
  const auto sorted = prioritize(divs);
  EXPECT_EQ(sorted.items[0].priority, 0.9);
  EXPECT_EQ(sorted.items[1].priority, 0.5);
  EXPECT_EQ(sorted.items[2].priority, 0.2);
}

TEST(Prioritize, KindRankBreaksTies)
{
  const auto r = prioritize({{DivergenceKind::position_divergence, "a"}, {DivergenceKind::missed_takeover_signal, ""},
    {DivergenceKind::lane_divergence, "a"}, {DivergenceKind::missing_object, "z"}});
  EXPECT_EQ(r.items[0].kind, DivergenceKind::missed_takeover_signal);
  EXPECT_EQ(r.items[1].kind, DivergenceKind::missing_object);
  EXPECT_EQ(r.items[2].kind, DivergenceKind::lane_divergence);
  EXPECT_EQ(r.items[3].kind, DivergenceKind::position_divergence);
}

TEST(ComparisonProperty, EveryVehicleInRangeIsCovered)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> s(-200.0, 200.0);
  std::uniform_int_distribution<int> lane(-3, -1);
  std::bernoulli_distribution known(0.5);
  for (int scene = 0; scene < 500; ++scene) {
    World w;
    for (int i = 0; i < 8; ++i) {
      auto & v = w.add("v" + std::to_string(i), lane(rng), s(rng));
      if (known(rng)) {
        w.believe(v).state(0) += s(rng) / 50.0;
      }
    }
    const auto divs = compute_divergences(w.mbs, w.im, w.frame, {});
    for (const auto & v : w.frame.traffic) {
      const bool in_range = std::abs(v.position.x()) <= 150.0;
      const auto missing = std::count_if(divs.begin(), divs.end(), [&](const Divergence & d) {
        return d.kind == DivergenceKind::missing_object && d.object_id == v.id;
      });
      if (!in_range) {
        EXPECT_EQ(std::count_if(divs.begin(), divs.end(), [&](const Divergence & d) { return d.object_id == v.id; }), 0);
      } else {
        EXPECT_EQ(missing, w.mbs.contains(v.id) ? 0 : 1);
      }
    }
  }
}

TEST(ComparisonProperty, StalenessNeverLowersPriority)
{
  const ComparisonParams params;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    Divergence d{DivergenceKind::position_divergence, "a", 3.0 * u(rng), 15.0 * u(rng), u(rng)};
    const double before = priority_of(d, params);
    d.staleness += 5.0 * u(rng);
    EXPECT_GE(priority_of(d, params), before);
  }
}

TEST(ComparisonProperty, NoiselessFullAttentionHasNoDivergence)
{
  RoadFrame road;
  road.drivable_lanes = {LaneId(-2), LaneId(-1)};
  TrackerParams params;
  MentalBeliefState mbs;
  for (int tick = 0; tick < 300; ++tick) {
    SceneFrame frame;
    frame.road = &road;
    frame.t = Timepoint::at(tick, params.dt);
    frame.ego.current_lane = LaneId(-2);
    frame.ego.position = Vec3(25.0 * frame.t.sim_time, -5.25, 0.0);
    for (int i = 0; i < 4; ++i) {
      TrafficVehicle v;
      v.id = "v" + std::to_string(i);
      v.lane = LaneId(i % 2 == 0 ? -1 : -2);
      v.velocity = Vec3(20.0 + i, 0.0, 0.0);
      v.position = Vec3(-60.0 + 40.0 * i + v.velocity.x() * frame.t.sim_time, lane_center(v.lane, 3.5), 0.0);
      v.fixation_probability = 1.0;
      frame.traffic.push_back(v);
    }
    mbs = belief_tick(mbs, frame, params);
    InterpretationModel im;
    const auto divs = compute_divergences(mbs, im, frame, {});
    ASSERT_TRUE(divs.empty()) << "tick " << tick << ": " << to_string(divs[0].kind);
  }
}

}  // namespace
}  // namespace situ
