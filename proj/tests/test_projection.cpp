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

#include "oracles.hpp"
#include "situ/interpretation.hpp"
#include "situ/projection.hpp"

namespace situ
{
namespace
{

BeliefObject car(const std::string & id, int lane, double s, double len = 5.0)
{
  BeliefObject b;
  b.id = id;
  b.believed_lane = LaneId(lane);
  b.state = Vec4(s, lane_center(LaneId(lane), 3.5), 22.0, 0.0);
  b.dimension = Vec3(len, 1.8, 1.5);
  return b;
}

struct Fixture
{
  RoadFrame road;
  MentalBeliefState mbs;

  explicit Fixture(std::vector<BeliefObject> cars, const std::string & task = tasks::monitor)
  {
    road.drivable_lanes = {LaneId(-2), LaneId(-1)};
    mbs.initialized = true;
    mbs.ego_belief = car("ego", -2, 0.0);
    for (auto & c : cars) {
      mbs.objects.emplace(c.id, c);
    }
    mbs.fluents = initial_fluents({}, mbs);
    mbs.fluents[Term{"curr_task", {}}] = task;
  }

  InterpretationModel im() const
  {
    return build_interpretation_model(mbs, {}, builtin_domain(), Timepoint{}, {}, &road).im;
  }

  ProjectionModel pm() const { return project(im(), mbs, builtin_domain(), Timepoint{}, {}, &road); }
};

std::vector<std::string> events_of(const ProjectionModel & pm)
{
  std::vector<std::string> out;
  for (const auto & p : pm.possible_events) {
    out.push_back(p.event.event.str());
  }
  return out;
}

TEST(BuildInterpretation, EmptyBeliefHasOnlyInitialFluents)
{
  MentalBeliefState mbs;
  const auto im = build_interpretation_model(mbs, {}, builtin_domain(), Timepoint{}).im;
  EXPECT_TRUE(im.relations.empty());
  EXPECT_TRUE(im.gaps.empty());
  EXPECT_TRUE(im.occurred.empty());
  EXPECT_EQ(im.holds, initial_fluents({}, mbs));
}

TEST(BuildInterpretation, EnumeratesBelievedRelations)
{
  const Fixture f({car("t1", -1, -80), car("t2", -1, 30), car("t3", -2, 110)});
  const auto im = f.im();
  ASSERT_EQ(im.relations.size(), 3u);
  EXPECT_EQ(im.relations[0], (ObjectRelations{"t1", RelLong::behind, RelLane{RelLaneValue::left, 1}, 1}));
  EXPECT_EQ(im.relations[1], (ObjectRelations{"t2", RelLong::ahead, RelLane{RelLaneValue::left, 1}, 1}));
  EXPECT_EQ(im.relations[2], (ObjectRelations{"t3", RelLong::ahead, RelLane{RelLaneValue::same, 0}, 1}));
  ASSERT_EQ(im.gaps.size(), 1u);
  EXPECT_EQ(im.gaps[0].rear_id, "t1");
  EXPECT_DOUBLE_EQ(im.gaps[0].size, 105.0);
}

TEST(BuildInterpretation, UnbelievedVehicleIsAbsent)
{
  // Ground truth may contain t9; the belief does not, so neither does the model.
  const Fixture f({car("t1", -1, 40)});
  for (const auto & r : f.im().relations) {
    EXPECT_NE(r.id, "t9");
  }
  EXPECT_EQ(f.im().holds.count(Term{"on_lane", {"t9"}}), 0u);
}

TEST(Project, NoManeuverTaskMeansEmpty)
{
  EXPECT_TRUE(Fixture({}, tasks::build_sit_aware).pm().possible_events.empty());
  EXPECT_TRUE(Fixture({}, tasks::monitor).pm().possible_events.empty());
}

TEST(Project, EmptyTargetLane)
{
  const auto pm = Fixture({}, tasks::change_lane).pm();
  EXPECT_EQ(events_of(pm), std::vector<std::string>{"change_lane(ego,-2,-1,empty_lane)"});
  EXPECT_EQ(pm.possible_events[0].location.kind, LocationKind::empty_lane);
}

TEST(Project, GapPlusHalfSpans)
{
  const auto pm = Fixture({car("a", -1, -20), car("b", -1, 30)}, tasks::change_lane).pm();
  EXPECT_EQ(events_of(pm), (std::vector<std::string>{
                             "change_lane(ego,-2,-1,behind(a))", "change_lane(ego,-2,-1,gap(a,b))",
                             "change_lane(ego,-2,-1,ahead_of(b))"}));
}

TEST(Project, UnknownTaskRaises)
{
  const Fixture f({}, "park");
  const auto im = f.im();
  EXPECT_THROW(project(im, f.mbs, builtin_domain(), Timepoint{}), UnknownTaskError);
}

TEST(Project, DependsOnlyOnBelief)
{
  // Two belief states that differ only in a vehicle the driver never saw
  // on lane -1: the projection tracks the belief, not the world.
  const Fixture seen({car("a", -1, 5)}, tasks::change_lane);
  const Fixture unseen({}, tasks::change_lane);
  EXPECT_EQ(events_of(seen.pm()), (std::vector<std::string>{
                                   "change_lane(ego,-2,-1,behind(a))", "change_lane(ego,-2,-1,ahead_of(a))"}));
  EXPECT_EQ(events_of(unseen.pm()), std::vector<std::string>{"change_lane(ego,-2,-1,empty_lane)"});
}

TEST(ProjectProperty, MatchesBruteForceOnRandomScenes)
{
  std::mt19937_64 rng(4321);
  const auto domain = builtin_domain();
  const LocationParams params;
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto scene = oracle::random_scene(rng);
    const auto im = build_interpretation_model(scene.mbs, {}, domain, Timepoint{}, params, &scene.road).im;
    const auto pm = project(im, scene.mbs, domain, Timepoint{}, params, &scene.road);
    std::vector<oracle::Candidate> got;
    for (const auto & p : pm.possible_events) {
      got.push_back({p.event.event.str(), p.location.s_min, p.location.s_max});
      // Soundness: target lane adjacent and location exists there.
      const LaneId target = p.location.lane;
      mismatches += !lane_adjacent(scene.mbs.ego_belief.believed_lane, target);
    }
    std::sort(got.begin(), got.end());
    const auto expected = oracle::project(scene.task, "ego", scene.mbs.ego_belief.believed_lane.value(),
      scene.mbs.ego_belief.s(), oracle::cars_of(scene.mbs), {-3, -2, -1}, params.min_gap, params.sensor_range);
    mismatches += got != expected;
  }
  EXPECT_EQ(mismatches, 0);
}

}  // namespace
}  // namespace situ
