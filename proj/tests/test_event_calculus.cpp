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

#include <fstream>
#include <random>
#include <sstream>

#include "situ/event_calculus.hpp"

namespace situ
{
namespace
{

const Term kTask{"curr_task", {}};
const Term kAutomation{"automation", {}};
const Term kAudio{"audio_signal", {}};

MentalBeliefState ego_only(int lane = -2)
{
  MentalBeliefState mbs;
  mbs.initialized = true;
  mbs.ego_belief.id = "ego";
  mbs.ego_belief.believed_lane = LaneId(lane);
  mbs.ego_belief.state = Vec4(0.0, lane_center(LaneId(lane), 3.5), 25.0, 0.0);
  return mbs;
}

std::vector<std::string> names(const std::vector<EventOccurrence> & occ)
{
  std::vector<std::string> out;
  for (const auto & o : occ) {
    out.push_back(o.event.str());
  }
  return out;
}

TEST(EcStep, TakeoverManualSwitchesTask)
{
  const auto domain = builtin_domain();
  const auto mbs = ego_only();
  SensedState sensed;
  auto fluents = initial_fluents(sensed, mbs);
  ASSERT_EQ(fluents.at(kAutomation), kTrue);
  sensed.ego_automation_state = false;
  const auto step = ec_step(fluents, sensed, mbs, domain, Timepoint::at(10, 0.1));
  EXPECT_EQ(names(step.occurred), std::vector<std::string>{"takeover_manual"});
  EXPECT_EQ(step.next.at(kTask), tasks::change_lane);
  EXPECT_EQ(step.next.at(kAutomation), kFalse);
  // Holds at t is untouched.
  EXPECT_EQ(fluents.at(kAutomation), kTrue);
}

TEST(EcStep, TakeoverAutomationIsSymmetric)
{
  const auto domain = builtin_domain();
  const auto mbs = ego_only();
  SensedState sensed;
  sensed.ego_automation_state = false;
  auto fluents = initial_fluents(sensed, mbs);
  fluents[kTask] = tasks::change_lane;
  sensed.ego_automation_state = true;
  const auto step = ec_step(fluents, sensed, mbs, domain, Timepoint::at(3, 0.1));
  EXPECT_EQ(names(step.occurred), std::vector<std::string>{"takeover_automation"});
  EXPECT_EQ(step.next.at(kAutomation), kTrue);
  EXPECT_EQ(step.next.at(kTask), tasks::monitor);
}

TEST(EcStep, InertiaOverQuietTicks)
{
  const auto domain = builtin_domain();
  const auto mbs = ego_only();
  const SensedState sensed;
  const auto start = initial_fluents(sensed, mbs);
  auto fluents = start;
  for (int tick = 0; tick < 100; ++tick) {
    auto step = ec_step(fluents, sensed, mbs, domain, Timepoint::at(tick, 0.1));
    ASSERT_TRUE(step.occurred.empty());
    fluents = std::move(step.next);
  }
  EXPECT_EQ(fluents, start);
}

TEST(EcStep, AudioSignalFollowsTakeoverRequest)
{
  const auto domain = builtin_domain();
  const auto mbs = ego_only();
  SensedState sensed;
  auto fluents = initial_fluents(sensed, mbs);
  std::map<int, std::vector<std::string>> occurred;
  std::map<int, std::string> audio;
  for (int tick = 0; tick < 80; ++tick) {
    sensed.takeover_request = tick >= 40 && tick < 60;
    audio[tick] = fluents.at(kAudio);
    auto step = ec_step(fluents, sensed, mbs, domain, Timepoint::at(tick, 0.1));
    if (!step.occurred.empty()) {
      occurred[tick] = names(step.occurred);
    }
    fluents = std::move(step.next);
  }
  const std::map<int, std::vector<std::string>> expected{{40, {"audio_signal_start"}}, {60, {"audio_signal_end"}}};
  EXPECT_EQ(occurred, expected);
  EXPECT_EQ(audio[40], kFalse);
  EXPECT_EQ(audio[41], kTrue);
  EXPECT_EQ(audio[60], kTrue);
  EXPECT_EQ(audio[61], kFalse);
}

TEST(EcStep, SimultaneousConflictNamesEvents)
{
  const auto domain = builtin_domain();
  const auto mbs = ego_only();
  SensedState sensed;
  const auto fluents = initial_fluents(sensed, mbs);
  sensed.takeover_request = true;
  sensed.ego_automation_state = false;
  try {
    ec_step(fluents, sensed, mbs, domain, Timepoint::at(7, 0.1));
    FAIL() << "expected a conflict";
  } catch (const DomainConflictError & e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("curr_task"), std::string::npos);
    EXPECT_NE(what.find("audio_signal_start"), std::string::npos);
    EXPECT_NE(what.find("takeover_manual"), std::string::npos);
  }
}

TEST(EcStep, IncompleteFluentsRejected)
{
  const auto domain = builtin_domain();
  const auto mbs = ego_only();
  auto fluents = initial_fluents({}, mbs);
  fluents.erase(kAudio);
  EXPECT_THROW(ec_step(fluents, {}, mbs, domain, Timepoint{}), Error);
}

TEST(EcStep, DetectsBelievedLaneChange)
{
  const auto domain = builtin_domain();
  auto mbs = ego_only();
  BeliefObject other;
  other.id = "t1";
  other.believed_lane = LaneId(-1);
  other.state = Vec4(-40.0, -1.75, 25.0, 0.0);
  mbs.objects.emplace(other.id, other);
  auto fluents = initial_fluents({}, mbs);

  mbs.ego_belief.believed_lane = LaneId(-1);
  mbs.ego_belief.state(1) = -1.75;
  const auto step = ec_step(fluents, {}, mbs, domain, Timepoint::at(5, 0.1));
  EXPECT_EQ(names(step.occurred), std::vector<std::string>{"change_lane(ego,-2,-1,ahead_of(t1))"});
  EXPECT_EQ(step.next.at(Term{"on_lane", {"ego"}}), "-1");
  EXPECT_EQ(step.next.at(Term{"on_lane", {"t1"}}), "-1");
}

TEST(EcStep, FunctionalFluentsUnderRandomSchedules)
{
  const auto domain = builtin_domain();
  const auto mbs = ego_only();
  std::mt19937_64 rng(8);
  std::bernoulli_distribution flip(0.05);
  for (int schedule = 0; schedule < 200; ++schedule) {
    SensedState sensed;
    auto fluents = initial_fluents(sensed, mbs);
    for (int tick = 0; tick < 200; ++tick) {
      if (flip(rng)) {
        sensed.takeover_request = !sensed.takeover_request;
      } else if (flip(rng)) {
        sensed.ego_automation_state = !sensed.ego_automation_state;
      }
      EcStepResult step;
      try {
        step = ec_step(fluents, sensed, mbs, domain, Timepoint::at(tick, 0.1));
      } catch (const DomainConflictError &) {
        continue;  // inertia fallback
      }
      std::set<std::string> touched;
      for (const auto & o : step.occurred) {
        for (const auto & e : domain.events[domain.event_rank(o.event.name)].effects) {
          touched.insert(e.fluent.name);
        }
      }
      for (const auto & decl : domain.fluents) {
        if (!decl.params.empty()) {
          continue;
        }
        const Term f{decl.name, {}};
        ASSERT_EQ(step.next.count(f), 1u);
        if (!decl.values.empty()) {
          EXPECT_NE(std::find(decl.values.begin(), decl.values.end(), step.next.at(f)), decl.values.end());
        }
        if (touched.count(decl.name) == 0) {
          EXPECT_EQ(step.next.at(f), fluents.at(f)) << decl.name << " at " << tick;
        }
      }
      fluents = std::move(step.next);
    }
  }
}

std::string read_file(const std::string & path)
{
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

TEST(Domain, DumpMatchesGolden)
{
  EXPECT_EQ(builtin_domain().dump(), read_file(std::string(SITU_GOLDEN_DIR) + "/domain.txt"));
}

TEST(Domain, CoversTakeoverEvents)
{
  const auto domain = builtin_domain();
  std::vector<std::string> events;
  for (const auto & e : domain.events) {
    events.push_back(e.pattern.name);
  }
  EXPECT_EQ(events, (std::vector<std::string>{
                      "change_lane", "audio_signal_start", "audio_signal_end", "takeover_manual",
                      "takeover_automation"}));
}

TEST(Domain, ValidateRejectsUndeclaredFluent)
{
  auto domain = builtin_domain();
  domain.events[1].effects.push_back({EffectKind::initiates, Term{"horn", {}}, kTrue});
  EXPECT_THROW(domain.validate(), Error);

  auto arity = builtin_domain();
  arity.task_goals["park"] = Term{"on_lane", {}};
  EXPECT_THROW(arity.validate(), Error);
}

}  // namespace
}  // namespace situ
