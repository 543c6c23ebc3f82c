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

#ifndef SITU__FLUENTS_HPP_
#define SITU__FLUENTS_HPP_

#include <map>
#include <string>
#include <vector>

#include "situ/scene.hpp"

namespace situ
{

/// Ground or non-ground term: a name plus argument symbols. Arguments starting
/// with an upper-case letter are variables when the term appears in a rule.
struct Term
{
  std::string name;
  std::vector<std::string> args;

  auto operator<=>(const Term &) const = default;
  bool operator==(const Term &) const = default;

  std::string str() const
  {
    if (args.empty()) {
      return name;
    }
    std::string out = name + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
      out += (i ? "," : "") + args[i];
    }
    return out + ")";
  }
};

inline bool is_variable(const std::string & symbol)
{
  return !symbol.empty() && symbol[0] >= 'A' && symbol[0] <= 'Z';
}

inline const std::string kTrue = "true";
inline const std::string kFalse = "false";

inline const std::string & bool_symbol(bool v) { return v ? kTrue : kFalse; }

/// holds_at(f, v, t) for a single t: one value per ground fluent term.
using FluentStore = std::map<Term, std::string>;

struct FluentAssignment
{
  Term fluent;
  std::string value;
  Timepoint t;

  bool operator==(const FluentAssignment &) const = default;
};

struct EventOccurrence
{
  Term event;
  Timepoint t;

  bool operator==(const EventOccurrence &) const = default;
};

inline std::vector<FluentAssignment> assignments_at(const FluentStore & store, Timepoint t)
{
  std::vector<FluentAssignment> out;
  out.reserve(store.size());
  for (const auto & [term, value] : store) {
    out.push_back({term, value, t});
  }
  return out;
}

}  // namespace situ

#endif  // SITU__FLUENTS_HPP_
