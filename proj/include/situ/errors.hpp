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

#ifndef SITU__ERRORS_HPP_
#define SITU__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace situ
{

/// Base class of every error raised by the engine.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvalidLaneError : public Error
{
public:
  using Error::Error;
};

class InvalidSceneError : public Error
{
public:
  using Error::Error;
};

class NumericError : public Error
{
public:
  using Error::Error;
};

class UnsupportedSideError : public Error
{
public:
  using Error::Error;
};

class DomainConflictError : public Error
{
public:
  using Error::Error;
};

class UnknownTaskError : public Error
{
public:
  using Error::Error;
};

/// Scenario document failed validation. The message carries a path such as
/// `traffic[2].segments[1].lane`.
class ScenarioError : public Error
{
public:
  ScenarioError(std::string path, const std::string & what)
  : Error(path + ": " + what), path_(std::move(path))
  {
  }

  const std::string & path() const noexcept { return path_; }

private:
  std::string path_;
};

class InvalidGazeError : public Error
{
public:
  using Error::Error;
};

/// Raised when a scenario is stepped past its duration.
class EndOfScenario : public Error
{
public:
  using Error::Error;
};

class RangeError : public Error
{
public:
  using Error::Error;
};

class TraceError : public Error
{
public:
  TraceError(std::size_t record_index, const std::string & what)
  : Error("record " + std::to_string(record_index) + ": " + what), record_index_(record_index)
  {
  }

  std::size_t record_index() const noexcept { return record_index_; }

private:
  std::size_t record_index_;
};

}  // namespace situ

#endif  // SITU__ERRORS_HPP_
