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

#ifndef SITU__SITU_HPP_
#define SITU__SITU_HPP_

#include "situ/belief.hpp"
#include "situ/comparison.hpp"
#include "situ/domain.hpp"
#include "situ/errors.hpp"
#include "situ/event_calculus.hpp"
#include "situ/fluents.hpp"
#include "situ/gaze.hpp"
#include "situ/interpretation.hpp"
#include "situ/kalman.hpp"
#include "situ/projection.hpp"
#include "situ/relations.hpp"
#include "situ/scenario.hpp"
#include "situ/scene.hpp"
#include "situ/session.hpp"
#include "situ/trace.hpp"

#endif  // SITU__SITU_HPP_
