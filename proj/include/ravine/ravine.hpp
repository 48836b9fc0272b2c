// Copyright 2026 The ravine Authors
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

#ifndef RAVINE_RAVINE_HPP_
#define RAVINE_RAVINE_HPP_

#include "ravine/config.hpp"
#include "ravine/core.hpp"
#include "ravine/errors.hpp"
#include "ravine/experiment.hpp"
#include "ravine/io.hpp"
#include "ravine/linalg.hpp"
#include "ravine/lyapunov.hpp"
#include "ravine/noise.hpp"
#include "ravine/ode.hpp"
#include "ravine/problems.hpp"
#include "ravine/schedules.hpp"

#endif  // RAVINE_RAVINE_HPP_
