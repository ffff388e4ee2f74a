// Copyright 2026 The BQM Authors
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

#pragma once

#include <algorithm>
#include <cmath>

namespace bqm::detail {

inline double time_slack(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

inline bool same_time(double a, double b) { return std::abs(a - b) <= time_slack(std::max(std::abs(a), std::abs(b))); }

}  // namespace bqm::detail
