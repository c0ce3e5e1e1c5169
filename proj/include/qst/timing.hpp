// Copyright 2026 The qstmle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Wall-clock helpers for the scaling sweeps.
 */
#pragma once

#include <functional>
#include <span>

namespace qst {

/// Median seconds per call over `repeats` batches, each batch running `fn`
/// until at least `min_batch_seconds` have elapsed.
double seconds_per_call(const std::function<void()>& fn, int repeats = 5,
                        double min_batch_seconds = 0.05);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

} // namespace qst
