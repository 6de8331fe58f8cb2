// Copyright 2026 The SwinScan Authors
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

#pragma once

#include <string>
#include <vector>

#include "swinscan/metrics.hpp"
#include "swinscan/train.hpp"

namespace swinscan::report {

/// Accuracy, precision, recall and F1 against epoch: one <polyline> per
/// measure, one point per epoch with a defined value. Empty history
/// throws InputError.
std::string epoch_chart_svg(const std::vector<train::EpochMetrics>& history);

/// One <rect> bar per row with a numeric accuracy, in row order; the last
/// bar is drawn in the highlight colour. Each bar carries its value in a
/// data-value attribute with two decimals.
std::string comparison_chart_svg(const std::vector<metrics::ComparisonRow>& rows);

}  // namespace swinscan::report
