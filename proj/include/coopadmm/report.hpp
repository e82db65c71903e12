/*
 * Copyright 2026 The coopadmm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef COOPADMM_REPORT_HPP
#define COOPADMM_REPORT_HPP

#include <string>

#include "coopadmm/scenario.hpp"

namespace coopadmm {

/// Shortest round-trippable decimal form of a double ("%.17g").
std::string format_double(double value);

// CSV bodies (header row included). All floating-point fields use
// format_double so files re-parse to the exact bits that were written.
std::string trajectories_csv(const ExperimentReport &report);
std::string distances_csv(const ExperimentReport &report);
std::string summary_csv_header();
std::string summary_csv_row(const ExperimentReport &report);

// Plots.
std::string fan_svg(const ExperimentReport &report);
std::string snapshots_svg(const ExperimentReport &report);
std::string distances_svg(const ExperimentReport &report);

/// Writes trajectories.csv, distances.csv, summary.csv, fan.svg,
/// snapshots.svg, distances.svg, and config.json into out_dir (created if
/// missing).
void emit_outputs(const ExperimentReport &report, const std::string &out_dir);

} // namespace coopadmm

#endif // COOPADMM_REPORT_HPP
