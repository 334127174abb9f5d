/*
 * Copyright 2026 the qscore authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qscore/forecast.hpp"

namespace qscore {

// Delimited text formats (comma, header required, UTF-8, '.' decimal point):
//   quantile: model,forecast_date,target,target_end_date,location,type,quantile,value
//             with type in {point, quantile}; quantile empty on point rows
//   binned:   model,forecast_date,target,target_end_date,location,bin_start,bin_end,prob
//   truth:    location,target,target_end_date,value
// Numbers are written with enough digits to round-trip bit-exactly.

std::vector<QuantileForecast> parse_hub_quantile_file(std::istream& in);
std::vector<QuantileForecast> parse_hub_quantile_file(const std::string& path);
void write_hub_quantile_file(std::ostream& out, const std::vector<QuantileForecast>& forecasts);
void write_hub_quantile_file(const std::string& path, const std::vector<QuantileForecast>& forecasts);

std::vector<BinnedForecast> parse_binned_file(std::istream& in);
std::vector<BinnedForecast> parse_binned_file(const std::string& path);
void write_binned_file(std::ostream& out, const std::vector<BinnedForecast>& forecasts);
void write_binned_file(const std::string& path, const std::vector<BinnedForecast>& forecasts);

std::vector<Observation> parse_truth_file(std::istream& in);
std::vector<Observation> parse_truth_file(const std::string& path);
void write_truth_file(std::ostream& out, const std::vector<Observation>& observations);

/// A forecast joined with its observed outcome.
template <typename Forecast>
struct ScoredPair {
    Forecast forecast;
    double observed;
};

using QuantilePair = ScoredPair<QuantileForecast>;
using BinnedPair = ScoredPair<BinnedForecast>;

template <typename Forecast>
struct PairingResult {
    std::vector<ScoredPair<Forecast>> pairs;
    std::vector<ForecastUnitKey> unmatched;
};

/// Join forecasts with observations on (location, target, target_end_date).
/// Forecasts without a matching observation are reported in `unmatched`,
/// never silently dropped. Duplicate observations for one key are an error.
PairingResult<QuantileForecast> pair_with_truth(std::vector<QuantileForecast> forecasts,
                                                const std::vector<Observation>& observations);
PairingResult<BinnedForecast> pair_with_truth(std::vector<BinnedForecast> forecasts,
                                              const std::vector<Observation>& observations);

/// Full-precision decimal rendering (round-trips through parsing).
std::string format_double(double value);

} // namespace qscore
