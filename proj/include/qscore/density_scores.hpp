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

#include <cstdint>

#include "qscore/discrete_distribution.hpp"
#include "qscore/forecast.hpp"

namespace qscore {

struct LogScoreConfig {
    /// Scores are clamped from below here instead of running to -inf.
    double truncation_floor = -10.0;
    /// Half-width d of the multibin window, in ordered categories.
    std::int64_t tolerance_radius = 0;

    void validate() const;
};

/// log of the probability assigned to the outcome, floored at the truncation
/// value (zero probability included). Positively oriented.
double log_score(const DiscreteDistribution& dist, std::int64_t y,
                 const LogScoreConfig& cfg = LogScoreConfig{});

/// log of the probability mass within +-d categories of the outcome, floored
/// after summation. d = 0 recovers log_score exactly. Positively oriented,
/// and not a proper score for d > 0.
double multibin_log_score(const DiscreteDistribution& dist, std::int64_t y,
                          const LogScoreConfig& cfg);

/// sum over the integer grid of (F(x) - 1(x >= y))^2, the discrete form of
/// the continuous ranked probability score. The grid extends beyond the
/// tabulated support to cover y, holding the CDF at its tail value.
double crps_discrete(const DiscreteDistribution& dist, std::int64_t y);

/// CRPS of the distribution placing each bin's probability on its center,
/// evaluated on the center grid (scaled by the bin width). The observation is
/// snapped to the center of its (possibly virtual) containing bin.
double binned_crps_via_point_mass(const BinnedForecast& bins, double y);

} // namespace qscore
