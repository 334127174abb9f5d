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

#include "qscore/density_scores.hpp"

#include <algorithm>
#include <cmath>

#include "qscore/common.hpp"
#include "qscore/simd/kernels.hpp"

namespace qscore {

void LogScoreConfig::validate() const {
    if (!(truncation_floor < 0.0)) {
        throw ValidationError("log score truncation floor must be negative");
    }
    if (tolerance_radius < 0) {
        throw ValidationError("multibin tolerance radius must be >= 0");
    }
}

double log_score(const DiscreteDistribution& dist, std::int64_t y, const LogScoreConfig& cfg) {
    cfg.validate();
    const double p = dist.pmf(y);
    if (p <= 0.0) {
        return cfg.truncation_floor;
    }
    return std::max(std::log(p), cfg.truncation_floor);
}

double multibin_log_score(const DiscreteDistribution& dist, std::int64_t y,
                          const LogScoreConfig& cfg) {
    cfg.validate();
    NeumaierSum mass;
    for (std::int64_t i = -cfg.tolerance_radius; i <= cfg.tolerance_radius; ++i) {
        mass.add(dist.pmf(y + i));
    }
    const double p = mass.value();
    if (p <= 0.0) {
        return cfg.truncation_floor;
    }
    return std::max(std::log(p), cfg.truncation_floor);
}

namespace {

// Shared by the unit-grid and bin-grid CRPS: squared CDF steps over the
// tabulated range plus the flat segments the grid extension contributes.
double crps_on_index_grid(const DiscreteDistribution& dist, std::int64_t y_index) {
    const std::int64_t offset = dist.support_offset();
    const std::int64_t last = dist.support_end();
    const double total = dist.total_mass();

    double acc = 0.0;
    if (y_index < offset) {
        // below the support the CDF is 0: (0 - 1)^2 per grid cell
        acc += static_cast<double>(offset - y_index);
    }
    const std::ptrdiff_t split =
        static_cast<std::ptrdiff_t>(std::clamp<std::int64_t>(y_index - offset, 0,
                                                             static_cast<std::int64_t>(dist.size())));
    acc += simd::crps_step_sum(dist.cumulative(), split);
    if (y_index > last) {
        // above the support the CDF holds its tail value
        acc += static_cast<double>(y_index - last - 1) * total * total;
        const double d = total - 1.0;
        acc += d * d;
    }
    return acc;
}

} // namespace

double crps_discrete(const DiscreteDistribution& dist, std::int64_t y) {
    return crps_on_index_grid(dist, y);
}

double binned_crps_via_point_mass(const BinnedForecast& bins, double y) {
    const DiscreteDistribution dist = bins.to_distribution();
    const std::int64_t y_index = bins.bin_index(y);
    return bins.bin_width() * crps_on_index_grid(dist, y_index);
}

} // namespace qscore
