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

#include <vector>

#include "qscore/forecast.hpp"

namespace qscore {

/// A score value split into the width of the prediction intervals and the
/// penalties for the observation falling above or below them. The components
/// always sum to the total; "overprediction" means the forecast sat above the
/// observation.
struct ScoreBreakdown {
    double total = 0.0;
    double dispersion = 0.0;
    double overprediction = 0.0;
    double underprediction = 0.0;
};

/// The central-interval levels a weighted interval score runs over. Each
/// alpha in (0, 1] names the (1-alpha) central interval between the alpha/2
/// and 1-alpha/2 quantiles; alpha = 1 degenerates to the median.
struct IntervalLevelSet {
    std::vector<double> alphas;  // strictly increasing, each in (0, 1]
    bool include_median = true;

    void validate() const;

    /// Number of score terms: intervals plus the median when included.
    std::size_t term_count() const { return alphas.size() + (include_median ? 1 : 0); }

    /// All quantile levels the set needs, ascending and deduplicated.
    std::vector<double> quantile_levels() const;

    /// The forecast-hub preset: eleven intervals plus the median.
    static IntervalLevelSet hub();

    /// terms equally spaced midpoint levels (i + 1/2) / terms covering the
    /// unit interval; no median term. The grid behind crps_approximation.
    static IntervalLevelSet equally_spaced(std::size_t terms);
};

enum class WisNormalizer { divide_by_k_plus_1, none };

/// Weighting of the interval terms. Empty interval_weights means the natural
/// choice alpha_k / 2 per interval; weights are accepted unnormalized.
struct WisWeights {
    double median_weight = 0.5;
    std::vector<double> interval_weights;
    WisNormalizer normalizer = WisNormalizer::divide_by_k_plus_1;

    void validate(const IntervalLevelSet& levels) const;
    double interval_weight(const IntervalLevelSet& levels, std::size_t k) const;
};

/// 2 * (1(y <= q) - tau) * (q - y); equals |q - y| at tau = 1/2.
double quantile_score(double tau, double q, double y);

/// Width of the central (1-alpha) interval plus 2/alpha-scaled penalties for
/// observations outside it. Ties with an endpoint incur no penalty. Rejects
/// lower > upper (never swaps) and alpha outside (0, 1).
ScoreBreakdown interval_score(double alpha, double lower, double upper, double y);

/// Weighted combination of the absolute error of the median and the interval
/// scores at every level, with the median |y - m| term attributed to the
/// over-/underprediction side. The required quantile levels must all be
/// present in the forecast.
ScoreBreakdown weighted_interval_score(const QuantileForecast& quantiles, double y,
                                       const IntervalLevelSet& levels,
                                       const WisWeights& weights = WisWeights{});

/// Same score by a different route: the average of the quantile scores at all
/// levels in the set (median counted twice). Agrees with
/// weighted_interval_score under natural weights to ~1e-15; kept as a
/// permanent cross-check.
double wis_via_quantile_scores(const QuantileForecast& quantiles, double y,
                               const IntervalLevelSet& levels);

/// Weighted interval score over k+1 equally spaced midpoint levels; converges
/// to the CRPS of the forecast distribution as k grows.
double crps_approximation(const QuantileForecast& quantiles, double y, std::size_t k);

double absolute_error(double point, double y);

/// |point - y| / |y|. Scale-free and therefore blind to the size of the
/// target; provided for comparison studies, rejected when y = 0.
double mape(double point, double y);

} // namespace qscore
