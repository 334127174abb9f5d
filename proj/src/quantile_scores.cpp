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

#include "qscore/quantile_scores.hpp"

#include <algorithm>
#include <cmath>

#include "qscore/common.hpp"
#include "qscore/simd/kernels.hpp"

namespace qscore {

void IntervalLevelSet::validate() const {
    if (alphas.empty() && !include_median) {
        throw ValidationError("interval level set is empty");
    }
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] > 0.0) || !(alphas[i] <= 1.0)) {
            throw ValidationError("interval alpha must lie in (0, 1]");
        }
        if (i > 0 && alphas[i - 1] >= alphas[i]) {
            throw ValidationError("interval alphas must be strictly increasing");
        }
    }
}

std::vector<double> IntervalLevelSet::quantile_levels() const {
    std::vector<double> levels;
    levels.reserve(2 * alphas.size() + 1);
    for (double a : alphas) {
        levels.push_back(a / 2.0);
        levels.push_back(1.0 - a / 2.0);
    }
    if (include_median) {
        levels.push_back(0.5);
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end(),
                             [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
                 levels.end());
    return levels;
}

IntervalLevelSet IntervalLevelSet::hub() {
    return IntervalLevelSet{{0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}, true};
}

IntervalLevelSet IntervalLevelSet::equally_spaced(std::size_t terms) {
    if (terms == 0) {
        throw ValidationError("equally spaced level set needs at least one term");
    }
    IntervalLevelSet set;
    set.include_median = false;
    set.alphas.reserve(terms);
    const double n = static_cast<double>(terms);
    for (std::size_t i = 0; i < terms; ++i) {
        set.alphas.push_back((static_cast<double>(i) + 0.5) / n);
    }
    return set;
}

void WisWeights::validate(const IntervalLevelSet& levels) const {
    if (!interval_weights.empty() && interval_weights.size() != levels.alphas.size()) {
        throw ValidationError("interval weight count does not match the level set");
    }
    if (!(median_weight >= 0.0)) {
        throw ValidationError("median weight must be >= 0");
    }
    double max_w = levels.include_median ? median_weight : 0.0;
    for (std::size_t k = 0; k < levels.alphas.size(); ++k) {
        const double w = interval_weight(levels, k);
        if (!(w >= 0.0)) {
            throw ValidationError("interval weights must be >= 0");
        }
        max_w = std::max(max_w, w);
    }
    if (!(max_w > 0.0)) {
        throw ValidationError("at least one weight must be strictly positive");
    }
}

double WisWeights::interval_weight(const IntervalLevelSet& levels, std::size_t k) const {
    if (interval_weights.empty()) {
        return levels.alphas[k] / 2.0;
    }
    return interval_weights[k];
}

double quantile_score(double tau, double q, double y) {
    if (!(tau > 0.0) || !(tau < 1.0)) {
        throw ValidationError("quantile level must lie strictly inside (0, 1)");
    }
    const double indicator = (y <= q) ? 1.0 : 0.0;
    return 2.0 * (indicator - tau) * (q - y);
}

ScoreBreakdown interval_score(double alpha, double lower, double upper, double y) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw ValidationError("interval alpha must lie strictly inside (0, 1)");
    }
    if (lower > upper) {
        throw ValidationError("interval endpoints out of order (lower > upper)");
    }
    ScoreBreakdown out;
    out.dispersion = upper - lower;
    if (y < lower) {
        out.overprediction = (2.0 / alpha) * (lower - y);
    } else if (y > upper) {
        out.underprediction = (2.0 / alpha) * (y - upper);
    }
    out.total = out.dispersion + out.overprediction + out.underprediction;
    return out;
}

namespace {

// Interval term without the (0,1) alpha restriction: alpha = 1 is the
// zero-width median interval.
ScoreBreakdown interval_term(double alpha, double lower, double upper, double y) {
    ScoreBreakdown out;
    out.dispersion = upper - lower;
    if (y < lower) {
        out.overprediction = (2.0 / alpha) * (lower - y);
    } else if (y > upper) {
        out.underprediction = (2.0 / alpha) * (y - upper);
    }
    out.total = out.dispersion + out.overprediction + out.underprediction;
    return out;
}

} // namespace

ScoreBreakdown weighted_interval_score(const QuantileForecast& quantiles, double y,
                                       const IntervalLevelSet& levels, const WisWeights& weights) {
    levels.validate();
    weights.validate(levels);

    ScoreBreakdown acc;
    if (levels.include_median) {
        const double m = quantiles.median();
        const double err = std::abs(y - m);
        const double term = weights.median_weight * 2.0 * err;
        if (m > y) {
            acc.overprediction += term;
        } else if (m < y) {
            acc.underprediction += term;
        }
    }
    for (std::size_t k = 0; k < levels.alphas.size(); ++k) {
        const double alpha = levels.alphas[k];
        const double lower = quantiles.value_at(alpha / 2.0);
        const double upper = quantiles.value_at(1.0 - alpha / 2.0);
        if (lower > upper) {
            throw ValidationError("non-monotone interval endpoints in " +
                                  quantiles.unit_key().to_string());
        }
        const ScoreBreakdown part = interval_term(alpha, lower, upper, y);
        const double w = weights.interval_weight(levels, k);
        acc.dispersion += w * part.dispersion;
        acc.overprediction += w * part.overprediction;
        acc.underprediction += w * part.underprediction;
    }
    const double divisor = weights.normalizer == WisNormalizer::divide_by_k_plus_1
                               ? static_cast<double>(levels.term_count())
                               : 1.0;
    acc.dispersion /= divisor;
    acc.overprediction /= divisor;
    acc.underprediction /= divisor;
    acc.total = acc.dispersion + acc.overprediction + acc.underprediction;
    return acc;
}

double wis_via_quantile_scores(const QuantileForecast& quantiles, double y,
                               const IntervalLevelSet& levels) {
    levels.validate();
    std::vector<double> taus;
    std::vector<double> values;
    taus.reserve(2 * levels.alphas.size() + 2);
    for (double alpha : levels.alphas) {
        taus.push_back(alpha / 2.0);
        taus.push_back(1.0 - alpha / 2.0);
    }
    if (levels.include_median) {
        // the median enters the score twice: once as the standalone term and
        // once as the tau = 1/2 member of the level set
        taus.push_back(0.5);
        taus.push_back(0.5);
    }
    values.reserve(taus.size());
    for (double tau : taus) {
        values.push_back(quantiles.value_at(tau));
    }
    const double sum = simd::pinball_sum(taus, values, y);
    return sum / (2.0 * static_cast<double>(levels.term_count()));
}

double crps_approximation(const QuantileForecast& quantiles, double y, std::size_t k) {
    const IntervalLevelSet levels = IntervalLevelSet::equally_spaced(k + 1);
    return weighted_interval_score(quantiles, y, levels).total;
}

double absolute_error(double point, double y) { return std::abs(point - y); }

double mape(double point, double y) {
    if (y == 0.0) {
        throw ValidationError("relative error is undefined for observation 0");
    }
    return std::abs(point - y) / std::abs(y);
}

} // namespace qscore
