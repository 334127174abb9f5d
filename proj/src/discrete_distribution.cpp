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

#include "qscore/discrete_distribution.hpp"

#include <algorithm>
#include <cmath>

#include "qscore/common.hpp"

namespace qscore {

namespace {
constexpr double kSumTolerance = 1e-6;
} // namespace

DiscreteDistribution::DiscreteDistribution(unchecked_t, std::int64_t support_offset,
                                           std::vector<double> probs)
    : offset_(support_offset), probs_(std::move(probs)) {
    build_cumulative();
}

DiscreteDistribution::DiscreteDistribution(std::int64_t support_offset, std::vector<double> probs)
    : offset_(support_offset), probs_(std::move(probs)) {
    if (probs_.empty()) {
        throw ValidationError("discrete distribution needs at least one support point");
    }
    NeumaierSum sum;
    for (double p : probs_) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw ValidationError("discrete distribution probabilities must be finite and >= 0");
        }
        sum.add(p);
    }
    const double total = sum.value();
    if (std::abs(total - 1.0) > kSumTolerance) {
        throw ValidationError("discrete distribution probabilities sum to " +
                              std::to_string(total) + ", outside the 1e-6 tolerance");
    }
    // renormalize only when the drift is real; keeps round-trips bit-exact
    if (std::abs(total - 1.0) > 1e-12) {
        for (double& p : probs_) {
            p /= total;
        }
    }
    build_cumulative();
}

DiscreteDistribution DiscreteDistribution::truncated(std::int64_t support_offset,
                                                     std::vector<double> probs) {
    if (probs.empty()) {
        throw ValidationError("discrete distribution needs at least one support point");
    }
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw ValidationError("discrete distribution probabilities must be finite and >= 0");
        }
    }
    return DiscreteDistribution(unchecked_t{}, support_offset, std::move(probs));
}

DiscreteDistribution DiscreteDistribution::point_mass(std::int64_t at) {
    return DiscreteDistribution(at, std::vector<double>{1.0});
}

void DiscreteDistribution::build_cumulative() {
    cumulative_.resize(probs_.size());
    NeumaierSum sum;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        sum.add(probs_[i]);
        cumulative_[i] = std::min(sum.value(), 1.0);
    }
}

double DiscreteDistribution::pmf(std::int64_t k) const {
    if (k < offset_ || k > support_end()) {
        return 0.0;
    }
    return probs_[static_cast<std::size_t>(k - offset_)];
}

double DiscreteDistribution::cdf(std::int64_t k) const {
    if (k < offset_) {
        return 0.0;
    }
    if (k >= support_end()) {
        return total_mass();
    }
    return cumulative_[static_cast<std::size_t>(k - offset_)];
}

std::int64_t DiscreteDistribution::quantile(double tau) const {
    if (!(tau > 0.0) || !(tau < 1.0)) {
        throw ValidationError("quantile level must lie strictly inside (0, 1)");
    }
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), tau);
    if (it == cumulative_.end()) {
        // tau exceeds the tabulated mass (possible only for truncated tables);
        // the lower inverse is then beyond the table, clamp to its end.
        return support_end();
    }
    return offset_ + static_cast<std::int64_t>(it - cumulative_.begin());
}

double DiscreteDistribution::mean() const {
    NeumaierSum sum;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        sum.add(probs_[i] * static_cast<double>(offset_ + static_cast<std::int64_t>(i)));
    }
    return sum.value();
}

double DiscreteDistribution::variance() const {
    const double m = mean();
    NeumaierSum sum;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        const double d = static_cast<double>(offset_ + static_cast<std::int64_t>(i)) - m;
        sum.add(probs_[i] * d * d);
    }
    return sum.value();
}

} // namespace qscore
