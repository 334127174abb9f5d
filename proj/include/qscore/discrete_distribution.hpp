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
#include <span>
#include <vector>

namespace qscore {

/// A probability distribution tabulated on consecutive integers
/// support_offset, support_offset + 1, ...
///
/// The validating constructor renormalizes when the probabilities sum to 1
/// within 1e-6 and rejects otherwise. Tables produced by tail truncation
/// (tabulate) go through the `truncated` factory instead, which keeps the raw
/// probabilities so the missing tail mass stays implicit: cdf() then tops out
/// at total_mass() < 1.
class DiscreteDistribution {
public:
    DiscreteDistribution(std::int64_t support_offset, std::vector<double> probs);

    static DiscreteDistribution truncated(std::int64_t support_offset, std::vector<double> probs);
    static DiscreteDistribution point_mass(std::int64_t at);

    std::int64_t support_offset() const { return offset_; }
    std::int64_t support_end() const { return offset_ + static_cast<std::int64_t>(probs_.size()) - 1; }
    std::size_t size() const { return probs_.size(); }

    /// P(X = k); zero outside the tabulated support.
    double pmf(std::int64_t k) const;

    /// P(X <= k); zero below the support, total_mass() at and above its end.
    double cdf(std::int64_t k) const;

    double total_mass() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

    /// Smallest support point with cdf >= tau (lower generalized inverse).
    std::int64_t quantile(double tau) const;

    double mean() const;
    double variance() const;

    std::span<const double> probs() const { return probs_; }
    std::span<const double> cumulative() const { return cumulative_; }

private:
    struct unchecked_t {};
    DiscreteDistribution(unchecked_t, std::int64_t support_offset, std::vector<double> probs);

    void build_cumulative();

    std::int64_t offset_ = 0;
    std::vector<double> probs_;
    std::vector<double> cumulative_;
};

} // namespace qscore
