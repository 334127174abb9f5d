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

namespace qscore {

/// Negative binomial distribution in mean/size form: expectation mu,
/// size (dispersion) psi, success probability p = psi / (psi + mu),
/// variance mu + mu^2 / psi.
struct NegBinParams {
    double mu;
    double psi;

    NegBinParams(double mu, double psi);

    double variance() const { return mu + mu * mu / psi; }
    double stddev() const;
};

/// log P(X = k), evaluated via log-gamma; stable far into the tail.
double negbin_log_pmf(const NegBinParams& params, std::int64_t k);

/// P(X = k); zero for k < 0.
double negbin_pmf(const NegBinParams& params, std::int64_t k);

/// P(X <= k) by compensated forward summation; zero for k < 0.
double negbin_cdf(const NegBinParams& params, std::int64_t k);

/// Smallest k with cdf(k) >= tau (lower generalized inverse), found by
/// scanning the cumulative mass; tau must lie strictly inside (0, 1).
std::int64_t negbin_quantile(const NegBinParams& params, double tau);

/// Tail-truncated table covering at least 1 - mass_tol of the mass, starting
/// at 0. Probabilities are kept as-is (no renormalization); the residual tail
/// stays implicit in total_mass().
DiscreteDistribution tabulate(const NegBinParams& params, double mass_tol = 1e-10);

} // namespace qscore
