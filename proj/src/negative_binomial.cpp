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

#include "qscore/negative_binomial.hpp"

#include <algorithm>
#include <cmath>

#include "qscore/common.hpp"

namespace qscore {

namespace {

// Iteration guard for cumulative scans: mean plus a generous multiple of the
// normal-approximation spread, doubled until the target mass is reached.
std::int64_t scan_hint(const NegBinParams& params) {
    const double hint = params.mu + 20.0 * params.stddev() + 64.0;
    return static_cast<std::int64_t>(hint);
}

constexpr std::int64_t kMaxScan = 1'000'000'000;

} // namespace

NegBinParams::NegBinParams(double mu_in, double psi_in) : mu(mu_in), psi(psi_in) {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw ValidationError("negative binomial mean must be finite and > 0");
    }
    if (!(psi > 0.0) || !std::isfinite(psi)) {
        throw ValidationError("negative binomial size must be finite and > 0");
    }
}

double NegBinParams::stddev() const { return std::sqrt(variance()); }

double negbin_log_pmf(const NegBinParams& params, std::int64_t k) {
    if (k < 0) {
        return -std::numeric_limits<double>::infinity();
    }
    const double kd = static_cast<double>(k);
    const double p = params.psi / (params.psi + params.mu);
    return std::lgamma(kd + params.psi) - std::lgamma(params.psi) - std::lgamma(kd + 1.0) +
           params.psi * std::log(p) + kd * std::log1p(-p);
}

double negbin_pmf(const NegBinParams& params, std::int64_t k) {
    if (k < 0) {
        return 0.0;
    }
    return std::exp(negbin_log_pmf(params, k));
}

double negbin_cdf(const NegBinParams& params, std::int64_t k) {
    if (k < 0) {
        return 0.0;
    }
    NeumaierSum sum;
    for (std::int64_t i = 0; i <= k; ++i) {
        sum.add(negbin_pmf(params, i));
    }
    return std::min(sum.value(), 1.0);
}

std::int64_t negbin_quantile(const NegBinParams& params, double tau) {
    if (!(tau > 0.0) || !(tau < 1.0)) {
        throw ValidationError("quantile level must lie strictly inside (0, 1)");
    }
    NeumaierSum sum;
    for (std::int64_t k = 0; k < kMaxScan; ++k) {
        sum.add(negbin_pmf(params, k));
        if (sum.value() >= tau) {
            return k;
        }
    }
    throw ValidationError("negative binomial quantile scan did not converge");
}

DiscreteDistribution tabulate(const NegBinParams& params, double mass_tol) {
    if (!(mass_tol > 0.0) || !(mass_tol < 1.0)) {
        throw ValidationError("mass tolerance must lie strictly inside (0, 1)");
    }
    const double target = 1.0 - mass_tol;
    std::vector<double> probs;
    probs.reserve(static_cast<std::size_t>(std::min<std::int64_t>(scan_hint(params), 1 << 20)));
    NeumaierSum sum;
    for (std::int64_t k = 0; k < kMaxScan; ++k) {
        const double pk = negbin_pmf(params, k);
        probs.push_back(pk);
        sum.add(pk);
        if (sum.value() >= target) {
            return DiscreteDistribution::truncated(0, std::move(probs));
        }
    }
    throw ValidationError("negative binomial tabulation did not converge");
}

} // namespace qscore
