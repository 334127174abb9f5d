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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "qscore/common.hpp"

namespace {
using namespace qscore;
}

TEST_CASE("validating constructor renormalizes small drift and rejects large") {
    const DiscreteDistribution ok(0, {0.25, 0.25, 0.25, 0.25 + 5e-7});
    CHECK(std::abs(ok.total_mass() - 1.0) <= 1e-9);
    CHECK(std::abs(ok.cdf(3) - 1.0) <= 1e-9);

    CHECK_THROWS_AS(DiscreteDistribution(0, {0.4, 0.4}), ValidationError);
    CHECK_THROWS_AS(DiscreteDistribution(0, {0.6, 0.6}), ValidationError);
    CHECK_THROWS_AS(DiscreteDistribution(0, {1.2, -0.2}), ValidationError);
    CHECK_THROWS_AS(DiscreteDistribution(0, std::vector<double>{}), ValidationError);
}

TEST_CASE("pmf and cdf around the support") {
    const DiscreteDistribution dist(5, {0.2, 0.3, 0.5});
    CHECK(dist.pmf(4) == 0.0);
    CHECK(dist.pmf(5) == doctest::Approx(0.2));
    CHECK(dist.pmf(7) == doctest::Approx(0.5));
    CHECK(dist.pmf(8) == 0.0);
    CHECK(dist.cdf(4) == 0.0);
    CHECK(dist.cdf(5) == doctest::Approx(0.2));
    CHECK(dist.cdf(6) == doctest::Approx(0.5));
    CHECK(dist.cdf(100) == doctest::Approx(1.0));
}

TEST_CASE("cdf is non-decreasing and reaches the total mass") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int round = 0; round < 50; ++round) {
        std::vector<double> probs(1 + rng() % 40);
        double total = 0.0;
        for (double& p : probs) {
            p = u(rng);
            total += p;
        }
        for (double& p : probs) {
            p /= total;
        }
        const DiscreteDistribution dist(0, probs);
        double prev = 0.0;
        for (std::int64_t k = 0; k <= dist.support_end(); ++k) {
            CHECK(dist.cdf(k) >= prev);
            prev = dist.cdf(k);
        }
        CHECK(std::abs(prev - 1.0) <= 1e-9);
    }
}

TEST_CASE("quantile is the lower generalized inverse") {
    const DiscreteDistribution dist(0, {0.25, 0.25, 0.25, 0.25});
    CHECK(dist.quantile(0.1) == 0);
    CHECK(dist.quantile(0.25) == 0);  // cdf(0) == 0.25 >= 0.25
    CHECK(dist.quantile(0.250001) == 1);
    CHECK(dist.quantile(0.75) == 2);
    CHECK(dist.quantile(0.99) == 3);
    CHECK_THROWS_AS(dist.quantile(0.0), ValidationError);
    CHECK_THROWS_AS(dist.quantile(1.0), ValidationError);
}

TEST_CASE("point mass") {
    const DiscreteDistribution dist = DiscreteDistribution::point_mass(7);
    CHECK(dist.pmf(7) == 1.0);
    CHECK(dist.pmf(6) == 0.0);
    CHECK(dist.quantile(0.5) == 7);
    CHECK(dist.mean() == doctest::Approx(7.0));
    CHECK(dist.variance() == doctest::Approx(0.0));
}

TEST_CASE("truncated factory keeps raw probabilities") {
    const DiscreteDistribution dist = DiscreteDistribution::truncated(0, {0.5, 0.4});
    CHECK(dist.total_mass() == doctest::Approx(0.9));
    CHECK(dist.pmf(0) == 0.5);
    CHECK(dist.cdf(10) == doctest::Approx(0.9));
    CHECK_THROWS_AS(DiscreteDistribution::truncated(0, {0.5, -0.1}), ValidationError);
}
