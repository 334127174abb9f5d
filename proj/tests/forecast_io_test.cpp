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

#include "qscore/forecast_io.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "qscore/common.hpp"
#include "qscore/negative_binomial.hpp"

namespace {

using namespace qscore;

const std::string kQuantileHeader =
    "model,forecast_date,target,target_end_date,location,type,quantile,value\n";
const std::string kBinnedHeader =
    "model,forecast_date,target,target_end_date,location,bin_start,bin_end,prob\n";

std::vector<QuantileForecast> random_forecasts(std::mt19937& rng, std::size_t count) {
    std::vector<QuantileForecast> out;
    std::normal_distribution<double> normal(100.0, 30.0);
    std::uniform_int_distribution<int> coin(0, 1);
    for (std::size_t i = 0; i < count; ++i) {
        ForecastUnitKey key{"model" + std::to_string(i % 3), "loc" + std::to_string(i % 2),
                            std::to_string(1 + i % 4) + " wk ahead", Date{2020, 3, 7},
                            Date{2020, 2, 29}};
        key.target_end_date.day = static_cast<int>(1 + i % 28);
        std::vector<double> values;
        for (std::size_t j = 0; j < hub_quantile_levels().size(); ++j) {
            values.push_back(normal(rng));
        }
        std::sort(values.begin(), values.end());
        std::vector<QuantileEntry> entries;
        for (std::size_t j = 0; j < hub_quantile_levels().size(); ++j) {
            entries.push_back({hub_quantile_levels()[j], values[j]});
        }
        std::optional<double> point;
        if (coin(rng)) {
            point = values[11];
        }
        out.emplace_back(key, std::move(entries), point);
    }
    return out;
}

bool same_forecast(const QuantileForecast& a, const QuantileForecast& b) {
    if (a.unit_key() != b.unit_key() || a.point() != b.point() ||
        a.entries().size() != b.entries().size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.entries().size(); ++i) {
        if (a.entries()[i].level != b.entries()[i].level ||
            a.entries()[i].value != b.entries()[i].value) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("date parsing") {
    const Date d = Date::parse("2020-02-29");
    CHECK(d == Date{2020, 2, 29});
    CHECK(d.to_string() == "2020-02-29");
    CHECK_THROWS_AS(Date::parse("2021-02-29"), ValidationError);  // not a leap year
    CHECK_THROWS_AS(Date::parse("2020-13-01"), ValidationError);
    CHECK_THROWS_AS(Date::parse("2020-1-01"), ValidationError);
    CHECK_THROWS_AS(Date::parse("garbage"), ValidationError);
}

TEST_CASE("unit key validation") {
    ForecastUnitKey ok{"m", "US", "1 wk ahead", Date{2020, 3, 7}, Date{2020, 2, 29}};
    CHECK_NOTHROW(ok.validate());

    ForecastUnitKey backwards = ok;
    backwards.target_end_date = Date{2020, 2, 1};
    CHECK_THROWS_AS(backwards.validate(), ValidationError);

    // non-ahead targets skip the date-order check
    backwards.target = "peak week";
    CHECK_NOTHROW(backwards.validate());

    ForecastUnitKey empty = ok;
    empty.model_id = "";
    CHECK_THROWS_AS(empty.validate(), ValidationError);
}

TEST_CASE("one unit with 23 quantile rows and a point row") {
    std::ostringstream file;
    file << kQuantileHeader;
    const NegBinParams params(60.0, 4.0);
    for (double level : hub_quantile_levels()) {
        file << "ens,2020-02-29,1 wk ahead,2020-03-07,US,quantile," << format_double(level) << ","
             << negbin_quantile(params, level) << "\n";
    }
    file << "ens,2020-02-29,1 wk ahead,2020-03-07,US,point,,55\n";

    std::istringstream in(file.str());
    const auto forecasts = parse_hub_quantile_file(in);
    REQUIRE(forecasts.size() == 1);
    CHECK(forecasts[0].entries().size() == 23);
    CHECK(forecasts[0].point() == 55.0);
    CHECK(forecasts[0].value_at(0.95) == 118.0);
    CHECK(forecasts[0].unit_key().model_id == "ens");
}

TEST_CASE("non-monotone quantiles are rejected with the offending levels") {
    std::istringstream in(kQuantileHeader +
                          "m,2020-02-29,1 wk ahead,2020-03-07,US,quantile,0.25,5\n"
                          "m,2020-02-29,1 wk ahead,2020-03-07,US,quantile,0.75,3\n");
    CHECK_THROWS_WITH_AS(parse_hub_quantile_file(in), doctest::Contains("non-monotone"),
                         ValidationError);
    std::istringstream again(kQuantileHeader +
                             "m,2020-02-29,1 wk ahead,2020-03-07,US,quantile,0.25,5\n"
                             "m,2020-02-29,1 wk ahead,2020-03-07,US,quantile,0.75,3\n");
    try {
        parse_hub_quantile_file(again);
        FAIL("expected a validation error");
    } catch (const ValidationError& err) {
        const std::string what = err.what();
        CHECK(what.find("0.25") != std::string::npos);
        CHECK(what.find("0.75") != std::string::npos);
        CHECK(what.find("m/US/1 wk ahead") != std::string::npos);
    }
}

TEST_CASE("duplicate level, bad type and malformed rows carry line numbers") {
    std::istringstream dup(kQuantileHeader +
                           "m,2020-02-29,1 wk ahead,2020-03-07,US,quantile,0.5,5\n"
                           "m,2020-02-29,1 wk ahead,2020-03-07,US,quantile,0.5,6\n");
    CHECK_THROWS_WITH_AS(parse_hub_quantile_file(dup), doctest::Contains("duplicate"),
                         ParseError);

    std::istringstream badtype(kQuantileHeader +
                               "m,2020-02-29,1 wk ahead,2020-03-07,US,mode,,5\n");
    CHECK_THROWS_WITH_AS(parse_hub_quantile_file(badtype),
                         doctest::Contains("not one of {point, quantile}"), ParseError);

    std::istringstream badnum(kQuantileHeader +
                              "m,2020-02-29,1 wk ahead,2020-03-07,US,quantile,0.5,five\n");
    CHECK_THROWS_WITH_AS(parse_hub_quantile_file(badnum), doctest::Contains("line 2"),
                         ParseError);

    std::istringstream badheader("a,b,c\nrow\n");
    CHECK_THROWS_AS(parse_hub_quantile_file(badheader), ParseError);
}

TEST_CASE("quantile file round-trip is the identity") {
    std::mt19937 rng(29);
    const auto original = random_forecasts(rng, 12);
    std::ostringstream out;
    write_hub_quantile_file(out, original);
    std::istringstream in(out.str());
    const auto reparsed = parse_hub_quantile_file(in);
    REQUIRE(reparsed.size() == original.size());
    // parser returns unit-key order; compare as sets keyed by unit
    for (const auto& f : original) {
        bool found = false;
        for (const auto& g : reparsed) {
            if (g.unit_key() == f.unit_key()) {
                CHECK(same_forecast(f, g));
                found = true;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("binned file parsing and validation") {
    SUBCASE("131 tenth-width bins summing to one") {
        std::ostringstream file;
        file << kBinnedHeader;
        for (int i = 0; i < 131; ++i) {
            file << "m,2016-11-05,1 wk ahead,2016-11-12,US," << format_double(0.1 * i) << ","
                 << format_double(0.1 * (i + 1)) << "," << format_double(1.0 / 131.0) << "\n";
        }
        std::istringstream in(file.str());
        const auto forecasts = parse_binned_file(in);
        REQUIRE(forecasts.size() == 1);
        CHECK(forecasts[0].bins().size() == 131);
        CHECK(forecasts[0].bin_width() == doctest::Approx(0.1));
    }
    SUBCASE("bins summing to 0.9 are rejected") {
        std::ostringstream file;
        file << kBinnedHeader;
        for (int i = 0; i < 9; ++i) {
            file << "m,2016-11-05,1 wk ahead,2016-11-12,US," << format_double(0.1 * i) << ","
                 << format_double(0.1 * (i + 1)) << ",0.1\n";
        }
        std::istringstream in(file.str());
        CHECK_THROWS_WITH_AS(parse_binned_file(in), doctest::Contains("sum"), ValidationError);
    }
    SUBCASE("inconsistent widths are rejected") {
        std::istringstream in(kBinnedHeader +
                              "m,2016-11-05,1 wk ahead,2016-11-12,US,0,0.1,0.5\n"
                              "m,2016-11-05,1 wk ahead,2016-11-12,US,0.1,0.3,0.5\n");
        CHECK_THROWS_WITH_AS(parse_binned_file(in), doctest::Contains("width"), ValidationError);
    }
}

TEST_CASE("binned round-trip is the identity") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<BinnedForecast> original;
    for (int f = 0; f < 5; ++f) {
        std::vector<Bin> bins;
        std::vector<double> raw(20);
        double total = 0.0;
        for (double& p : raw) {
            p = u(rng);
            total += p;
        }
        for (std::size_t i = 0; i < raw.size(); ++i) {
            bins.push_back({0.5 * static_cast<double>(i), 0.5 * static_cast<double>(i + 1),
                            raw[i] / total});
        }
        original.emplace_back(
            ForecastUnitKey{"m" + std::to_string(f), "US", "1 wk ahead", Date{2016, 11, 12},
                            Date{2016, 11, 5}},
            std::move(bins));
    }
    std::ostringstream out;
    write_binned_file(out, original);
    std::istringstream in(out.str());
    const auto reparsed = parse_binned_file(in);
    REQUIRE(reparsed.size() == original.size());
    for (std::size_t i = 0; i < original.size(); ++i) {
        bool found = false;
        for (const auto& g : reparsed) {
            if (g.unit_key() != original[i].unit_key()) {
                continue;
            }
            found = true;
            REQUIRE(g.bins().size() == original[i].bins().size());
            for (std::size_t b = 0; b < g.bins().size(); ++b) {
                CHECK(g.bins()[b].lower == original[i].bins()[b].lower);
                CHECK(g.bins()[b].upper == original[i].bins()[b].upper);
                CHECK(g.bins()[b].prob == original[i].bins()[b].prob);
            }
        }
        CHECK(found);
    }
}

TEST_CASE("quantiles from binned forecasts") {
    const ForecastUnitKey key{"m", "US", "1 wk ahead", Date{2016, 11, 12}, Date{2016, 11, 5}};

    SUBCASE("point mass maps every level to its center") {
        std::vector<Bin> bins{{0.0, 0.1, 0.0}, {0.1, 0.2, 1.0}, {0.2, 0.3, 0.0}};
        const BinnedForecast f(key, std::move(bins));
        const std::vector<double> levels{0.05, 0.5, 0.95};
        const QuantileForecast q = quantiles_from_binned(f, levels);
        for (double level : levels) {
            CHECK(q.value_at(level) == doctest::Approx(0.15));
        }
    }
    SUBCASE("uniform bins use the lower inverse") {
        std::vector<Bin> bins;
        for (int i = 0; i < 10; ++i) {
            bins.push_back({0.1 * i, 0.1 * (i + 1), 0.1});
        }
        const BinnedForecast f(key, std::move(bins));
        const std::vector<double> levels{0.05, 0.1, 0.95};
        const QuantileForecast q = quantiles_from_binned(f, levels);
        CHECK(q.value_at(0.05) == doctest::Approx(0.05));  // first bin's center
        CHECK(q.value_at(0.1) == doctest::Approx(0.05));   // cdf(bin 0) = 0.1 >= 0.1
        CHECK(q.value_at(0.95) == doctest::Approx(0.95));
    }
    SUBCASE("negative binomial binned at width one matches the exact quantiles") {
        const NegBinParams params(60.0, 4.0);
        const DiscreteDistribution dist = tabulate(params, 1e-9);
        std::vector<Bin> bins;
        for (std::int64_t k = 0; k <= dist.support_end(); ++k) {
            bins.push_back({static_cast<double>(k) - 0.5, static_cast<double>(k) + 0.5,
                            dist.pmf(k)});
        }
        const BinnedForecast f(key, std::move(bins));
        const std::vector<double> levels{0.05, 0.25, 0.5, 0.75, 0.95};
        const QuantileForecast q = quantiles_from_binned(f, levels);
        for (double level : levels) {
            CHECK(q.value_at(level) ==
                  doctest::Approx(static_cast<double>(negbin_quantile(params, level))));
        }
    }
    SUBCASE("output is monotone for random bins") {
        std::mt19937 rng(37);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int round = 0; round < 100; ++round) {
            std::vector<double> raw(15);
            double total = 0.0;
            for (double& p : raw) {
                p = u(rng);
                total += p;
            }
            std::vector<Bin> bins;
            for (std::size_t i = 0; i < raw.size(); ++i) {
                bins.push_back({static_cast<double>(i), static_cast<double>(i + 1),
                                raw[i] / total});
            }
            const BinnedForecast f(key, std::move(bins));
            std::vector<double> levels;
            for (int j = 1; j <= 19; ++j) {
                levels.push_back(0.05 * j);
            }
            const QuantileForecast q = quantiles_from_binned(f, levels);
            double prev = -1e300;
            for (const auto& e : q.entries()) {
                CHECK(e.value >= prev);
                prev = e.value;
            }
        }
    }
}

TEST_CASE("pairing with truth") {
    auto make_forecast = [](const std::string& loc, int day) {
        ForecastUnitKey key{"m", loc, "1 wk ahead", Date{2020, 3, day}, Date{2020, 2, 29}};
        return QuantileForecast(key, {{0.25, 1.0}, {0.5, 2.0}, {0.75, 3.0}});
    };

    SUBCASE("three forecasts, two observations") {
        std::vector<QuantileForecast> forecasts{make_forecast("US", 7), make_forecast("DE", 7),
                                                make_forecast("FR", 7)};
        std::vector<Observation> truth{{"US", "1 wk ahead", Date{2020, 3, 7}, 4.0},
                                       {"DE", "1 wk ahead", Date{2020, 3, 7}, 5.0}};
        const auto result = pair_with_truth(std::move(forecasts), truth);
        CHECK(result.pairs.size() == 2);
        REQUIRE(result.unmatched.size() == 1);
        CHECK(result.unmatched[0].location == "FR");
    }
    SUBCASE("empty observations leave everything unmatched") {
        std::vector<QuantileForecast> forecasts{make_forecast("US", 7), make_forecast("DE", 7)};
        const auto result = pair_with_truth(std::move(forecasts), {});
        CHECK(result.pairs.empty());
        CHECK(result.unmatched.size() == 2);
    }
    SUBCASE("duplicate observations are rejected") {
        std::vector<QuantileForecast> forecasts{make_forecast("US", 7)};
        std::vector<Observation> truth{{"US", "1 wk ahead", Date{2020, 3, 7}, 4.0},
                                       {"US", "1 wk ahead", Date{2020, 3, 7}, 5.0}};
        CHECK_THROWS_WITH_AS(pair_with_truth(std::move(forecasts), truth),
                             doctest::Contains("duplicate observation"), ValidationError);
    }
    SUBCASE("randomized join matches a nested-loop oracle") {
        std::mt19937 rng(41);
        std::uniform_int_distribution<int> day(1, 9);
        std::uniform_int_distribution<int> loc(0, 4);
        std::vector<QuantileForecast> forecasts;
        for (int i = 0; i < 60; ++i) {
            forecasts.push_back(make_forecast("L" + std::to_string(loc(rng)), day(rng)));
        }
        std::vector<Observation> truth;
        for (int l = 0; l < 5; ++l) {
            for (int d = 1; d <= 9; ++d) {
                if ((l + d) % 3 == 0) {
                    truth.push_back({"L" + std::to_string(l), "1 wk ahead", Date{2020, 3, d},
                                     static_cast<double>(10 * l + d)});
                }
            }
        }
        // nested-loop oracle over (forecast, observation) combinations
        std::size_t expected_pairs = 0;
        for (const auto& f : forecasts) {
            for (const auto& o : truth) {
                if (f.unit_key().location == o.location && f.unit_key().target == o.target &&
                    f.unit_key().target_end_date == o.target_end_date) {
                    ++expected_pairs;
                }
            }
        }
        const std::size_t total = forecasts.size();
        const auto result = pair_with_truth(std::move(forecasts), truth);
        CHECK(result.pairs.size() == expected_pairs);
        CHECK(result.pairs.size() + result.unmatched.size() == total);
        for (const auto& p : result.pairs) {
            bool matches = false;
            for (const auto& o : truth) {
                if (p.forecast.unit_key().location == o.location &&
                    p.forecast.unit_key().target_end_date == o.target_end_date &&
                    p.observed == o.value) {
                    matches = true;
                }
            }
            CHECK(matches);
        }
    }
}

TEST_CASE("adversarial fuzzing never yields an invalid forecast") {
    std::mt19937 rng(43);
    std::uniform_int_distribution<int> pick(0, 9);
    std::uniform_int_distribution<int> rows(1, 8);
    const std::vector<std::string> fragments{
        "m,2020-02-29,1 wk ahead,2020-03-07,US,quantile,0.5,5",
        "m,2020-02-29,1 wk ahead,2020-03-07,US,quantile,0.25,9",
        "m,2020-02-29,1 wk ahead,2020-03-07,US,quantile,0.75,2",
        "m,2020-02-29,1 wk ahead,2020-03-07,US,point,,7",
        "m,2020-02-29,1 wk ahead,2020-03-07,US,quantile,0.5",
        "m,2020-02-29,1 wk ahead,2020-03-07,US,quantile,,x",
        ",,,,,,,",
        "m,not-a-date,1 wk ahead,2020-03-07,US,quantile,0.5,5",
        "m,2020-02-29,1 wk ahead,2020-03-07,US,quantile,1.5,5",
        "garbage line",
    };
    for (int round = 0; round < 300; ++round) {
        std::string file = kQuantileHeader;
        const int n = rows(rng);
        for (int i = 0; i < n; ++i) {
            file += fragments[static_cast<std::size_t>(pick(rng))] + "\n";
        }
        std::istringstream in(file);
        try {
            const auto forecasts = parse_hub_quantile_file(in);
            for (const auto& f : forecasts) {
                double prev_level = 0.0;
                double prev_value = -1e300;
                for (const auto& e : f.entries()) {
                    CHECK(e.level > prev_level);
                    CHECK(e.level < 1.0);
                    CHECK(e.value >= prev_value);
                    prev_level = e.level;
                    prev_value = e.value;
                }
            }
        } catch (const ParseError&) {
        } catch (const ValidationError&) {
        }
    }
}
