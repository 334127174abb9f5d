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

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qscore/discrete_distribution.hpp"

namespace qscore {

/// Calendar date, ISO-8601 text form YYYY-MM-DD.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    static Date parse(const std::string& text);
    std::string to_string() const;
};

/// Identity of one forecast: who issued it, for what, and when.
struct ForecastUnitKey {
    std::string model_id;
    std::string location;
    std::string target;
    Date target_end_date;
    Date forecast_date;

    auto operator<=>(const ForecastUnitKey&) const = default;

    /// Non-empty fields; target_end_date >= forecast_date for "ahead" targets.
    void validate() const;
    std::string to_string() const;
};

struct Observation {
    std::string location;
    std::string target;
    Date target_end_date;
    double value = 0.0;

    void validate() const;
};

struct QuantileEntry {
    double level;
    double value;
};

/// The 23 levels every Hub-preset evaluation needs.
std::span<const double> hub_quantile_levels();

/// A predictive distribution given as (level, value) quantile pairs, plus an
/// optional point forecast. Entries are stored sorted by level; construction
/// rejects duplicate levels, levels outside (0,1) and values that decrease
/// with level (they are never re-sorted into validity).
class QuantileForecast {
public:
    QuantileForecast(ForecastUnitKey key, std::vector<QuantileEntry> entries,
                     std::optional<double> point = std::nullopt);

    const ForecastUnitKey& unit_key() const { return key_; }
    std::span<const QuantileEntry> entries() const { return entries_; }
    std::optional<double> point() const { return point_; }

    /// Quantile value at a level (matched within 1e-9); null when absent.
    const double* find(double level) const;

    /// Like find(), but throws a ValidationError naming the level.
    double value_at(double level) const;

    bool has_level(double level) const { return find(level) != nullptr; }
    double median() const { return value_at(0.5); }

    /// Point forecast when reported, else the predictive median.
    double point_or_median() const;

private:
    ForecastUnitKey key_;
    std::vector<QuantileEntry> entries_;
    std::optional<double> point_;
};

struct Bin {
    double lower;
    double upper;
    double prob;
};

/// A discrete predictive distribution over contiguous, equal-width bins.
/// Construction renormalizes probabilities that sum to 1 within 1e-6 and
/// rejects anything further off.
class BinnedForecast {
public:
    BinnedForecast(ForecastUnitKey key, std::vector<Bin> bins);

    const ForecastUnitKey& unit_key() const { return key_; }
    std::span<const Bin> bins() const { return bins_; }
    double bin_width() const { return width_; }

    double center(std::size_t index) const;

    /// Index of the bin containing y: [lower, upper), last bin closed. For y
    /// outside the binned range, the index of the virtual bin continuing the
    /// grid (negative or >= size()).
    std::int64_t bin_index(double y) const;

    /// Bin probabilities as a distribution over bin indices.
    DiscreteDistribution to_distribution() const;

    /// Lower generalized inverse on the bin-center grid.
    QuantileForecast quantiles(std::span<const double> levels) const;

private:
    ForecastUnitKey key_;
    std::vector<Bin> bins_;
    double width_ = 0.0;
};

/// quantiles_from_binned convenience wrapper.
QuantileForecast quantiles_from_binned(const BinnedForecast& bins, std::span<const double> levels);

} // namespace qscore
