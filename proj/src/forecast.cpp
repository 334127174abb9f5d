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

#include "qscore/forecast.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "qscore/common.hpp"

namespace qscore {

namespace {

constexpr double kLevelTolerance = 1e-9;
constexpr double kWidthTolerance = 1e-9;

bool is_leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

int days_in_month(int year, int month) {
    static constexpr std::array<int, 12> days{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap(year)) {
        return 29;
    }
    return days[static_cast<std::size_t>(month - 1)];
}

bool contains_ahead(const std::string& target) {
    std::string lowered(target.size(), '\0');
    std::transform(target.begin(), target.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return lowered.find("ahead") != std::string::npos;
}

} // namespace

Date Date::parse(const std::string& text) {
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw ValidationError("date '" + text + "' is not in YYYY-MM-DD form");
    }
    const char* b = text.data();
    auto read = [&](int offset, int len, int& out) {
        const auto res = std::from_chars(b + offset, b + offset + len, out);
        if (res.ec != std::errc{} || res.ptr != b + offset + len) {
            throw ValidationError("date '" + text + "' is not in YYYY-MM-DD form");
        }
    };
    read(0, 4, y);
    read(5, 2, m);
    read(8, 2, d);
    if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) {
        throw ValidationError("date '" + text + "' is not a valid calendar date");
    }
    return Date{y, m, d};
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

void ForecastUnitKey::validate() const {
    if (model_id.empty() || location.empty() || target.empty()) {
        throw ValidationError("forecast unit key has empty fields: " + to_string());
    }
    if (contains_ahead(target) && target_end_date < forecast_date) {
        throw ValidationError("target_end_date precedes forecast_date for ahead target: " +
                              to_string());
    }
}

std::string ForecastUnitKey::to_string() const {
    return model_id + "/" + location + "/" + target + "/" + target_end_date.to_string() + "/" +
           forecast_date.to_string();
}

void Observation::validate() const {
    if (location.empty() || target.empty()) {
        throw ValidationError("observation has empty fields");
    }
    if (!std::isfinite(value)) {
        throw ValidationError("observation value must be finite");
    }
}

std::span<const double> hub_quantile_levels() {
    static constexpr std::array<double, 23> levels{
        0.01, 0.025, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50,
        0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 0.975, 0.99};
    return levels;
}

QuantileForecast::QuantileForecast(ForecastUnitKey key, std::vector<QuantileEntry> entries,
                                   std::optional<double> point)
    : key_(std::move(key)), entries_(std::move(entries)), point_(point) {
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const QuantileEntry& a, const QuantileEntry& b) { return a.level < b.level; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (!(e.level > 0.0) || !(e.level < 1.0)) {
            throw ValidationError("quantile level " + std::to_string(e.level) +
                                  " outside (0,1) in " + key_.to_string());
        }
        if (!std::isfinite(e.value)) {
            throw ValidationError("non-finite quantile value in " + key_.to_string());
        }
        if (i > 0) {
            if (entries_[i - 1].level + kLevelTolerance >= e.level) {
                throw ValidationError("duplicate quantile level " + std::to_string(e.level) +
                                      " in " + key_.to_string());
            }
            if (entries_[i - 1].value > e.value) {
                throw ValidationError(
                    "non-monotone quantiles in " + key_.to_string() + ": value at level " +
                    std::to_string(entries_[i - 1].level) + " exceeds value at level " +
                    std::to_string(e.level));
            }
        }
    }
    if (point_ && !std::isfinite(*point_)) {
        throw ValidationError("non-finite point forecast in " + key_.to_string());
    }
}

const double* QuantileForecast::find(double level) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), level - kLevelTolerance,
                               [](const QuantileEntry& e, double l) { return e.level < l; });
    if (it != entries_.end() && std::abs(it->level - level) <= kLevelTolerance) {
        return &it->value;
    }
    return nullptr;
}

double QuantileForecast::value_at(double level) const {
    if (const double* v = find(level)) {
        return *v;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", level);
    throw ValidationError("forecast " + key_.to_string() + " is missing quantile level " + buf);
}

double QuantileForecast::point_or_median() const {
    if (point_) {
        return *point_;
    }
    return median();
}

BinnedForecast::BinnedForecast(ForecastUnitKey key, std::vector<Bin> bins)
    : key_(std::move(key)), bins_(std::move(bins)) {
    if (bins_.empty()) {
        throw ValidationError("binned forecast needs at least one bin: " + key_.to_string());
    }
    width_ = bins_.front().upper - bins_.front().lower;
    if (!(width_ > 0.0) || !std::isfinite(width_)) {
        throw ValidationError("bin width must be finite and > 0 in " + key_.to_string());
    }
    NeumaierSum sum;
    for (std::size_t i = 0; i < bins_.size(); ++i) {
        const Bin& b = bins_[i];
        if (!(b.prob >= 0.0) || !std::isfinite(b.prob)) {
            throw ValidationError("bin probabilities must be finite and >= 0 in " +
                                  key_.to_string());
        }
        const double w = b.upper - b.lower;
        if (std::abs(w - width_) > kWidthTolerance * std::max(1.0, std::abs(width_))) {
            throw ValidationError("inconsistent bin widths in " + key_.to_string());
        }
        if (i > 0 && std::abs(bins_[i - 1].upper - b.lower) > kWidthTolerance) {
            throw ValidationError("bins not contiguous/ordered in " + key_.to_string());
        }
        sum.add(b.prob);
    }
    const double total = sum.value();
    if (std::abs(total - 1.0) > 1e-6) {
        throw ValidationError("bin probabilities sum to " + std::to_string(total) +
                              ", outside the 1e-6 tolerance, in " + key_.to_string());
    }
    if (std::abs(total - 1.0) > 1e-12) {
        for (Bin& b : bins_) {
            b.prob /= total;
        }
    }
}

double BinnedForecast::center(std::size_t index) const {
    const Bin& b = bins_[index];
    return 0.5 * (b.lower + b.upper);
}

std::int64_t BinnedForecast::bin_index(double y) const {
    const double first = bins_.front().lower;
    if (y == bins_.back().upper) {
        return static_cast<std::int64_t>(bins_.size()) - 1;
    }
    return static_cast<std::int64_t>(std::floor((y - first) / width_));
}

DiscreteDistribution BinnedForecast::to_distribution() const {
    std::vector<double> probs(bins_.size());
    for (std::size_t i = 0; i < bins_.size(); ++i) {
        probs[i] = bins_[i].prob;
    }
    return DiscreteDistribution(0, std::move(probs));
}

QuantileForecast BinnedForecast::quantiles(std::span<const double> levels) const {
    const DiscreteDistribution dist = to_distribution();
    std::vector<QuantileEntry> entries;
    entries.reserve(levels.size());
    for (double level : levels) {
        const auto idx = static_cast<std::size_t>(dist.quantile(level));
        entries.push_back({level, center(idx)});
    }
    return QuantileForecast(key_, std::move(entries));
}

QuantileForecast quantiles_from_binned(const BinnedForecast& bins, std::span<const double> levels) {
    return bins.quantiles(levels);
}

} // namespace qscore
