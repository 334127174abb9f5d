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

#include "qscore/evaluate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "qscore/common.hpp"
#include "qscore/simd/kernels.hpp"

namespace qscore {

namespace {

std::string format_alpha(double alpha) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", alpha);
    return buf;
}

ScoreBreakdown attributed_point_error(double point, double y, double value) {
    ScoreBreakdown out;
    if (point > y) {
        out.overprediction = value;
    } else if (point < y) {
        out.underprediction = value;
    }
    out.total = out.dispersion + out.overprediction + out.underprediction;
    return out;
}

} // namespace

std::string ScoreName::to_string() const {
    switch (kind) {
        case Kind::logs: return "logs";
        case Kind::mblogs: return "mblogs";
        case Kind::crps: return "crps";
        case Kind::interval: return "is@" + format_alpha(alpha);
        case Kind::wis: return "wis";
        case Kind::ae: return "ae";
        case Kind::mape: return "mape";
    }
    return "?";
}

Orientation ScoreName::orientation() const {
    return (kind == Kind::logs || kind == Kind::mblogs) ? Orientation::positively_oriented
                                                        : Orientation::negatively_oriented;
}

bool ScoreName::decomposed() const {
    switch (kind) {
        case Kind::interval:
        case Kind::wis:
        case Kind::ae:
        case Kind::mape:
            return true;
        default:
            return false;
    }
}

std::string score_registry_description() {
    return "logs, mblogs, crps, is@<alpha>, wis, ae, mape";
}

ScoreName ScoreName::parse(const std::string& name) {
    if (name == "logs") return {Kind::logs};
    if (name == "mblogs") return {Kind::mblogs};
    if (name == "crps") return {Kind::crps};
    if (name == "wis") return {Kind::wis};
    if (name == "ae") return {Kind::ae};
    if (name == "mape") return {Kind::mape};
    if (name.rfind("is@", 0) == 0) {
        const std::string rest = name.substr(3);
        double alpha = 0.0;
        const char* b = rest.data();
        const auto res = std::from_chars(b, b + rest.size(), alpha);
        if (res.ec == std::errc{} && res.ptr == b + rest.size() && alpha > 0.0 && alpha < 1.0) {
            return {Kind::interval, alpha};
        }
        throw ValidationError("score '" + name + "': alpha must be a number in (0,1); registry: " +
                              score_registry_description());
    }
    throw ValidationError("unknown score '" + name + "'; registry: " +
                          score_registry_description());
}

void ScoreConfig::validate() const {
    if (scores.empty()) {
        throw ValidationError("score set is empty; registry: " + score_registry_description());
    }
    levels.validate();
    weights.validate(levels);
    log_config.validate();
}

std::vector<ScoreName> ScoreConfig::parse_score_list(const std::string& comma_separated) {
    std::vector<ScoreName> out;
    std::stringstream ss(comma_separated);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(ScoreName::parse(item));
        }
    }
    return out;
}

namespace {

// Quantile-format scoring of one cell; throws on per-pair problems.
ScoreBreakdown score_quantile_pair(const ScoreName& score, const QuantileForecast& qf, double y,
                                   const ScoreConfig& cfg) {
    switch (score.kind) {
        case ScoreName::Kind::wis:
            return weighted_interval_score(qf, y, cfg.levels, cfg.weights);
        case ScoreName::Kind::interval: {
            const double lower = qf.value_at(score.alpha / 2.0);
            const double upper = qf.value_at(1.0 - score.alpha / 2.0);
            return interval_score(score.alpha, lower, upper, y);
        }
        case ScoreName::Kind::ae: {
            const double point = qf.point_or_median();
            return attributed_point_error(point, y, absolute_error(point, y));
        }
        case ScoreName::Kind::mape: {
            const double point = qf.point_or_median();
            return attributed_point_error(point, y, mape(point, y));
        }
        default:
            throw ValidationError("score " + score.to_string() +
                                  " requires a binned forecast distribution");
    }
}

ScoreBreakdown score_binned_pair(const ScoreName& score, const BinnedForecast& bf, double y,
                                 const ScoreConfig& cfg) {
    switch (score.kind) {
        case ScoreName::Kind::logs: {
            ScoreBreakdown out;
            out.total = log_score(bf.to_distribution(), bf.bin_index(y), cfg.log_config);
            return out;
        }
        case ScoreName::Kind::mblogs: {
            ScoreBreakdown out;
            out.total = multibin_log_score(bf.to_distribution(), bf.bin_index(y), cfg.log_config);
            return out;
        }
        case ScoreName::Kind::crps: {
            ScoreBreakdown out;
            out.total = binned_crps_via_point_mass(bf, y);
            return out;
        }
        default: {
            // interval-format scores: evaluate on the bin-center quantiles
            std::vector<double> needed;
            if (score.kind == ScoreName::Kind::wis) {
                needed = cfg.levels.quantile_levels();
            } else if (score.kind == ScoreName::Kind::interval) {
                needed = {score.alpha / 2.0, 0.5, 1.0 - score.alpha / 2.0};
            } else {
                needed = {0.5};
            }
            const QuantileForecast qf = bf.quantiles(needed);
            return score_quantile_pair(score, qf, y, cfg);
        }
    }
}

template <typename Pair, typename Fn>
std::vector<ScoreRecord> score_all_impl(std::span<const Pair> pairs, const ScoreConfig& cfg,
                                        Fn&& cell) {
    cfg.validate();
    std::vector<ScoreRecord> out;
    out.reserve(pairs.size() * cfg.scores.size());
    for (const Pair& pair : pairs) {
        for (const ScoreName& score : cfg.scores) {
            ScoreRecord record;
            record.key = pair.forecast.unit_key();
            record.score_name = score.to_string();
            record.orientation = score.orientation();
            try {
                record.breakdown = cell(score, pair.forecast, pair.observed);
            } catch (const std::exception& err) {
                record.error = err.what();
                record.breakdown = ScoreBreakdown{};
            }
            out.push_back(std::move(record));
        }
    }
    return out;
}

} // namespace

std::vector<ScoreRecord> score_all(std::span<const QuantilePair> pairs, const ScoreConfig& cfg) {
    return score_all_impl(pairs, cfg,
                          [&cfg](const ScoreName& s, const QuantileForecast& f, double y) {
                              return score_quantile_pair(s, f, y, cfg);
                          });
}

std::vector<ScoreRecord> score_all(std::span<const BinnedPair> pairs, const ScoreConfig& cfg) {
    return score_all_impl(pairs, cfg, [&cfg](const ScoreName& s, const BinnedForecast& f, double y) {
        return score_binned_pair(s, f, y, cfg);
    });
}

GroupField parse_group_field(const std::string& name) {
    if (name == "model") return GroupField::model;
    if (name == "location") return GroupField::location;
    if (name == "target") return GroupField::target;
    if (name == "target_end_date") return GroupField::target_end_date;
    throw ValidationError("unknown group-by field '" + name +
                          "'; expected model, location, target or target_end_date");
}

std::string group_field_name(GroupField f) {
    switch (f) {
        case GroupField::model: return "model";
        case GroupField::location: return "location";
        case GroupField::target: return "target";
        case GroupField::target_end_date: return "target_end_date";
    }
    return "?";
}

std::string render_group_key(const ForecastUnitKey& key, std::span<const GroupField> group_by) {
    if (group_by.empty()) {
        return "overall";
    }
    std::string out;
    for (const GroupField f : group_by) {
        if (!out.empty()) {
            out += "|";
        }
        out += group_field_name(f) + "=";
        switch (f) {
            case GroupField::model: out += key.model_id; break;
            case GroupField::location: out += key.location; break;
            case GroupField::target: out += key.target; break;
            case GroupField::target_end_date: out += key.target_end_date.to_string(); break;
        }
    }
    return out;
}

namespace {

struct MeanAccumulator {
    NeumaierSum total;
    NeumaierSum dispersion;
    NeumaierSum overprediction;
    NeumaierSum underprediction;
    std::int64_t count = 0;
    bool decomposed = false;
};

} // namespace

std::vector<AggregateReport> aggregate(std::span<const ScoreRecord> records,
                                       std::span<const GroupField> group_by) {
    std::map<std::string, std::map<std::string, MeanAccumulator>> groups;
    std::map<std::string, std::map<std::string, std::int64_t>> errors;
    for (const ScoreRecord& r : records) {
        const std::string group = render_group_key(r.key, group_by);
        if (!r.ok()) {
            ++errors[group][r.score_name];
            groups[group];  // group exists even if every record errored
            continue;
        }
        MeanAccumulator& acc = groups[group][r.score_name];
        acc.total.add(r.breakdown.total);
        acc.dispersion.add(r.breakdown.dispersion);
        acc.overprediction.add(r.breakdown.overprediction);
        acc.underprediction.add(r.breakdown.underprediction);
        acc.count += 1;
        acc.decomposed = ScoreName::parse(r.score_name).decomposed();
    }

    std::vector<AggregateReport> out;
    out.reserve(groups.size());
    for (auto& [group, per_score] : groups) {
        AggregateReport report;
        report.group = group;
        for (auto& [score, acc] : per_score) {
            ScoreBreakdown mean;
            const double n = static_cast<double>(acc.count);
            mean.dispersion = acc.dispersion.value() / n;
            mean.overprediction = acc.overprediction.value() / n;
            mean.underprediction = acc.underprediction.value() / n;
            if (acc.decomposed) {
                // closure survives aggregation exactly
                mean.total = mean.dispersion + mean.overprediction + mean.underprediction;
            } else {
                mean.total = acc.total.value() / n;
            }
            report.mean_scores[score] = mean;
            report.counts[score] = acc.count;
        }
        if (const auto it = errors.find(group); it != errors.end()) {
            report.error_counts = it->second;
        }
        out.push_back(std::move(report));
    }
    return out;
}

std::map<double, double> empirical_coverage(std::span<const QuantilePair> pairs,
                                            const IntervalLevelSet& levels) {
    levels.validate();
    std::map<double, double> out;
    if (pairs.empty()) {
        return out;
    }
    std::vector<double> lower(pairs.size());
    std::vector<double> upper(pairs.size());
    std::vector<double> ys(pairs.size());
    for (const double alpha : levels.alphas) {
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            lower[i] = pairs[i].forecast.value_at(alpha / 2.0);
            upper[i] = pairs[i].forecast.value_at(1.0 - alpha / 2.0);
            ys[i] = pairs[i].observed;
        }
        const std::size_t hits = simd::count_within(lower, upper, ys);
        out[1.0 - alpha] = static_cast<double>(hits) / static_cast<double>(pairs.size());
    }
    return out;
}

QuantileForecast negbin_quantile_forecast(const NegBinParams& params,
                                          std::span<const double> levels) {
    char model[64];
    std::snprintf(model, sizeof(model), "negbin(%g,%g)", params.mu, params.psi);
    ForecastUnitKey key{model, "synthetic", "synthetic", Date{2020, 1, 1}, Date{2020, 1, 1}};
    return negbin_quantile_forecast(params, levels, std::move(key));
}

QuantileForecast negbin_quantile_forecast(const NegBinParams& params,
                                          std::span<const double> levels, ForecastUnitKey key) {
    std::vector<QuantileEntry> entries;
    entries.reserve(levels.size());
    for (const double level : levels) {
        entries.push_back({level, static_cast<double>(negbin_quantile(params, level))});
    }
    return QuantileForecast(std::move(key), std::move(entries));
}

std::pair<std::string, double> combined_table_entry(const ScoreName& score, double value) {
    if (score.orientation() == Orientation::positively_oriented) {
        return {"neg_" + score.to_string(), -value};
    }
    return {score.to_string(), value};
}

std::int64_t default_curve_y_max(const NegBinParams& params) {
    return negbin_quantile(params, 0.9999) + 50;
}

CurveTable score_curve(const NegBinParams& params, const ScoreConfig& cfg, std::int64_t y_min,
                       std::int64_t y_max) {
    cfg.validate();
    if (y_min > y_max) {
        throw ValidationError("curve range is empty (y_min > y_max)");
    }

    // One tabulation and one quantile set serve the whole curve.
    const DiscreteDistribution dist = tabulate(params);
    std::vector<double> needed = cfg.levels.quantile_levels();
    needed.push_back(0.5);
    for (const ScoreName& s : cfg.scores) {
        if (s.kind == ScoreName::Kind::interval) {
            needed.push_back(s.alpha / 2.0);
            needed.push_back(1.0 - s.alpha / 2.0);
        }
    }
    std::sort(needed.begin(), needed.end());
    needed.erase(std::unique(needed.begin(), needed.end(),
                             [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
                 needed.end());
    const QuantileForecast qf = negbin_quantile_forecast(params, needed);

    CurveTable table;
    for (const ScoreName& s : cfg.scores) {
        table.columns.push_back(combined_table_entry(s, 0.0).first);
    }
    for (std::int64_t y = y_min; y <= y_max; ++y) {
        std::vector<double> row;
        row.reserve(cfg.scores.size());
        for (const ScoreName& s : cfg.scores) {
            double value = std::numeric_limits<double>::quiet_NaN();
            try {
                switch (s.kind) {
                    case ScoreName::Kind::logs:
                        value = log_score(dist, y, cfg.log_config);
                        break;
                    case ScoreName::Kind::mblogs:
                        value = multibin_log_score(dist, y, cfg.log_config);
                        break;
                    case ScoreName::Kind::crps:
                        value = crps_discrete(dist, y);
                        break;
                    default:
                        value = score_quantile_pair(s, qf, static_cast<double>(y), cfg).total;
                        break;
                }
                value = combined_table_entry(s, value).second;
            } catch (const std::exception&) {
                value = std::numeric_limits<double>::quiet_NaN();
            }
            row.push_back(value);
        }
        table.ys.push_back(y);
        table.values.push_back(std::move(row));
    }
    return table;
}

std::vector<ScatterRow> scatter_data(std::span<const AggregateReport> by_model) {
    // collect (display score name -> model -> value), negating log scores
    std::map<std::string, std::map<std::string, double>> values;
    for (const AggregateReport& report : by_model) {
        std::string model = report.group;
        if (model.rfind("model=", 0) == 0) {
            model = model.substr(6);
        }
        for (const auto& [name, mean] : report.mean_scores) {
            const ScoreName score = ScoreName::parse(name);
            const auto [display, value] = combined_table_entry(score, mean.total);
            values[display][model] = value;
        }
    }
    if (values.size() < 2) {
        throw ValidationError("scatter needs at least two scores per model");
    }

    std::map<std::string, std::map<std::string, int>> ranks;
    for (const auto& [display, per_model] : values) {
        for (const auto& [model, value] : per_model) {
            int rank = 1;
            for (const auto& [other_model, other_value] : per_model) {
                (void)other_model;
                if (other_value < value) {
                    ++rank;
                }
            }
            ranks[display][model] = rank;
        }
    }

    std::vector<ScatterRow> out;
    for (auto x_it = values.begin(); x_it != values.end(); ++x_it) {
        for (auto y_it = std::next(x_it); y_it != values.end(); ++y_it) {
            for (const auto& [model, x_value] : x_it->second) {
                const auto y_found = y_it->second.find(model);
                if (y_found == y_it->second.end()) {
                    continue;
                }
                ScatterRow row;
                row.model = model;
                row.score_x = x_it->first;
                row.score_y = y_it->first;
                row.x = x_value;
                row.y = y_found->second;
                row.rank_x = ranks[x_it->first][model];
                row.rank_y = ranks[y_it->first][model];
                out.push_back(std::move(row));
            }
        }
    }
    return out;
}

} // namespace qscore
