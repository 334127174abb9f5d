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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qscore/density_scores.hpp"
#include "qscore/forecast_io.hpp"
#include "qscore/negative_binomial.hpp"
#include "qscore/quantile_scores.hpp"

namespace qscore {

enum class Orientation { negatively_oriented, positively_oriented };

/// Registry of score names accepted by the batch layer and the CLI:
/// logs, mblogs, crps, is@<alpha>, wis, ae, mape.
struct ScoreName {
    enum class Kind { logs, mblogs, crps, interval, wis, ae, mape };

    Kind kind;
    double alpha = 0.0;  // interval scores only

    std::string to_string() const;
    Orientation orientation() const;
    /// Whether records of this score carry a meaningful decomposition.
    bool decomposed() const;

    /// Parses a registry name; unknown names raise an error listing the registry.
    static ScoreName parse(const std::string& name);
};

std::string score_registry_description();

struct ScoreConfig {
    std::vector<ScoreName> scores;
    IntervalLevelSet levels = IntervalLevelSet::hub();
    WisWeights weights{};
    LogScoreConfig log_config{-10.0, 5};

    void validate() const;

    static std::vector<ScoreName> parse_score_list(const std::string& comma_separated);
};

/// One scored (forecast, observation, score) cell. Scoring failures are
/// isolated per record: `error` is set and the breakdown is meaningless.
/// Scores without a decomposition report their value in breakdown.total with
/// the width/penalty fields zero.
struct ScoreRecord {
    ForecastUnitKey key;
    std::string score_name;
    ScoreBreakdown breakdown;
    Orientation orientation = Orientation::negatively_oriented;
    std::string error;

    bool ok() const { return error.empty(); }
};

std::vector<ScoreRecord> score_all(std::span<const QuantilePair> pairs, const ScoreConfig& cfg);
std::vector<ScoreRecord> score_all(std::span<const BinnedPair> pairs, const ScoreConfig& cfg);

enum class GroupField { model, location, target, target_end_date };

GroupField parse_group_field(const std::string& name);
std::string group_field_name(GroupField f);

/// Rendered grouping key of a unit, e.g. "model=ens|location=US";
/// "overall" for the empty grouping.
std::string render_group_key(const ForecastUnitKey& key, std::span<const GroupField> group_by);

struct AggregateReport {
    std::string group;  // rendered key, "overall" for the empty grouping
    std::map<std::string, ScoreBreakdown> mean_scores;
    std::map<std::string, std::int64_t> counts;
    std::map<std::string, std::int64_t> error_counts;
    std::map<double, double> coverage;  // nominal level -> empirical fraction
    std::int64_t coverage_pairs = 0;
};

/// Arithmetic means per group and score. Components are averaged separately;
/// for decomposed scores the mean total is their sum, so closure survives
/// aggregation exactly.
std::vector<AggregateReport> aggregate(std::span<const ScoreRecord> records,
                                       std::span<const GroupField> group_by);

/// Fraction of pairs whose observation falls inside the central (1-alpha)
/// interval (closed endpoints), per level. Keys are nominal coverages
/// 1 - alpha. Every pair must carry both interval endpoints.
std::map<double, double> empirical_coverage(std::span<const QuantilePair> pairs,
                                            const IntervalLevelSet& levels);

/// Quantile forecast of a negative binomial at the given levels (synthetic
/// unit key unless one is provided).
QuantileForecast negbin_quantile_forecast(const NegBinParams& params,
                                          std::span<const double> levels);
QuantileForecast negbin_quantile_forecast(const NegBinParams& params,
                                          std::span<const double> levels, ForecastUnitKey key);

/// Figure-style score-versus-observation table. Log scores appear negated
/// under neg_* column names so every column is negatively oriented; cells
/// whose score is undefined at a grid point (e.g. mape at y = 0) are NaN.
struct CurveTable {
    std::vector<std::string> columns;  // score columns, excluding the leading y
    std::vector<std::int64_t> ys;
    std::vector<std::vector<double>> values;  // values[row][column]
};

CurveTable score_curve(const NegBinParams& params, const ScoreConfig& cfg, std::int64_t y_min,
                       std::int64_t y_max);

/// Default curve upper end: beyond the 0.9999 quantile.
std::int64_t default_curve_y_max(const NegBinParams& params);

/// Long-format model-by-score table for cross-score comparisons, built from
/// per-model aggregates. Ranks are ascending per score (1 = best), min-rank
/// on ties; log scores are negated as in score_curve.
struct ScatterRow {
    std::string model;
    std::string score_x;
    std::string score_y;
    double x = 0.0;
    double y = 0.0;
    int rank_x = 0;
    int rank_y = 0;
};

std::vector<ScatterRow> scatter_data(std::span<const AggregateReport> by_model);

/// Display name and value for combined tables (neg_logs / neg_mblogs).
std::pair<std::string, double> combined_table_entry(const ScoreName& score, double value);

} // namespace qscore
