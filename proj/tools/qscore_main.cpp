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

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qscore/common.hpp"
#include "qscore/evaluate.hpp"

namespace {

using nlohmann::json;
using namespace qscore;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct ScoringOptions {
    std::string scores;
    std::vector<double> alphas;       // empty -> hub preset
    bool no_median = false;
    std::string normalizer = "k+1";   // k+1 | none
    double median_weight = 0.5;
    std::vector<double> weights;      // empty -> alpha/2 defaults
    double floor = -10.0;
    std::int64_t d = 5;
};

struct IoOptions {
    std::string forecasts;
    std::string truth;
    std::string input_format = "hub_quantile";  // hub_quantile | binned
    std::string format = "csv";                 // csv | json
    std::string output = "-";
    std::string config_path;
};

ScoreConfig build_score_config(const ScoringOptions& opts) {
    ScoreConfig cfg;
    cfg.scores = ScoreConfig::parse_score_list(opts.scores);
    if (!opts.alphas.empty()) {
        cfg.levels.alphas = opts.alphas;
        std::sort(cfg.levels.alphas.begin(), cfg.levels.alphas.end());
    } else {
        cfg.levels = IntervalLevelSet::hub();
    }
    cfg.levels.include_median = !opts.no_median;
    cfg.weights.median_weight = opts.median_weight;
    cfg.weights.interval_weights = opts.weights;
    if (opts.normalizer == "k+1") {
        cfg.weights.normalizer = WisNormalizer::divide_by_k_plus_1;
    } else if (opts.normalizer == "none") {
        cfg.weights.normalizer = WisNormalizer::none;
    } else {
        throw ValidationError("unknown normalizer '" + opts.normalizer +
                              "'; expected 'k+1' or 'none'");
    }
    cfg.log_config.truncation_floor = opts.floor;
    cfg.log_config.tolerance_radius = opts.d;
    cfg.validate();
    return cfg;
}

json scoring_options_json(const ScoringOptions& o) {
    return json{{"scores", o.scores},      {"alphas", o.alphas},
                {"no_median", o.no_median}, {"normalizer", o.normalizer},
                {"median_weight", o.median_weight}, {"weights", o.weights},
                {"floor", o.floor},        {"d", o.d}};
}

// ---------------------------------------------------------------------------
// output rendering

struct OutputTable {
    std::vector<std::string> columns;
    std::vector<json> rows;  // objects keyed by column name
};

std::string render_cell(const json& row, const std::string& column) {
    if (!row.contains(column) || row[column].is_null()) {
        return "";
    }
    const json& cell = row[column];
    if (cell.is_string()) {
        return cell.get<std::string>();
    }
    if (cell.is_number_integer()) {
        return std::to_string(cell.get<std::int64_t>());
    }
    if (cell.is_number()) {
        const double v = cell.get<double>();
        if (std::isnan(v)) {
            return "nan";
        }
        return format_double(v);
    }
    return cell.dump();
}

void emit_table(std::ostream& out, const OutputTable& table, const json& config,
                const std::string& format) {
    if (format == "json") {
        json doc;
        doc["config"] = config;
        doc["columns"] = table.columns;
        doc["rows"] = table.rows;
        out << doc.dump(2) << "\n";
        return;
    }
    out << "# config " << config.dump() << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << table.columns[i];
    }
    out << "\n";
    for (const json& row : table.rows) {
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            out << (i ? "," : "") << render_cell(row, table.columns[i]);
        }
        out << "\n";
    }
}

void write_output(const IoOptions& io, const OutputTable& table, const json& config) {
    if (io.format != "csv" && io.format != "json") {
        throw ValidationError("unknown output format '" + io.format + "'; expected csv or json");
    }
    if (io.output == "-") {
        emit_table(std::cout, table, config, io.format);
        return;
    }
    std::ofstream out(io.output);
    if (!out) {
        throw IoError("cannot write " + io.output);
    }
    emit_table(out, table, config, io.format);
}

// ---------------------------------------------------------------------------
// input loading

struct LoadedPairs {
    std::vector<QuantilePair> quantile;
    std::vector<BinnedPair> binned;
    std::vector<ForecastUnitKey> unmatched;
    bool is_binned = false;
};

LoadedPairs load_pairs(const IoOptions& io) {
    LoadedPairs out;
    const std::vector<Observation> truth = parse_truth_file(io.truth);
    if (io.input_format == "hub_quantile") {
        auto pairing = pair_with_truth(parse_hub_quantile_file(io.forecasts), truth);
        out.quantile = std::move(pairing.pairs);
        out.unmatched = std::move(pairing.unmatched);
    } else if (io.input_format == "binned") {
        auto pairing = pair_with_truth(parse_binned_file(io.forecasts), truth);
        out.binned = std::move(pairing.pairs);
        out.unmatched = std::move(pairing.unmatched);
        out.is_binned = true;
    } else {
        throw ValidationError("unknown input format '" + io.input_format +
                              "'; expected hub_quantile or binned");
    }
    if (!out.unmatched.empty()) {
        std::cerr << out.unmatched.size() << " forecast(s) without a matching observation:\n";
        for (const auto& key : out.unmatched) {
            std::cerr << "  " << key.to_string() << "\n";
        }
    }
    return out;
}

std::vector<ScoreRecord> run_score_all(const LoadedPairs& pairs, const ScoreConfig& cfg) {
    return pairs.is_binned ? score_all(std::span<const BinnedPair>(pairs.binned), cfg)
                           : score_all(std::span<const QuantilePair>(pairs.quantile), cfg);
}

json key_fields(const ForecastUnitKey& key) {
    return json{{"model", key.model_id},
                {"location", key.location},
                {"target", key.target},
                {"target_end_date", key.target_end_date.to_string()},
                {"forecast_date", key.forecast_date.to_string()}};
}

const std::vector<std::string> kKeyColumns{"model", "location", "target", "target_end_date",
                                           "forecast_date"};

OutputTable records_table(const std::vector<ScoreRecord>& records) {
    OutputTable table;
    table.columns = kKeyColumns;
    for (const char* c : {"score", "value", "dispersion", "overprediction", "underprediction",
                          "orientation", "error"}) {
        table.columns.push_back(c);
    }
    for (const ScoreRecord& r : records) {
        json row = key_fields(r.key);
        row["score"] = r.score_name;
        row["orientation"] = r.orientation == Orientation::positively_oriented
                                 ? "positively_oriented"
                                 : "negatively_oriented";
        if (r.ok()) {
            row["value"] = r.breakdown.total;
            row["dispersion"] = r.breakdown.dispersion;
            row["overprediction"] = r.breakdown.overprediction;
            row["underprediction"] = r.breakdown.underprediction;
            row["error"] = "";
        } else {
            row["value"] = nullptr;
            row["dispersion"] = nullptr;
            row["overprediction"] = nullptr;
            row["underprediction"] = nullptr;
            row["error"] = r.error;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string coverage_column(double nominal) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "coverage_%g", 100.0 * nominal);
    return buf;
}

// ---------------------------------------------------------------------------
// config file merging: flags beat config values

class ConfigMerger {
public:
    explicit ConfigMerger(const std::string& path) {
        if (path.empty()) {
            return;
        }
        std::ifstream in(path);
        if (!in) {
            throw IoError("cannot read config file " + path);
        }
        try {
            in >> config_;
        } catch (const json::exception& err) {
            throw ValidationError(std::string("config file is not valid JSON: ") + err.what());
        }
        if (!config_.is_object()) {
            throw ValidationError("config file must hold a JSON object");
        }
    }

    template <typename T>
    void merge(const CLI::App* cmd, const std::string& flag, T& target) const {
        if (config_.is_null() || !config_.contains(flag)) {
            return;
        }
        const CLI::Option* opt = cmd->get_option("--" + flag);
        if (opt->count() > 0) {
            return;  // explicit flag wins
        }
        try {
            target = config_.at(flag).get<T>();
        } catch (const json::exception&) {
            throw ValidationError("config key '" + flag + "' has the wrong type");
        }
    }

private:
    json config_;
};

void merge_scoring(const ConfigMerger& merger, const CLI::App* cmd, ScoringOptions& opts) {
    merger.merge(cmd, "scores", opts.scores);
    merger.merge(cmd, "alphas", opts.alphas);
    merger.merge(cmd, "no-median", opts.no_median);
    merger.merge(cmd, "normalizer", opts.normalizer);
    merger.merge(cmd, "median-weight", opts.median_weight);
    merger.merge(cmd, "weights", opts.weights);
    merger.merge(cmd, "floor", opts.floor);
    merger.merge(cmd, "d", opts.d);
}

void merge_io(const ConfigMerger& merger, const CLI::App* cmd, IoOptions& io) {
    merger.merge(cmd, "forecasts", io.forecasts);
    merger.merge(cmd, "truth", io.truth);
    merger.merge(cmd, "input-format", io.input_format);
    merger.merge(cmd, "format", io.format);
    merger.merge(cmd, "output", io.output);
}

void add_scoring_flags(CLI::App* cmd, ScoringOptions& opts, const std::string& default_scores) {
    opts.scores = default_scores;
    cmd->add_option("--scores", opts.scores,
                    "comma-separated scores (" + score_registry_description() + ")");
    cmd->add_option("--alphas", opts.alphas,
                    "explicit interval alphas in (0,1]; default: hub preset")
        ->delimiter(',');
    cmd->add_flag("--no-median", opts.no_median, "drop the median term from wis");
    cmd->add_option("--normalizer", opts.normalizer, "wis normalizer: k+1 (default) or none");
    cmd->add_option("--median-weight", opts.median_weight, "wis median weight (default 0.5)");
    cmd->add_option("--weights", opts.weights,
                    "custom wis interval weights; default alpha/2")
        ->delimiter(',');
    cmd->add_option("--floor", opts.floor, "log score truncation floor (default -10)");
    cmd->add_option("--d", opts.d, "multibin tolerance radius (default 5)");
}

void add_io_flags(CLI::App* cmd, IoOptions& io, bool needs_inputs) {
    if (needs_inputs) {
        cmd->add_option("--forecasts", io.forecasts, "forecast file")->required(false);
        cmd->add_option("--truth", io.truth, "truth file")->required(false);
        cmd->add_option("--input-format", io.input_format, "hub_quantile (default) or binned");
    }
    cmd->add_option("--format", io.format, "output format: csv (default) or json");
    cmd->add_option("--output", io.output, "output path, - for stdout (default)");
    cmd->add_option("--config", io.config_path, "JSON config file; flags take precedence");
}

void require_inputs(const IoOptions& io) {
    if (io.forecasts.empty()) {
        throw ValidationError("--forecasts is required (flag or config file)");
    }
    if (io.truth.empty()) {
        throw ValidationError("--truth is required (flag or config file)");
    }
}

json effective_config(const ScoringOptions& scoring, const IoOptions& io,
                      const json& extra = json::object()) {
    json cfg = scoring_options_json(scoring);
    cfg["input_format"] = io.input_format;
    cfg["format"] = io.format;
    for (const auto& [key, value] : extra.items()) {
        cfg[key] = value;
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// subcommand bodies

int cmd_score(const ScoringOptions& scoring, const IoOptions& io) {
    require_inputs(io);
    const ScoreConfig cfg = build_score_config(scoring);
    const LoadedPairs pairs = load_pairs(io);
    const std::vector<ScoreRecord> records = run_score_all(pairs, cfg);
    write_output(io, records_table(records), effective_config(scoring, io));
    return kExitOk;
}

int cmd_aggregate(const ScoringOptions& scoring, const IoOptions& io,
                  const std::vector<std::string>& group_by_names) {
    require_inputs(io);
    const ScoreConfig cfg = build_score_config(scoring);
    std::vector<GroupField> group_by;
    for (const auto& name : group_by_names) {
        group_by.push_back(parse_group_field(name));
    }

    const LoadedPairs pairs = load_pairs(io);
    const std::vector<ScoreRecord> records = run_score_all(pairs, cfg);
    std::vector<AggregateReport> reports = aggregate(records, group_by);

    // group the pairs the same way for the coverage columns
    std::map<std::string, std::vector<QuantilePair>> pairs_by_group;
    if (pairs.is_binned) {
        const std::vector<double> needed = cfg.levels.quantile_levels();
        for (const BinnedPair& p : pairs.binned) {
            pairs_by_group[render_group_key(p.forecast.unit_key(), group_by)].push_back(
                {p.forecast.quantiles(needed), p.observed});
        }
    } else {
        for (const QuantilePair& p : pairs.quantile) {
            pairs_by_group[render_group_key(p.forecast.unit_key(), group_by)].push_back(p);
        }
    }
    for (AggregateReport& report : reports) {
        const auto it = pairs_by_group.find(report.group);
        if (it == pairs_by_group.end()) {
            continue;
        }
        try {
            report.coverage = empirical_coverage(it->second, cfg.levels);
            report.coverage_pairs = static_cast<std::int64_t>(it->second.size());
        } catch (const std::exception& err) {
            std::cerr << "coverage unavailable for group " << report.group << ": " << err.what()
                      << "\n";
        }
    }

    OutputTable table;
    table.columns = {"group", "score", "mean", "dispersion", "overprediction",
                     "underprediction", "count", "errors"};
    for (const double alpha : cfg.levels.alphas) {
        table.columns.push_back(coverage_column(1.0 - alpha));
    }
    table.columns.push_back("coverage_pairs");
    for (const AggregateReport& report : reports) {
        std::vector<std::string> scores;
        for (const auto& [score, mean] : report.mean_scores) {
            (void)mean;
            scores.push_back(score);
        }
        for (const auto& [score, count] : report.error_counts) {
            (void)count;
            if (!report.mean_scores.count(score)) {
                scores.push_back(score);
            }
        }
        std::sort(scores.begin(), scores.end());
        for (const std::string& score : scores) {
            json row;
            row["group"] = report.group;
            row["score"] = score;
            if (const auto it = report.mean_scores.find(score); it != report.mean_scores.end()) {
                row["mean"] = it->second.total;
                row["dispersion"] = it->second.dispersion;
                row["overprediction"] = it->second.overprediction;
                row["underprediction"] = it->second.underprediction;
            }
            row["count"] = report.counts.count(score) ? report.counts.at(score) : 0;
            row["errors"] =
                report.error_counts.count(score) ? report.error_counts.at(score) : 0;
            for (const auto& [nominal, fraction] : report.coverage) {
                row[coverage_column(nominal)] = fraction;
            }
            row["coverage_pairs"] = report.coverage_pairs;
            table.rows.push_back(std::move(row));
        }
    }

    json extra;
    extra["group_by"] = group_by_names;
    write_output(io, table, effective_config(scoring, io, extra));
    return kExitOk;
}

int cmd_curves(const ScoringOptions& scoring, const IoOptions& io, double mu, double psi,
               std::int64_t y_min, std::optional<std::int64_t> y_max) {
    const ScoreConfig cfg = build_score_config(scoring);
    const NegBinParams params(mu, psi);
    const std::int64_t upper = y_max ? *y_max : default_curve_y_max(params);
    const CurveTable curve = score_curve(params, cfg, y_min, upper);

    OutputTable table;
    table.columns.push_back("y");
    for (const auto& c : curve.columns) {
        table.columns.push_back(c);
    }
    for (std::size_t i = 0; i < curve.ys.size(); ++i) {
        json row;
        row["y"] = curve.ys[i];
        for (std::size_t j = 0; j < curve.columns.size(); ++j) {
            const double v = curve.values[i][j];
            if (std::isnan(v)) {
                row[curve.columns[j]] = nullptr;
            } else {
                row[curve.columns[j]] = v;
            }
        }
        table.rows.push_back(std::move(row));
    }

    json extra;
    extra["mu"] = mu;
    extra["psi"] = psi;
    extra["y_min"] = y_min;
    extra["y_max"] = upper;
    write_output(io, table, effective_config(scoring, io, extra));
    return kExitOk;
}

int cmd_decompose(const ScoringOptions& scoring, const IoOptions& io) {
    require_inputs(io);
    const ScoreConfig cfg = build_score_config(scoring);
    for (const ScoreName& s : cfg.scores) {
        if (!s.decomposed()) {
            throw ValidationError("decompose needs decomposition-bearing scores; '" +
                                  s.to_string() + "' has none (use wis, is@<alpha>, ae or mape)");
        }
    }
    const LoadedPairs pairs = load_pairs(io);
    const std::vector<ScoreRecord> records = run_score_all(pairs, cfg);

    OutputTable table;
    table.columns = kKeyColumns;
    for (const char* c :
         {"score", "row_type", "total", "dispersion", "overprediction", "underprediction",
          "error"}) {
        table.columns.push_back(c);
    }
    for (const ScoreRecord& r : records) {
        json row = key_fields(r.key);
        row["score"] = r.score_name;
        row["row_type"] = "unit";
        if (r.ok()) {
            row["total"] = r.breakdown.total;
            row["dispersion"] = r.breakdown.dispersion;
            row["overprediction"] = r.breakdown.overprediction;
            row["underprediction"] = r.breakdown.underprediction;
            row["error"] = "";
        } else {
            row["error"] = r.error;
        }
        table.rows.push_back(std::move(row));
    }

    const GroupField by_model[] = {GroupField::model};
    for (const AggregateReport& report : aggregate(records, by_model)) {
        for (const auto& [score, mean] : report.mean_scores) {
            json row;
            row["model"] = report.group.substr(6);  // strip "model="
            row["location"] = "*";
            row["target"] = "*";
            row["target_end_date"] = "*";
            row["forecast_date"] = "*";
            row["score"] = score;
            row["row_type"] = "mean";
            row["total"] = mean.total;
            row["dispersion"] = mean.dispersion;
            row["overprediction"] = mean.overprediction;
            row["underprediction"] = mean.underprediction;
            row["error"] = "";
            table.rows.push_back(std::move(row));
        }
    }

    write_output(io, table, effective_config(scoring, io));
    return kExitOk;
}

int cmd_scatter(const ScoringOptions& scoring, const IoOptions& io) {
    require_inputs(io);
    const ScoreConfig cfg = build_score_config(scoring);
    const LoadedPairs pairs = load_pairs(io);
    const std::vector<ScoreRecord> records = run_score_all(pairs, cfg);
    const GroupField by_model[] = {GroupField::model};
    const std::vector<AggregateReport> reports = aggregate(records, by_model);
    const std::vector<ScatterRow> rows = scatter_data(reports);

    OutputTable table;
    table.columns = {"model", "score_x", "score_y", "x", "y", "rank_x", "rank_y"};
    for (const ScatterRow& r : rows) {
        json row;
        row["model"] = r.model;
        row["score_x"] = r.score_x;
        row["score_y"] = r.score_y;
        row["x"] = r.x;
        row["y"] = r.y;
        row["rank_x"] = r.rank_x;
        row["rank_y"] = r.rank_y;
        table.rows.push_back(std::move(row));
    }
    write_output(io, table, effective_config(scoring, io));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scoring of probabilistic forecasts reported as quantiles, central "
                 "prediction intervals or binned distributions"};
    app.require_subcommand(1);

    struct SubState {
        ScoringOptions scoring;
        IoOptions io;
        std::vector<std::string> group_by{"model"};
        double mu = 0.0;
        double psi = 0.0;
        std::int64_t y_min = 0;
        std::optional<std::int64_t> y_max;
    };

    auto score_state = std::make_shared<SubState>();
    CLI::App* score = app.add_subcommand("score", "score each forecast-observation pair");
    add_scoring_flags(score, score_state->scoring, "wis,ae");
    add_io_flags(score, score_state->io, true);

    auto agg_state = std::make_shared<SubState>();
    CLI::App* agg = app.add_subcommand("aggregate", "grouped mean scores and coverage");
    add_scoring_flags(agg, agg_state->scoring, "wis,ae");
    add_io_flags(agg, agg_state->io, true);
    agg->add_option("--group-by", agg_state->group_by,
                    "fields: model, location, target, target_end_date")
        ->delimiter(',');

    auto curve_state = std::make_shared<SubState>();
    CLI::App* curves = app.add_subcommand("curves", "score-versus-observation tables");
    add_scoring_flags(curves, curve_state->scoring, "logs,ae,is@0.2,crps,wis");
    add_io_flags(curves, curve_state->io, false);
    curves->add_option("--mu", curve_state->mu, "negative binomial mean")->required();
    curves->add_option("--psi", curve_state->psi, "negative binomial size")->required();
    curves->add_option("--y-min", curve_state->y_min, "first observation value (default 0)");
    auto* ymax_opt = curves->add_option("--y-max", curve_state->y_max,
                                        "last observation value (default: 0.9999 quantile + 50)");

    auto dec_state = std::make_shared<SubState>();
    CLI::App* decompose = app.add_subcommand("decompose", "width/penalty decomposition table");
    add_scoring_flags(decompose, dec_state->scoring, "wis");
    add_io_flags(decompose, dec_state->io, true);

    auto scat_state = std::make_shared<SubState>();
    CLI::App* scatter = app.add_subcommand("scatter", "cross-score comparison per model");
    add_scoring_flags(scatter, scat_state->scoring, "wis,crps,ae");
    add_io_flags(scatter, scat_state->io, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (score->parsed()) {
            ConfigMerger merger(score_state->io.config_path);
            merge_scoring(merger, score, score_state->scoring);
            merge_io(merger, score, score_state->io);
            return cmd_score(score_state->scoring, score_state->io);
        }
        if (agg->parsed()) {
            ConfigMerger merger(agg_state->io.config_path);
            merge_scoring(merger, agg, agg_state->scoring);
            merge_io(merger, agg, agg_state->io);
            merger.merge(agg, "group-by", agg_state->group_by);
            return cmd_aggregate(agg_state->scoring, agg_state->io, agg_state->group_by);
        }
        if (curves->parsed()) {
            ConfigMerger merger(curve_state->io.config_path);
            merge_scoring(merger, curves, curve_state->scoring);
            merge_io(merger, curves, curve_state->io);
            if (ymax_opt->count() == 0) {
                curve_state->y_max.reset();
            }
            return cmd_curves(curve_state->scoring, curve_state->io, curve_state->mu,
                              curve_state->psi, curve_state->y_min, curve_state->y_max);
        }
        if (decompose->parsed()) {
            ConfigMerger merger(dec_state->io.config_path);
            merge_scoring(merger, decompose, dec_state->scoring);
            merge_io(merger, decompose, dec_state->io);
            return cmd_decompose(dec_state->scoring, dec_state->io);
        }
        if (scatter->parsed()) {
            ConfigMerger merger(scat_state->io.config_path);
            merge_scoring(merger, scatter, scat_state->scoring);
            merge_io(merger, scatter, scat_state->io);
            return cmd_scatter(scat_state->scoring, scat_state->io);
        }
    } catch (const IoError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitIo;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
