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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

#include "qscore/common.hpp"

namespace qscore {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

double parse_number(const std::string& text, long line) {
    double out = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    const auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc{} || res.ptr != e || text.empty()) {
        throw ParseError("malformed number '" + text + "'", line);
    }
    return out;
}

Date parse_date(const std::string& text, long line) {
    try {
        return Date::parse(text);
    } catch (const ValidationError& err) {
        throw ParseError(err.what(), line);
    }
}

void expect_header(const std::string& got, const std::string& want) {
    // tolerate a trailing \r from CRLF files
    std::string trimmed = got;
    if (!trimmed.empty() && trimmed.back() == '\r') {
        trimmed.pop_back();
    }
    if (trimmed != want) {
        throw ParseError("unexpected header '" + trimmed + "', expected '" + want + "'", 1);
    }
}

struct UnitKeyLess {
    bool operator()(const ForecastUnitKey& a, const ForecastUnitKey& b) const { return a < b; }
};

} // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::vector<QuantileForecast> parse_hub_quantile_file(std::istream& in) {
    static const std::string kHeader =
        "model,forecast_date,target,target_end_date,location,type,quantile,value";
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("empty quantile file", 1);
    }
    expect_header(line, kHeader);

    struct Accum {
        std::map<double, double> levels;
        std::optional<double> point;
    };
    std::map<ForecastUnitKey, Accum, UnitKeyLess> units;

    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 8) {
            throw ParseError("expected 8 fields, got " + std::to_string(fields.size()), line_no);
        }
        ForecastUnitKey key{fields[0], fields[4], fields[2], parse_date(fields[3], line_no),
                            parse_date(fields[1], line_no)};
        try {
            key.validate();
        } catch (const ValidationError& err) {
            throw ParseError(err.what(), line_no);
        }
        Accum& acc = units[key];
        const std::string& type = fields[5];
        if (type == "point") {
            if (!fields[6].empty()) {
                throw ParseError("point row must leave the quantile field empty", line_no);
            }
            if (acc.point) {
                throw ParseError("duplicate point row for " + key.to_string(), line_no);
            }
            acc.point = parse_number(fields[7], line_no);
        } else if (type == "quantile") {
            const double level = parse_number(fields[6], line_no);
            const double value = parse_number(fields[7], line_no);
            if (!acc.levels.emplace(level, value).second) {
                throw ParseError("duplicate quantile level " + fields[6] + " for " +
                                 key.to_string(), line_no);
            }
        } else {
            throw ParseError("row type '" + type + "' is not one of {point, quantile}", line_no);
        }
    }

    std::vector<QuantileForecast> out;
    out.reserve(units.size());
    for (auto& [key, acc] : units) {
        std::vector<QuantileEntry> entries;
        entries.reserve(acc.levels.size());
        for (const auto& [level, value] : acc.levels) {
            entries.push_back({level, value});
        }
        out.emplace_back(key, std::move(entries), acc.point);
    }
    return out;
}

std::vector<QuantileForecast> parse_hub_quantile_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path);
    }
    return parse_hub_quantile_file(in);
}

void write_hub_quantile_file(std::ostream& out, const std::vector<QuantileForecast>& forecasts) {
    out << "model,forecast_date,target,target_end_date,location,type,quantile,value\n";
    for (const auto& f : forecasts) {
        const auto& k = f.unit_key();
        const std::string prefix = k.model_id + "," + k.forecast_date.to_string() + "," + k.target +
                                   "," + k.target_end_date.to_string() + "," + k.location + ",";
        if (f.point()) {
            out << prefix << "point,," << format_double(*f.point()) << "\n";
        }
        for (const auto& e : f.entries()) {
            out << prefix << "quantile," << format_double(e.level) << ","
                << format_double(e.value) << "\n";
        }
    }
}

void write_hub_quantile_file(const std::string& path,
                             const std::vector<QuantileForecast>& forecasts) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    write_hub_quantile_file(out, forecasts);
}

std::vector<BinnedForecast> parse_binned_file(std::istream& in) {
    static const std::string kHeader =
        "model,forecast_date,target,target_end_date,location,bin_start,bin_end,prob";
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("empty binned file", 1);
    }
    expect_header(line, kHeader);

    std::map<ForecastUnitKey, std::vector<Bin>, UnitKeyLess> units;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 8) {
            throw ParseError("expected 8 fields, got " + std::to_string(fields.size()), line_no);
        }
        ForecastUnitKey key{fields[0], fields[4], fields[2], parse_date(fields[3], line_no),
                            parse_date(fields[1], line_no)};
        try {
            key.validate();
        } catch (const ValidationError& err) {
            throw ParseError(err.what(), line_no);
        }
        units[key].push_back({parse_number(fields[5], line_no), parse_number(fields[6], line_no),
                              parse_number(fields[7], line_no)});
    }

    std::vector<BinnedForecast> out;
    out.reserve(units.size());
    for (auto& [key, bins] : units) {
        std::stable_sort(bins.begin(), bins.end(),
                         [](const Bin& a, const Bin& b) { return a.lower < b.lower; });
        out.emplace_back(key, std::move(bins));
    }
    return out;
}

std::vector<BinnedForecast> parse_binned_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path);
    }
    return parse_binned_file(in);
}

void write_binned_file(std::ostream& out, const std::vector<BinnedForecast>& forecasts) {
    out << "model,forecast_date,target,target_end_date,location,bin_start,bin_end,prob\n";
    for (const auto& f : forecasts) {
        const auto& k = f.unit_key();
        const std::string prefix = k.model_id + "," + k.forecast_date.to_string() + "," + k.target +
                                   "," + k.target_end_date.to_string() + "," + k.location + ",";
        for (const auto& b : f.bins()) {
            out << prefix << format_double(b.lower) << "," << format_double(b.upper) << ","
                << format_double(b.prob) << "\n";
        }
    }
}

void write_binned_file(const std::string& path, const std::vector<BinnedForecast>& forecasts) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    write_binned_file(out, forecasts);
}

std::vector<Observation> parse_truth_file(std::istream& in) {
    static const std::string kHeader = "location,target,target_end_date,value";
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("empty truth file", 1);
    }
    expect_header(line, kHeader);

    std::vector<Observation> out;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 4) {
            throw ParseError("expected 4 fields, got " + std::to_string(fields.size()), line_no);
        }
        Observation obs{fields[0], fields[1], parse_date(fields[2], line_no),
                        parse_number(fields[3], line_no)};
        try {
            obs.validate();
        } catch (const ValidationError& err) {
            throw ParseError(err.what(), line_no);
        }
        out.push_back(std::move(obs));
    }
    return out;
}

std::vector<Observation> parse_truth_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path);
    }
    return parse_truth_file(in);
}

void write_truth_file(std::ostream& out, const std::vector<Observation>& observations) {
    out << "location,target,target_end_date,value\n";
    for (const auto& o : observations) {
        out << o.location << "," << o.target << "," << o.target_end_date.to_string() << ","
            << format_double(o.value) << "\n";
    }
}

namespace {

template <typename Forecast>
PairingResult<Forecast> pair_impl(std::vector<Forecast> forecasts,
                                  const std::vector<Observation>& observations) {
    using TruthKey = std::tuple<std::string, std::string, Date>;
    std::map<TruthKey, double> truth;
    for (const auto& o : observations) {
        const TruthKey key{o.location, o.target, o.target_end_date};
        if (!truth.emplace(key, o.value).second) {
            throw ValidationError("duplicate observation for " + o.location + "/" + o.target +
                                  "/" + o.target_end_date.to_string());
        }
    }
    PairingResult<Forecast> out;
    for (auto& f : forecasts) {
        const auto& k = f.unit_key();
        const auto it = truth.find(TruthKey{k.location, k.target, k.target_end_date});
        if (it == truth.end()) {
            out.unmatched.push_back(k);
        } else {
            out.pairs.push_back({std::move(f), it->second});
        }
    }
    return out;
}

} // namespace

PairingResult<QuantileForecast> pair_with_truth(std::vector<QuantileForecast> forecasts,
                                                const std::vector<Observation>& observations) {
    return pair_impl(std::move(forecasts), observations);
}

PairingResult<BinnedForecast> pair_with_truth(std::vector<BinnedForecast> forecasts,
                                              const std::vector<Observation>& observations) {
    return pair_impl(std::move(forecasts), observations);
}

} // namespace qscore
