// SPDX-License-Identifier: Apache-2.0
//
// rkamimo: randomized Kaczmarz receive combining for massive MIMO uplink
// Copyright (C) 2026 The rkamimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#ifndef RKAMIMO_HARNESS_TABLE_HPP
#define RKAMIMO_HARNESS_TABLE_HPP

#include "../core.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#ifndef RKAMIMO_GIT_HASH
#define RKAMIMO_GIT_HASH "unknown"
#endif

namespace rkamimo::harness {

/// Documented CSV schemas: id and column list.
struct Schema {
    const char* id;
    std::vector<std::string> columns;
};

namespace schema {
inline const Schema fig1{"rkamimo.fig1.v1", {"alpha", "estimator", "correlation", "value", "cdf"}};
inline const Schema fig2{"rkamimo.fig2.v1", {"estimator", "correlation", "T", "se_mean", "se_stderr", "se_rzf_ref"}};
inline const Schema fig3{"rkamimo.fig3.v1", {"loading", "estimator", "correlation", "T", "gap_percent"}};
inline const Schema fig4{"rkamimo.fig4.v1", {"sweep", "r", "sigma_db", "estimator", "T", "gap_percent"}};
inline const Schema fig5{"rkamimo.fig5.v1", {"loading", "M", "K", "t_upper_rzf", "t_upper_zf"}};
inline const Schema fig5_tradeoff{"rkamimo.fig5_tradeoff.v1",
                                  {"M", "K", "loading", "t_upper_zf", "t_upper_rzf", "T_target_10", "T_target_1"}};
inline const Schema fig5_thresholds{"rkamimo.fig5_thresholds.v1",
                                    {"loading", "correlation", "tolerance_percent", "T_target", "threshold_M"}};
inline const Schema fig5_ratio{"rkamimo.fig5_ratio.v1", {"M", "K", "t_upper_rzf", "T_measured", "ratio"}};
inline const Schema table3{"rkamimo.table3.v1",
                           {"loading", "correlation", "tolerance_percent", "t_bar", "reached", "last_gap"}};
} // namespace schema

using Cell = std::variant<std::string, double, std::int64_t>;

/// Nine significant digits; empty cell for NaN (missing value).
inline std::string format_cell(const Cell& c)
{
    if (const auto* s = std::get_if<std::string>(&c)) {
        return *s;
    }
    if (const auto* i = std::get_if<std::int64_t>(&c)) {
        return std::to_string(*i);
    }
    const double v = std::get<double>(c);
    if (std::isnan(v)) {
        return "";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

/// 64-bit FNV-1a, used as a content digest of the resolved configuration.
inline std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct Metadata {
    std::uint64_t seed = 0;
    std::string command;
    std::string config; // canonical key = value text
    std::string git_hash = RKAMIMO_GIT_HASH;

    std::string digest() const { return hex64(fnv1a(command + "\n" + config)); }
};

class ResultTable {
public:
    ResultTable(const Schema& s, Metadata meta) : schema_(s), meta_(std::move(meta)) {}

    void add(std::vector<Cell> row)
    {
        if (row.size() != schema_.columns.size()) {
            throw std::logic_error(std::string("ResultTable ") + schema_.id + ": row has wrong arity");
        }
        rows_.push_back(std::move(row));
    }

    const Schema& schema() const { return schema_; }
    const Metadata& metadata() const { return meta_; }
    std::size_t size() const { return rows_.size(); }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }

    double number(std::size_t row, const std::string& column) const
    {
        const Cell& c = rows_.at(row).at(column_index(column));
        if (const auto* d = std::get_if<double>(&c)) return *d;
        if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
        throw std::logic_error("column '" + column + "' is not numeric");
    }

    std::string text(std::size_t row, const std::string& column) const
    {
        return format_cell(rows_.at(row).at(column_index(column)));
    }

    void write_csv(std::ostream& os) const
    {
        for (std::size_t j = 0; j < schema_.columns.size(); ++j) {
            os << (j ? "," : "") << schema_.columns[j];
        }
        os << '\n';
        for (const auto& row : rows_) {
            for (std::size_t j = 0; j < row.size(); ++j) {
                os << (j ? "," : "") << format_cell(row[j]);
            }
            os << '\n';
        }
    }

    std::string csv() const
    {
        std::ostringstream os;
        write_csv(os);
        return os.str();
    }

    nlohmann::json metadata_json() const
    {
        nlohmann::json j;
        j["schema"] = schema_.id;
        j["columns"] = schema_.columns;
        j["rows"] = rows_.size();
        j["seed"] = meta_.seed;
        j["command"] = meta_.command;
        j["spec_digest"] = meta_.digest();
        j["git_hash"] = meta_.git_hash;
        j["config"] = meta_.config;
        return j;
    }

    /// Writes `<dir>/<name>.csv` and the `<name>.csv.meta.json` sidecar.
    std::filesystem::path save(const std::filesystem::path& dir, const std::string& name) const
    {
        std::filesystem::create_directories(dir);
        const auto path = dir / (name + ".csv");
        {
            std::ofstream out(path);
            if (!out) {
                throw error("cannot write '" + path.string() + "'");
            }
            write_csv(out);
        }
        std::ofstream meta(path.string() + ".meta.json");
        if (!meta) {
            throw error("cannot write metadata for '" + path.string() + "'");
        }
        meta << metadata_json().dump(2) << '\n';
        return path;
    }

private:
    std::size_t column_index(const std::string& column) const
    {
        for (std::size_t j = 0; j < schema_.columns.size(); ++j) {
            if (schema_.columns[j] == column) return j;
        }
        throw std::out_of_range("unknown column '" + column + "' in " + schema_.id);
    }

    Schema schema_;
    Metadata meta_;
    std::vector<std::vector<Cell>> rows_;
};

} // namespace rkamimo::harness

#endif
