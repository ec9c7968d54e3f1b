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


#ifndef RKAMIMO_CONFIG_HPP
#define RKAMIMO_CONFIG_HPP

#include "core.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace rkamimo {

/// Thermal noise over 20 MHz with a 10 dB receiver noise figure
/// (-174 dBm/Hz + 73.0103 dB + 10 dB). Rounds to the -91 dBm table value.
inline const double kDefaultNoisePowerDbm = -174.0 + 10.0 * std::log10(20e6) + 10.0;

/// Single-cell scenario parameters. Defaults reproduce the dense-urban
/// NLoS setup (M=100, K=10, 250 m square cell, Gamma=-35.3 dB, alpha=3.76).
struct SystemConfig {
    Index M = 100;
    Index K = 10;
    double cell_side = 250.0;     // m
    double min_distance = 35.0;   // m
    double gamma_db = -35.3;      // pathloss at 1 m
    double alpha = 3.76;
    double sigma_sf_db = 4.0;
    double r_corr = 0.5;
    double ul_power_dbm = 20.0;
    double noise_power_dbm = kDefaultNoisePowerDbm;
    Index tau_c = 200;
    std::optional<Index> tau_p;   // defaults to K
    std::optional<double> xi;     // defaults to 1 / rho_ul
    double bandwidth_hz = 20e6;   // metadata only

    /// Normalized UL SNR (linear).
    double rho_ul() const { return db_to_linear(ul_power_dbm - noise_power_dbm); }
    double rho_ul_db() const { return ul_power_dbm - noise_power_dbm; }
    Index pilot_length() const { return tau_p.value_or(K); }
    Index tau_ul() const { return tau_c - pilot_length(); }
    double regularization() const { return xi.value_or(1.0 / rho_ul()); }

    void validate() const
    {
        if (K < 1 || K > M) {
            throw invalid_config("config: need 1 <= K <= M (K=" + std::to_string(K) +
                                 ", M=" + std::to_string(M) + ")");
        }
        if (pilot_length() < K) {
            throw invalid_config("config: pilot length tau_p must be >= K");
        }
        if (tau_c <= pilot_length()) {
            throw invalid_config("config: tau_c must exceed tau_p");
        }
        if (!(r_corr >= 0.0 && r_corr <= 1.0)) {
            throw invalid_config("config: r_corr must lie in [0, 1]");
        }
        if (!(min_distance >= 0.0) || !(cell_side > 0.0)) {
            throw invalid_config("config: cell_side must be > 0 and min_distance >= 0");
        }
        if (!(sigma_sf_db >= 0.0)) {
            throw invalid_config("config: sigma_sf_db must be >= 0");
        }
        if (!(regularization() >= 0.0)) {
            throw invalid_config("config: xi must be >= 0");
        }
        if (!(rho_ul() > 0.0) || !std::isfinite(rho_ul())) {
            throw invalid_config("config: UL SNR must be positive and finite");
        }
    }
};

enum class Estimator { True, LS, MMSE };
enum class Correlation { Uncorrelated, Correlated };

inline std::string to_string(Estimator e)
{
    switch (e) {
    case Estimator::True: return "TRUE";
    case Estimator::LS: return "LS";
    case Estimator::MMSE: return "MMSE";
    }
    return "?";
}

inline std::string to_string(Correlation c)
{
    return c == Correlation::Correlated ? "correlated" : "uncorrelated";
}

inline Estimator parse_estimator(std::string_view s)
{
    if (s == "TRUE" || s == "true" || s == "perfect") return Estimator::True;
    if (s == "LS" || s == "ls") return Estimator::LS;
    if (s == "MMSE" || s == "mmse") return Estimator::MMSE;
    throw invalid_config("unknown estimator tag '" + std::string(s) + "'");
}

inline Correlation parse_correlation(std::string_view s)
{
    if (s == "uncorrelated" || s == "off" || s == "none") return Correlation::Uncorrelated;
    if (s == "correlated" || s == "moderate" || s == "on") return Correlation::Correlated;
    throw invalid_config("unknown correlation mode '" + std::string(s) + "'");
}

/// A system configuration plus the CSI model used to evaluate it.
struct Scenario {
    SystemConfig system;
    Estimator estimator = Estimator::LS;
    Correlation correlation = Correlation::Uncorrelated;
};

/// Flat key/value configuration text:
///
///     # comment
///     [system]
///     M = 100
///     channel.alpha = 3.76
///
/// A `[section]` header prefixes the keys that follow it with `section.`;
/// dotted keys may also be written out in full. Later assignments win.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in, const std::string& origin = "<config>")
    {
        KeyValueConfig cfg;
        std::string line;
        std::string section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) {
                line.erase(hash);
            }
            const auto text = trim(line);
            if (text.empty()) {
                continue;
            }
            if (text.front() == '[') {
                if (text.back() != ']') {
                    throw invalid_config(origin + ":" + std::to_string(lineno) + ": malformed section header");
                }
                section = trim(text.substr(1, text.size() - 2));
                continue;
            }
            const auto eq = text.find('=');
            if (eq == std::string::npos) {
                throw invalid_config(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
            }
            auto key = trim(text.substr(0, eq));
            auto value = trim(text.substr(eq + 1));
            if (key.empty()) {
                throw invalid_config(origin + ":" + std::to_string(lineno) + ": empty key");
            }
            if (!section.empty() && key.find('.') == std::string::npos) {
                key = section + "." + key;
            }
            cfg.values_[key] = value;
        }
        return cfg;
    }

    static KeyValueConfig parse_string(const std::string& text)
    {
        std::istringstream in(text);
        return parse(in);
    }

    static KeyValueConfig load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) {
            throw invalid_config("cannot open config file '" + path + "'");
        }
        return parse(in, path);
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::optional<std::string> get(const std::string& key) const
    {
        auto it = values_.find(key);
        if (it == values_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    std::optional<double> get_double(const std::string& key) const
    {
        auto v = get(key);
        if (!v) {
            return std::nullopt;
        }
        return to_double(key, *v);
    }

    std::optional<std::int64_t> get_int(const std::string& key) const
    {
        auto v = get(key);
        if (!v) {
            return std::nullopt;
        }
        std::size_t pos = 0;
        std::int64_t out = 0;
        try {
            out = std::stoll(*v, &pos);
        } catch (const std::exception&) {
            throw invalid_config("config key '" + key + "': not an integer: '" + *v + "'");
        }
        if (pos != v->size()) {
            throw invalid_config("config key '" + key + "': not an integer: '" + *v + "'");
        }
        return out;
    }

    /// Comma-separated list of numbers; an explicitly empty list is allowed
    /// and returned as such so callers can reject it.
    std::optional<std::vector<double>> get_list(const std::string& key) const
    {
        auto v = get(key);
        if (!v) {
            return std::nullopt;
        }
        std::vector<double> out;
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto t = trim(item);
            if (!t.empty()) {
                out.push_back(to_double(key, t));
            }
        }
        return out;
    }

    std::optional<std::vector<std::string>> get_words(const std::string& key) const
    {
        auto v = get(key);
        if (!v) {
            return std::nullopt;
        }
        std::vector<std::string> out;
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto t = trim(item);
            if (!t.empty()) {
                out.push_back(t);
            }
        }
        return out;
    }

    /// Canonical text form: sorted `key = value` lines.
    std::string canonical() const
    {
        std::string out;
        for (const auto& [k, v] : values_) {
            out += k + " = " + v + "\n";
        }
        return out;
    }

    /// Overwrite SystemConfig fields from `system.*` keys.
    void apply(SystemConfig& sys) const
    {
        auto set_index = [&](const char* key, Index& field) {
            if (auto v = get_int(key)) field = static_cast<Index>(*v);
        };
        auto set_double = [&](const char* key, double& field) {
            if (auto v = get_double(key)) field = *v;
        };
        set_index("system.M", sys.M);
        set_index("system.K", sys.K);
        set_double("system.cell_side", sys.cell_side);
        set_double("system.min_distance", sys.min_distance);
        set_double("system.gamma_db", sys.gamma_db);
        set_double("system.alpha", sys.alpha);
        set_double("system.sigma_sf_db", sys.sigma_sf_db);
        set_double("system.r_corr", sys.r_corr);
        set_double("system.ul_power_dbm", sys.ul_power_dbm);
        set_double("system.noise_power_dbm", sys.noise_power_dbm);
        set_double("system.bandwidth_hz", sys.bandwidth_hz);
        set_index("system.tau_c", sys.tau_c);
        if (auto v = get_int("system.tau_p")) sys.tau_p = static_cast<Index>(*v);
        if (auto v = get_double("system.xi")) sys.xi = *v;
    }

private:
    static std::string trim(std::string_view s)
    {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string_view::npos) {
            return {};
        }
        const auto e = s.find_last_not_of(" \t\r\n");
        return std::string(s.substr(b, e - b + 1));
    }

    static double to_double(const std::string& key, const std::string& v)
    {
        std::size_t pos = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &pos);
        } catch (const std::exception&) {
            throw invalid_config("config key '" + key + "': not a number: '" + v + "'");
        }
        if (pos != v.size()) {
            throw invalid_config("config key '" + key + "': not a number: '" + v + "'");
        }
        return out;
    }

    std::map<std::string, std::string> values_;
};

} // namespace rkamimo

#endif
