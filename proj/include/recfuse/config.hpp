// Copyright 2026 The recfuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <istream>
#include <map>
#include <string>
#include <string_view>

#include "recfuse/errors.hpp"

namespace recfuse {

/// Flat `key = value` run configuration. `#` starts a comment; blank lines
/// are ignored. Command-line flags override config values.
class RunConfig {
public:
    RunConfig() = default;

    static RunConfig parse(std::istream& in) {
        RunConfig cfg;
        std::string line;
        long line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string_view trimmed = trim(line);
            if (trimmed.empty()) continue;
            const auto eq = trimmed.find('=');
            if (eq == std::string_view::npos)
                throw DataError("config line " + std::to_string(line_no) +
                                ": expected `key = value`");
            const std::string key{trim(trimmed.substr(0, eq))};
            const std::string value{trim(trimmed.substr(eq + 1))};
            if (key.empty())
                throw DataError("config line " + std::to_string(line_no) +
                                ": empty key");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, std::string fallback) const {
        const auto it = values_.find(key);
        return it != values_.end() ? it->second : std::move(fallback);
    }

    double get_double(const std::string& key, double fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument(key);
            return v;
        } catch (const std::exception&) {
            throw DataError("config key '" + key + "': '" + it->second +
                            "' is not a number");
        }
    }

    long long get_int(const std::string& key, long long fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        long long v = 0;
        const std::string& s = it->second;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size())
            throw DataError("config key '" + key + "': '" + s +
                            "' is not an integer");
        return v;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (it->second == "true" || it->second == "1" || it->second == "yes")
            return true;
        if (it->second == "false" || it->second == "0" || it->second == "no")
            return false;
        throw DataError("config key '" + key + "': '" + it->second +
                        "' is not a boolean");
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    static std::string_view trim(std::string_view s) {
        const auto begin = s.find_first_not_of(" \t\r");
        if (begin == std::string_view::npos) return {};
        const auto end = s.find_last_not_of(" \t\r");
        return s.substr(begin, end - begin + 1);
    }

    std::map<std::string, std::string> values_;
};

}  // namespace recfuse
