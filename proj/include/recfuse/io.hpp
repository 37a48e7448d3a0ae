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
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "recfuse/errors.hpp"
#include "recfuse/records.hpp"

namespace recfuse {

// Review input is the public Amazon review schema: JSON lines with
// reviewerID, asin, overall, helpful = [yes, total], unixReviewTime.
inline std::vector<ReviewRecord> read_reviews_jsonl(std::istream& in) {
    std::vector<ReviewRecord> records;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            ReviewRecord r;
            r.user_id = j.at("reviewerID").get<std::string>();
            r.item_id = j.at("asin").get<std::string>();
            r.rating = j.at("overall").get<double>();
            const auto& helpful = j.at("helpful");
            if (!helpful.is_array() || helpful.size() != 2)
                throw DataError("helpful must be a two-element array");
            r.helpful_yes = helpful[0].get<std::int64_t>();
            r.helpful_total = helpful[1].get<std::int64_t>();
            r.timestamp = j.at("unixReviewTime").get<std::int64_t>();
            records.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("reviews line " + std::to_string(line_no) + ": " +
                            e.what());
        } catch (const DataError& e) {
            throw DataError("reviews line " + std::to_string(line_no) + ": " +
                            e.what());
        }
    }
    return records;
}

// View input: `user_id \t item_id [\t timestamp]`.
inline std::vector<ViewRecord> read_views_tsv(std::istream& in) {
    std::vector<ViewRecord> records;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<std::string_view> fields;
        std::string_view rest = line;
        while (!rest.empty()) {
            const auto tab = rest.find('\t');
            fields.push_back(rest.substr(0, tab));
            if (tab == std::string_view::npos) break;
            rest.remove_prefix(tab + 1);
        }
        if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() ||
            fields[1].empty())
            throw DataError("views line " + std::to_string(line_no) +
                            ": expected `user\\titem[\\ttimestamp]`");
        ViewRecord v;
        v.user_id = std::string(fields[0]);
        v.item_id = std::string(fields[1]);
        if (fields.size() == 3) {
            std::int64_t ts = 0;
            const auto [ptr, ec] = std::from_chars(
                fields[2].data(), fields[2].data() + fields[2].size(), ts);
            if (ec != std::errc{} || ptr != fields[2].data() + fields[2].size())
                throw DataError("views line " + std::to_string(line_no) +
                                ": bad timestamp");
            v.timestamp = ts;
        }
        records.push_back(std::move(v));
    }
    return records;
}

}  // namespace recfuse
