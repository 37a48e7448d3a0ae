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

#include <cstdint>
#include <optional>
#include <string>

namespace recfuse {

/// One ingested review event: a rating plus the helpful-vote tallies the
/// review accumulated ("helpful yes" clicks out of all yes/no answers).
struct ReviewRecord {
    std::string user_id;
    std::string item_id;
    double rating = 0.0;             // 1..5 star scale
    std::int64_t helpful_yes = 0;    // users who answered "helpful: yes"
    std::int64_t helpful_total = 0;  // users who answered the question at all
    std::int64_t timestamp = 0;      // seconds since epoch
};

/// One view event: the user looked at the item's page.
struct ViewRecord {
    std::string user_id;
    std::string item_id;
    std::optional<std::int64_t> timestamp;
};

}  // namespace recfuse
