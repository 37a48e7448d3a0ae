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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace recfuse {

/// Ratings at or above the threshold count as positive; below it the reviewer
/// is critical and her helpfulness/centrality scores carry a negative sign.
struct SignRule {
    double positive_threshold = 3.0;

    bool is_positive(double rating) const { return rating >= positive_threshold; }
    double sign(double rating) const { return is_positive(rating) ? +1.0 : -1.0; }
};

struct CentralityParams {
    double alpha = 0.5;  // blend weight between top-rank and recency scores

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw std::domain_error("centrality alpha must lie in [0,1]");
    }
};

/// Signed quadratic vote ratio of a review: +-(yes^2 / total). Quadratic so
/// that reviews with many "yes" clicks dominate. Returns nullopt when nobody
/// voted; such reviews stay out of the helpfulness channel.
inline std::optional<double> helpfulness_score(std::int64_t yes,
                                               std::int64_t total, double rating,
                                               const SignRule& rule = {}) {
    if (yes < 0 || total < 0 || yes > total)
        throw std::domain_error("helpfulness_score: need 0 <= yes <= total");
    if (total == 0) return std::nullopt;
    const double magnitude =
        static_cast<double>(yes) * static_cast<double>(yes) /
        static_cast<double>(total);
    return rule.sign(rating) * magnitude + 0.0;  // normalize -0
}

/// Recency-based exposure of the reviewer at purchase position i among an
/// item's n reviewers: the (n-i)-th harmonic number. Each later buyer reads
/// the review with weight 1/r, r steps down the most-recent list.
inline double most_recent_centrality(int position, int reviewer_count) {
    if (position < 1 || position > reviewer_count)
        throw std::domain_error("most_recent_centrality: position out of range");
    double sum = 0.0;
    for (int r = 1; r <= reviewer_count - position; ++r)
        sum += 1.0 / static_cast<double>(r);
    return sum;
}

/// Rank-based exposure: (1/k)^2 * (n-i), where k is the review's rank within
/// its reviewer group and n-i counts the later buyers who could read it.
inline double top_rank_centrality(int rank, int position, int reviewer_count) {
    if (rank < 1) throw std::domain_error("top_rank_centrality: rank must be >= 1");
    if (position < 1 || position > reviewer_count)
        throw std::domain_error("top_rank_centrality: position out of range");
    const double inv_rank = 1.0 / static_cast<double>(rank);
    return inv_rank * inv_rank * static_cast<double>(reviewer_count - position);
}

/// Signed blend of the two exposure scores.
inline double total_centrality(double top, double most, double rating,
                               const CentralityParams& params = {},
                               const SignRule& rule = {}) {
    if (top < 0.0 || most < 0.0)
        throw std::domain_error("total_centrality: scores must be non-negative");
    params.validate();
    return rule.sign(rating) *
               (params.alpha * top + (1.0 - params.alpha) * most) +
           0.0;  // normalize -0
}

/// Inputs rank_reviews needs about one review of an item.
struct RankInput {
    std::optional<double> helpfulness;  // nullopt = nobody voted
    double rating = 0.0;
    std::int64_t timestamp = 0;
    int user = 0;
};

/// Ranks an item's reviews for top-rank centrality: positive and critical
/// reviewers are ranked separately, higher |helpfulness| first. Ties break by
/// earlier timestamp, then smaller user index. Reviews without votes get no
/// rank (their top-rank contribution is zero).
inline std::vector<std::optional<int>> rank_reviews(
    std::span<const RankInput> reviews, const SignRule& rule = {}) {
    std::vector<std::optional<int>> ranks(reviews.size());
    for (bool positive_group : {true, false}) {
        std::vector<std::size_t> members;
        for (std::size_t r = 0; r < reviews.size(); ++r)
            if (reviews[r].helpfulness &&
                rule.is_positive(reviews[r].rating) == positive_group)
                members.push_back(r);
        std::sort(members.begin(), members.end(),
                  [&](std::size_t a, std::size_t b) {
                      const double ha = std::abs(*reviews[a].helpfulness);
                      const double hb = std::abs(*reviews[b].helpfulness);
                      if (ha != hb) return ha > hb;
                      if (reviews[a].timestamp != reviews[b].timestamp)
                          return reviews[a].timestamp < reviews[b].timestamp;
                      return reviews[a].user < reviews[b].user;
                  });
        int k = 0;
        for (std::size_t r : members) ranks[r] = ++k;
    }
    return ranks;
}

}  // namespace recfuse
