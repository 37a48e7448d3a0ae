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
#include <cstdio>
#include <ostream>
#include <span>
#include <vector>

#include "recfuse/dataset.hpp"
#include "recfuse/features.hpp"
#include "recfuse/scaling.hpp"

namespace recfuse {

enum class ChannelKind { Rating, Helpfulness, Centrality, View };

inline const char* channel_name(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::Rating: return "rating";
        case ChannelKind::Helpfulness: return "helpfulness";
        case ChannelKind::Centrality: return "centrality";
        case ChannelKind::View: return "view";
    }
    return "?";
}

struct ChannelEntry {
    int user = 0;
    int item = 0;
    double raw = 0.0;
    double scaled = 0.0;  // raw mapped onto [-1,+1]
};

/// Sparse user x item observation matrix. The entry list IS the indicator
/// set: a pair absent from `entries` is unobserved, not a zero observation.
struct FeedbackChannel {
    ChannelKind kind = ChannelKind::Rating;
    ScaleInterval raw_interval;  // [a,b] fed to the affine map onto [-1,+1]
    std::vector<ChannelEntry> entries;  // sorted by (user, item), unique pairs

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
};

struct ChannelOptions {
    SignRule sign_rule;
    CentralityParams centrality;
    // When set, every never-viewed pair becomes a 0-valued view observation
    // instead of staying unobserved. Dense; desk-scale datasets only.
    bool unviewed_as_negative = false;
};

struct ChannelSet {
    FeedbackChannel rating;
    FeedbackChannel helpfulness;
    FeedbackChannel centrality;
    FeedbackChannel view;
};

namespace detail {

inline void sort_entries(std::vector<ChannelEntry>& entries) {
    std::sort(entries.begin(), entries.end(),
              [](const ChannelEntry& a, const ChannelEntry& b) {
                  return a.user != b.user ? a.user < b.user : a.item < b.item;
              });
}

/// Symmetric interval [-M, +M] around the largest observed magnitude, so raw
/// zero stays at scaled zero and the positive/critical sign survives scaling.
/// Falls back to [-1, 1] when the channel is empty or all-zero.
inline ScaleInterval symmetric_interval(const std::vector<ChannelEntry>& entries) {
    double m = 0.0;
    for (const ChannelEntry& e : entries) m = std::max(m, std::abs(e.raw));
    if (m == 0.0) m = 1.0;
    return {-m, +m};
}

inline void apply_scaling(FeedbackChannel& ch) {
    for (ChannelEntry& e : ch.entries)
        e.scaled = scale_value(e.raw, ch.raw_interval, kModelInterval);
}

}  // namespace detail

/// Rating channel over the given reviews; raw interval is the 1..5 scale.
inline FeedbackChannel build_rating_channel(const Dataset& d,
                                            std::span<const int> review_subset) {
    FeedbackChannel ch{ChannelKind::Rating, kRatingInterval, {}};
    ch.entries.reserve(review_subset.size());
    for (int r : review_subset) {
        const IndexedReview& rev = d.reviews[r];
        ch.entries.push_back({rev.user, rev.item, rev.rating, 0.0});
    }
    detail::sort_entries(ch.entries);
    detail::apply_scaling(ch);
    return ch;
}

/// Helpfulness channel: one entry per voted-on review in the subset.
inline FeedbackChannel build_helpfulness_channel(
    const Dataset& d, std::span<const int> review_subset,
    const ChannelOptions& opts = {}) {
    FeedbackChannel ch{ChannelKind::Helpfulness, {}, {}};
    for (int r : review_subset) {
        const IndexedReview& rev = d.reviews[r];
        const auto score = helpfulness_score(rev.helpful_yes, rev.helpful_total,
                                             rev.rating, opts.sign_rule);
        if (score) ch.entries.push_back({rev.user, rev.item, *score, 0.0});
    }
    detail::sort_entries(ch.entries);
    ch.raw_interval = detail::symmetric_interval(ch.entries);
    detail::apply_scaling(ch);
    return ch;
}

/// Centrality channel: every review in the subset gets an entry. Purchase
/// positions and reviewer counts are recomputed over the subset so the scores
/// never leak information from reviews outside it.
inline FeedbackChannel build_centrality_channel(
    const Dataset& d, std::span<const int> review_subset,
    const ChannelOptions& opts = {}) {
    std::vector<std::vector<int>> per_item(d.item_count());
    for (int r : review_subset) per_item[d.reviews[r].item].push_back(r);

    FeedbackChannel ch{ChannelKind::Centrality, {}, {}};
    ch.entries.reserve(review_subset.size());
    for (auto& item_reviews : per_item) {
        if (item_reviews.empty()) continue;
        const auto order = detail::order_item_reviews(d.reviews, item_reviews);
        const int n = static_cast<int>(order.size());

        std::vector<RankInput> rank_inputs;
        rank_inputs.reserve(order.size());
        for (const ItemOrderEntry& entry : order) {
            const IndexedReview& rev = d.reviews[entry.review];
            rank_inputs.push_back({helpfulness_score(rev.helpful_yes,
                                                     rev.helpful_total, rev.rating,
                                                     opts.sign_rule),
                                   rev.rating, rev.timestamp, rev.user});
        }
        const auto ranks = rank_reviews(rank_inputs, opts.sign_rule);

        for (std::size_t idx = 0; idx < order.size(); ++idx) {
            const IndexedReview& rev = d.reviews[order[idx].review];
            const double most = most_recent_centrality(order[idx].position, n);
            const double top =
                ranks[idx] ? top_rank_centrality(*ranks[idx], order[idx].position, n)
                           : 0.0;
            const double score = total_centrality(top, most, rev.rating,
                                                  opts.centrality, opts.sign_rule);
            ch.entries.push_back({rev.user, rev.item, score, 0.0});
        }
    }
    detail::sort_entries(ch.entries);
    ch.raw_interval = detail::symmetric_interval(ch.entries);
    detail::apply_scaling(ch);
    return ch;
}

/// View channel: raw 1 for every deduplicated view edge, scaled to +1.
/// Unviewed pairs stay unobserved unless opts.unviewed_as_negative is set.
inline FeedbackChannel build_view_channel(const Dataset& d,
                                          const ChannelOptions& opts = {}) {
    FeedbackChannel ch{ChannelKind::View, ScaleInterval{0.0, 1.0}, {}};
    if (opts.unviewed_as_negative) {
        std::vector<bool> viewed(
            static_cast<std::size_t>(d.user_count()) * d.item_count(), false);
        for (const IndexedView& v : d.views)
            viewed[static_cast<std::size_t>(v.user) * d.item_count() + v.item] = true;
        for (int u = 0; u < d.user_count(); ++u)
            for (int i = 0; i < d.item_count(); ++i) {
                const bool is_viewed =
                    viewed[static_cast<std::size_t>(u) * d.item_count() + i];
                ch.entries.push_back({u, i, is_viewed ? 1.0 : 0.0, 0.0});
            }
    } else {
        ch.entries.reserve(d.views.size());
        for (const IndexedView& v : d.views)
            ch.entries.push_back({v.user, v.item, 1.0, 0.0});
    }
    detail::sort_entries(ch.entries);
    detail::apply_scaling(ch);
    return ch;
}

/// All four channels from one review subset (H, D recomputed on the subset;
/// V always spans the dataset's view log).
inline ChannelSet build_channels(const Dataset& d,
                                 std::span<const int> review_subset,
                                 const ChannelOptions& opts = {}) {
    return {build_rating_channel(d, review_subset),
            build_helpfulness_channel(d, review_subset, opts),
            build_centrality_channel(d, review_subset, opts),
            build_view_channel(d, opts)};
}

inline std::vector<int> all_review_indices(const Dataset& d) {
    std::vector<int> indices(d.review_count());
    for (int i = 0; i < d.review_count(); ++i) indices[i] = i;
    return indices;
}

/// Sparse triplet dump: `user \t item \t raw \t scaled`, original ids.
inline void export_channel(const Dataset& d, const FeedbackChannel& ch,
                           std::ostream& out) {
    out << "# channel=" << channel_name(ch.kind) << " interval=["
        << ch.raw_interval.lo << "," << ch.raw_interval.hi << "]\n";
    char buf[64];
    for (const ChannelEntry& e : ch.entries) {
        out << d.user_ids[e.user] << '\t' << d.item_ids[e.item];
        std::snprintf(buf, sizeof(buf), "%.17g", e.raw);
        out << '\t' << buf;
        std::snprintf(buf, sizeof(buf), "%.17g", e.scaled);
        out << '\t' << buf << '\n';
    }
}

}  // namespace recfuse
