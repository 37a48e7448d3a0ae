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
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "recfuse/errors.hpp"
#include "recfuse/records.hpp"
#include "recfuse/rng.hpp"

namespace recfuse {

/// Review with opaque ids replaced by dense indices.
struct IndexedReview {
    int user = 0;
    int item = 0;
    double rating = 0.0;
    std::int64_t helpful_yes = 0;
    std::int64_t helpful_total = 0;
    std::int64_t timestamp = 0;
};

/// Deduplicated view edge, indexed.
struct IndexedView {
    int user = 0;
    int item = 0;
    std::optional<std::int64_t> timestamp;
};

/// A reviewer's slot in an item's chronological purchase order.
struct ItemOrderEntry {
    int review = 0;    // index into Dataset::reviews
    int user = 0;
    int position = 0;  // 1-based; 1 = earliest reviewer of the item
};

/// Immutable indexed interaction table. Dense user indices cover everyone who
/// reviewed or viewed anything; likewise for items. At most one review per
/// (user, item) pair; views are deduplicated to one edge per pair.
struct Dataset {
    std::vector<std::string> user_ids;  // dense index -> opaque id
    std::vector<std::string> item_ids;
    std::unordered_map<std::string, int> user_index;
    std::unordered_map<std::string, int> item_index;
    std::vector<IndexedReview> reviews;  // ingest order preserved
    std::vector<IndexedView> views;
    // Per item: reviewers sorted by timestamp (ties broken by ingest order),
    // positions 1..n_j.
    std::vector<std::vector<ItemOrderEntry>> item_order;

    int user_count() const { return static_cast<int>(user_ids.size()); }
    int item_count() const { return static_cast<int>(item_ids.size()); }
    int review_count() const { return static_cast<int>(reviews.size()); }

    double sparsity() const {
        const double cells =
            static_cast<double>(user_count()) * static_cast<double>(item_count());
        return cells > 0.0 ? 1.0 - static_cast<double>(review_count()) / cells : 0.0;
    }
};

namespace detail {

inline std::uint64_t pack_pair(int user, int item) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(user)) << 32) |
           static_cast<std::uint32_t>(item);
}

inline int intern_id(const std::string& id,
                     std::unordered_map<std::string, int>& index,
                     std::vector<std::string>& ids) {
    auto [it, inserted] = index.try_emplace(id, static_cast<int>(ids.size()));
    if (inserted) ids.push_back(id);
    return it->second;
}

/// Chronological order of the given reviews within one item: sort by
/// timestamp, stable in ingest order, and assign positions 1..n_j.
inline std::vector<ItemOrderEntry> order_item_reviews(
    const std::vector<IndexedReview>& reviews, std::vector<int> review_indices) {
    std::stable_sort(review_indices.begin(), review_indices.end(),
                     [&](int a, int b) {
                         return reviews[a].timestamp < reviews[b].timestamp;
                     });
    std::vector<ItemOrderEntry> out;
    out.reserve(review_indices.size());
    int position = 0;
    for (int idx : review_indices)
        out.push_back({idx, reviews[idx].user, ++position});
    return out;
}

}  // namespace detail

inline void validate_review(const ReviewRecord& r) {
    if (r.user_id.empty() || r.item_id.empty())
        throw DataError("review with empty user or item id");
    if (!(r.rating >= 1.0 && r.rating <= 5.0))
        throw DataError("rating " + std::to_string(r.rating) + " for (" +
                        r.user_id + ", " + r.item_id + ") outside the 1..5 scale");
    if (r.helpful_yes < 0 || r.helpful_total < 0)
        throw DataError("negative helpful-vote count for (" + r.user_id + ", " +
                        r.item_id + ")");
    if (r.helpful_yes > r.helpful_total)
        throw DataError("helpful_yes > helpful_total for (" + r.user_id + ", " +
                        r.item_id + ")");
}

/// Builds the indexed dataset. Rejects duplicate (user, item) reviews and
/// invalid vote counts; silently deduplicates repeated view edges.
inline Dataset build_dataset(std::span<const ReviewRecord> reviews,
                             std::span<const ViewRecord> views = {}) {
    if (reviews.empty()) throw DataError("no review records");
    Dataset d;
    std::unordered_map<std::uint64_t, bool> seen_review;
    seen_review.reserve(reviews.size() * 2);
    for (const ReviewRecord& r : reviews) {
        validate_review(r);
        const int u = detail::intern_id(r.user_id, d.user_index, d.user_ids);
        const int i = detail::intern_id(r.item_id, d.item_index, d.item_ids);
        if (!seen_review.emplace(detail::pack_pair(u, i), true).second)
            throw DataError("duplicate review for (" + r.user_id + ", " +
                            r.item_id + ")");
        d.reviews.push_back(
            {u, i, r.rating, r.helpful_yes, r.helpful_total, r.timestamp});
    }
    std::unordered_map<std::uint64_t, bool> seen_view;
    seen_view.reserve(views.size() * 2);
    for (const ViewRecord& v : views) {
        if (v.user_id.empty() || v.item_id.empty())
            throw DataError("view with empty user or item id");
        const int u = detail::intern_id(v.user_id, d.user_index, d.user_ids);
        const int i = detail::intern_id(v.item_id, d.item_index, d.item_ids);
        if (seen_view.emplace(detail::pack_pair(u, i), true).second)
            d.views.push_back({u, i, v.timestamp});
    }

    std::vector<std::vector<int>> per_item(d.item_count());
    for (int r = 0; r < d.review_count(); ++r)
        per_item[d.reviews[r].item].push_back(r);
    d.item_order.reserve(d.item_count());
    for (auto& indices : per_item)
        d.item_order.push_back(
            detail::order_item_reviews(d.reviews, std::move(indices)));
    return d;
}

/// Repeated random holdout: train_fraction of the reviews go to training,
/// sampled independently per repeat from one seed.
struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    int repeats = 5;

    void validate() const {
        if (!(train_fraction > 0.0 && train_fraction < 1.0))
            throw DataError("train_fraction must lie in (0,1)");
        if (repeats < 1) throw DataError("repeats must be positive");
    }
};

struct TrainTestSplit {
    std::vector<int> train;  // review indices, ascending
    std::vector<int> test;
};

/// Partitions the review indices for one repeat. |train| = round(f*N);
/// deterministic in (seed, repeat_index).
inline TrainTestSplit split_train_test(const Dataset& d, const SplitSpec& spec,
                                       int repeat_index) {
    spec.validate();
    if (repeat_index < 0 || repeat_index >= spec.repeats)
        throw DataError("repeat_index out of range");
    const int n = d.review_count();
    if (n < 2) throw DataError("cannot split fewer than two reviews");

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    Rng rng = Rng::for_stream(spec.seed, RngStream::Split,
                              static_cast<std::uint64_t>(repeat_index));
    rng.shuffle(order);

    const int train_size = static_cast<int>(
        std::llround(spec.train_fraction * static_cast<double>(n)));
    TrainTestSplit split;
    split.train.assign(order.begin(), order.begin() + train_size);
    split.test.assign(order.begin() + train_size, order.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

/// Users/items with fewer than four training ratings, as index masks.
struct ColdStartSegments {
    std::vector<bool> cold_user;
    std::vector<bool> cold_item;
};

inline ColdStartSegments segment_cold_start(const Dataset& d,
                                            std::span<const int> train_reviews) {
    std::vector<int> user_counts(d.user_count(), 0);
    std::vector<int> item_counts(d.item_count(), 0);
    for (int r : train_reviews) {
        ++user_counts[d.reviews[r].user];
        ++item_counts[d.reviews[r].item];
    }
    ColdStartSegments seg;
    seg.cold_user.resize(d.user_count());
    seg.cold_item.resize(d.item_count());
    for (int u = 0; u < d.user_count(); ++u) seg.cold_user[u] = user_counts[u] < 4;
    for (int i = 0; i < d.item_count(); ++i) seg.cold_item[i] = item_counts[i] < 4;
    return seg;
}

// ---------------------------------------------------------------------------
// Serialization: versioned JSON container with the index maps and record
// arrays. Reviews are stored as [user, item, rating, yes, total, timestamp],
// views as [user, item] or [user, item, timestamp].

inline constexpr const char* kDatasetFormat = "recfuse.dataset";
inline constexpr int kDatasetVersion = 1;

inline nlohmann::json dataset_to_json(const Dataset& d) {
    nlohmann::json j;
    j["format"] = kDatasetFormat;
    j["version"] = kDatasetVersion;
    j["users"] = d.user_ids;
    j["items"] = d.item_ids;
    auto& reviews = j["reviews"] = nlohmann::json::array();
    for (const IndexedReview& r : d.reviews)
        reviews.push_back({r.user, r.item, r.rating, r.helpful_yes,
                           r.helpful_total, r.timestamp});
    auto& views = j["views"] = nlohmann::json::array();
    for (const IndexedView& v : d.views) {
        if (v.timestamp)
            views.push_back({v.user, v.item, *v.timestamp});
        else
            views.push_back({v.user, v.item});
    }
    return j;
}

inline Dataset dataset_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("format", "") != kDatasetFormat)
        throw DataError("not a dataset file");
    if (j.value("version", 0) != kDatasetVersion)
        throw DataError("unsupported dataset version");
    Dataset d;
    d.user_ids = j.at("users").get<std::vector<std::string>>();
    d.item_ids = j.at("items").get<std::vector<std::string>>();
    for (int u = 0; u < static_cast<int>(d.user_ids.size()); ++u)
        if (!d.user_index.emplace(d.user_ids[u], u).second)
            throw DataError("duplicate user id in dataset file");
    for (int i = 0; i < static_cast<int>(d.item_ids.size()); ++i)
        if (!d.item_index.emplace(d.item_ids[i], i).second)
            throw DataError("duplicate item id in dataset file");
    for (const auto& row : j.at("reviews")) {
        if (!row.is_array() || row.size() != 6)
            throw DataError("malformed review row in dataset file");
        IndexedReview r{row[0].get<int>(),          row[1].get<int>(),
                        row[2].get<double>(),       row[3].get<std::int64_t>(),
                        row[4].get<std::int64_t>(), row[5].get<std::int64_t>()};
        if (r.user < 0 || r.user >= static_cast<int>(d.user_ids.size()) ||
            r.item < 0 || r.item >= static_cast<int>(d.item_ids.size()))
            throw DataError("review index out of range in dataset file");
        d.reviews.push_back(r);
    }
    for (const auto& row : j.at("views")) {
        if (!row.is_array() || (row.size() != 2 && row.size() != 3))
            throw DataError("malformed view row in dataset file");
        IndexedView v{row[0].get<int>(), row[1].get<int>(), std::nullopt};
        if (row.size() == 3) v.timestamp = row[2].get<std::int64_t>();
        if (v.user < 0 || v.user >= static_cast<int>(d.user_ids.size()) ||
            v.item < 0 || v.item >= static_cast<int>(d.item_ids.size()))
            throw DataError("view index out of range in dataset file");
        d.views.push_back(v);
    }

    std::vector<std::vector<int>> per_item(d.item_count());
    for (int r = 0; r < d.review_count(); ++r)
        per_item[d.reviews[r].item].push_back(r);
    for (auto& indices : per_item)
        d.item_order.push_back(
            detail::order_item_reviews(d.reviews, std::move(indices)));
    return d;
}

inline void save_dataset(const Dataset& d, std::ostream& out) {
    out << dataset_to_json(d).dump(0) << '\n';
}

inline Dataset load_dataset(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("cannot parse dataset file: ") + e.what());
    }
    return dataset_from_json(j);
}

/// FNV-1a over the canonical serialization; identifies a dataset in reports.
inline std::string dataset_fingerprint(const Dataset& d) {
    const std::string bytes = dataset_to_json(d).dump();
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace recfuse
