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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "recfuse/errors.hpp"
#include "recfuse/records.hpp"
#include "recfuse/rng.hpp"
#include "recfuse/scaling.hpp"

namespace recfuse {

/// Desk-scale corpus generator with planted low-rank structure. Ratings come
/// from planted factors through the link, with `noise_std` Gaussian noise on
/// the latent scale. Helpful votes and view edges are driven by user factors
/// that correlate with the planted rating factors at level
/// `channel_correlation` (rho); rho = 0 makes the side-channel magnitudes
/// carry no information about the ratings.
struct SyntheticSpec {
    int user_count = 200;
    int item_count = 100;
    int true_k = 5;
    double density = 0.18;          // fraction of user-item pairs rated
    double view_density = 0.2;      // fraction of pairs with a view edge
    double noise_std = 0.5;         // rating noise (latent scale, before the link)
    double channel_correlation = 0.9;  // rho in [0,1]
    double latent_std = 0.8;        // target stddev of planted dot products
    int helpful_total_votes = 40;   // vote turnout per review
    bool quantize_ratings = true;   // snap ratings to whole stars
    // Rating activity skew: a small core of active users writes most reviews
    // (view activity stays uniform, so inactive users are view-rich but
    // rating-poor, like real cold-start users).
    double active_user_fraction = 0.25;
    double activity_boost = 6.0;  // active users' rating rate vs the rest
    std::uint64_t seed = 0;

    void validate() const {
        if (user_count < 1 || item_count < 1 || true_k < 1)
            throw DataError("synthetic sizes must be >= 1");
        if (!(density > 0.0 && density <= 1.0))
            throw DataError("density must lie in (0,1]");
        if (!(view_density >= 0.0 && view_density <= 1.0))
            throw DataError("view_density must lie in [0,1]");
        if (!(channel_correlation >= 0.0 && channel_correlation <= 1.0))
            throw DataError("channel_correlation must lie in [0,1]");
        if (noise_std < 0.0) throw DataError("noise_std must be >= 0");
        if (!(latent_std > 0.0)) throw DataError("latent_std must be > 0");
        if (helpful_total_votes < 1)
            throw DataError("helpful_total_votes must be >= 1");
        if (!(active_user_fraction > 0.0 && active_user_fraction <= 1.0))
            throw DataError("active_user_fraction must lie in (0,1]");
        if (!(activity_boost >= 1.0))
            throw DataError("activity_boost must be >= 1");
    }
};

struct SyntheticData {
    std::vector<ReviewRecord> reviews;
    std::vector<ViewRecord> views;
    Eigen::MatrixXd true_user_factors;  // n x true_k
    Eigen::MatrixXd true_item_factors;  // m x true_k
};

namespace detail {

inline Eigen::MatrixXd gaussian_matrix(int rows, int cols, double stddev,
                                       Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = rng.normal(0.0, stddev);
    return m;
}

inline std::string synth_user_id(int u) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "u%05d", u);
    return buf;
}

inline std::string synth_item_id(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "p%05d", i);
    return buf;
}

}  // namespace detail

inline SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng = Rng::for_stream(spec.seed, RngStream::Synthetic);

    const int n = spec.user_count;
    const int m = spec.item_count;
    // Var(w.z) = k * sd^4, so pick the entry stddev that hits latent_std.
    const double entry_std =
        std::sqrt(spec.latent_std / std::sqrt(static_cast<double>(spec.true_k)));

    SyntheticData data;
    data.true_user_factors = detail::gaussian_matrix(n, spec.true_k, entry_std, rng);
    data.true_item_factors = detail::gaussian_matrix(m, spec.true_k, entry_std, rng);

    // Side-channel signals mix the true latent product with fresh noise at
    // level rho: rho = 1 reproduces the product exactly, rho = 0 leaves pure
    // noise with nothing for the auxiliary factors to learn.
    const double rho = spec.channel_correlation;
    const double mix_noise = std::sqrt(1.0 - rho * rho) * spec.latent_std;
    const auto channel_target = [&](int u, int i, Rng& r) {
        return rho * data.true_user_factors.row(u).dot(
                         data.true_item_factors.row(i)) +
               mix_noise * r.normal();
    };

    // Earliness trait: rho-correlated with the first planted coordinate.
    // Items are bought reliability-first, so centrality tracks this trait.
    Eigen::VectorXd earliness(n);
    for (int u = 0; u < n; ++u)
        earliness[u] = rho * data.true_user_factors(u, 0) / entry_std +
                       std::sqrt(1.0 - rho * rho) * rng.normal();

    // Sample the rated pairs: Bernoulli per pair, with the per-user rate
    // split between a small active core and everyone else.
    const std::size_t cells = static_cast<std::size_t>(n) * m;
    std::vector<int> user_order(n);
    for (int u = 0; u < n; ++u) user_order[u] = u;
    rng.shuffle(user_order);
    const int active_count = std::max(
        1, static_cast<int>(std::llround(spec.active_user_fraction * n)));
    std::vector<bool> active(n, false);
    for (int a = 0; a < active_count && a < n; ++a) active[user_order[a]] = true;
    const double share = static_cast<double>(active_count) / n;
    const double base_rate =
        spec.density / (share * spec.activity_boost + (1.0 - share));
    std::vector<std::size_t> rated_pairs;
    rated_pairs.reserve(static_cast<std::size_t>(spec.density * cells * 1.3) + 16);
    for (int u = 0; u < n; ++u) {
        const double rate =
            std::min(1.0, base_rate * (active[u] ? spec.activity_boost : 1.0));
        for (int i = 0; i < m; ++i)
            if (rng.uniform() < rate)
                rated_pairs.push_back(static_cast<std::size_t>(u) * m + i);
    }
    const std::size_t rated = rated_pairs.size();

    // Purchase order within each item: higher earliness buys first.
    std::vector<std::vector<std::size_t>> item_buyers(m);
    for (std::size_t r = 0; r < rated; ++r)
        item_buyers[rated_pairs[r] % m].push_back(r);
    std::vector<std::int64_t> timestamps(rated);
    for (int i = 0; i < m; ++i) {
        auto& buyers = item_buyers[i];
        std::sort(buyers.begin(), buyers.end(), [&](std::size_t a, std::size_t b) {
            const double ea = earliness[static_cast<int>(rated_pairs[a] / m)];
            const double eb = earliness[static_cast<int>(rated_pairs[b] / m)];
            return ea != eb ? ea > eb : a < b;
        });
        for (std::size_t pos = 0; pos < buyers.size(); ++pos)
            timestamps[buyers[pos]] = 1500000000LL +
                                      static_cast<std::int64_t>(i) * 100000 +
                                      static_cast<std::int64_t>(pos);
    }

    data.reviews.reserve(rated);
    for (std::size_t r = 0; r < rated; ++r) {
        const int u = static_cast<int>(rated_pairs[r] / m);
        const int i = static_cast<int>(rated_pairs[r] % m);

        const double t = data.true_user_factors.row(u).dot(
            data.true_item_factors.row(i));
        const double scaled =
            std::tanh(t + spec.noise_std * rng.normal());
        double rating = unscale_value(scaled, kRatingInterval, kModelInterval);
        if (spec.quantize_ratings)
            rating = std::clamp(std::round(rating), 1.0, 5.0);

        // Vote counts whose quadratic score recovers the helpfulness target:
        // x = round(y * sqrt(|tanh(target)|)) gives x^2/y ~ y * |tanh(target)|.
        // Since the helpfulness sign comes from the rating, a review whose
        // rating contradicts the target's sign draws no votes at all; the
        // entry stays out of the helpfulness channel instead of flipping it.
        const double h_target = std::tanh(channel_target(u, i, rng));
        const bool sign_match = (rating >= 3.0) == (h_target >= 0.0);
        const std::int64_t total = sign_match ? spec.helpful_total_votes : 0;
        const std::int64_t yes = std::clamp<std::int64_t>(
            std::llround(static_cast<double>(total) * std::sqrt(std::abs(h_target))),
            0, total);

        data.reviews.push_back({detail::synth_user_id(u), detail::synth_item_id(i),
                                rating, yes, total, timestamps[r]});
    }

    // View edges: the pairs with the highest view affinity.
    const std::size_t view_count = static_cast<std::size_t>(
        std::llround(spec.view_density * static_cast<double>(cells)));
    if (view_count > 0) {
        std::vector<std::pair<double, std::size_t>> affinity;
        affinity.reserve(cells);
        for (int u = 0; u < n; ++u)
            for (int i = 0; i < m; ++i)
                affinity.emplace_back(-channel_target(u, i, rng),
                                      static_cast<std::size_t>(u) * m + i);
        std::nth_element(affinity.begin(), affinity.begin() + view_count - 1,
                         affinity.end());
        std::vector<std::size_t> view_pairs;
        view_pairs.reserve(view_count);
        for (std::size_t v = 0; v < view_count; ++v)
            view_pairs.push_back(affinity[v].second);
        std::sort(view_pairs.begin(), view_pairs.end());
        data.views.reserve(view_count);
        for (std::size_t pair : view_pairs)
            data.views.push_back({detail::synth_user_id(static_cast<int>(pair / m)),
                                  detail::synth_item_id(static_cast<int>(pair % m)),
                                  std::nullopt});
    }
    return data;
}

}  // namespace recfuse
