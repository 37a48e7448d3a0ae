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

#include <vector>

#include "recfuse/channels.hpp"
#include "recfuse/dataset.hpp"
#include "recfuse/model.hpp"
#include "recfuse/rng.hpp"

namespace recfuse::testing {

// Bipartite toy corpus: items P1 (five reviewers) and P2 (two reviewers),
// six users, seven reviews, timestamps in ingest order. U5's P1 review has
// no helpfulness votes.
inline std::vector<ReviewRecord> toy_reviews() {
    return {
        {"U1", "P1", 5.0, 10, 10, 1}, {"U2", "P1", 4.0, 3, 4, 2},
        {"U3", "P1", 2.0, 3, 4, 3},   {"U4", "P1", 1.0, 0, 5, 4},
        {"U5", "P1", 3.0, 0, 0, 5},   {"U5", "P2", 5.0, 1, 2, 6},
        {"U6", "P2", 2.0, 4, 5, 7},
    };
}

inline std::vector<ViewRecord> toy_views() {
    return {
        {"U6", "P1", std::nullopt},
        {"U1", "P2", 1100000010},
        {"U2", "P2", std::nullopt},
        {"U6", "P1", std::nullopt},  // duplicate edge, deduplicated at build
    };
}

inline Dataset toy_dataset() { return build_dataset(toy_reviews(), toy_views()); }

/// Random channel set with values already on the [-1,1] scale, every channel
/// populated, entry patterns independent per channel.
inline ChannelSet random_channels(int n, int m, double density, Rng& rng) {
    ChannelSet cs;
    const auto fill = [&](FeedbackChannel& ch, ChannelKind kind) {
        ch.kind = kind;
        ch.raw_interval = kModelInterval;
        for (int u = 0; u < n; ++u)
            for (int i = 0; i < m; ++i)
                if (rng.uniform() < density) {
                    const double v = 2.0 * rng.uniform() - 1.0;
                    ch.entries.push_back({u, i, v, v});
                }
        if (ch.entries.empty()) {
            const double v = 2.0 * rng.uniform() - 1.0;
            ch.entries.push_back({0, 0, v, v});
        }
    };
    fill(cs.rating, ChannelKind::Rating);
    fill(cs.helpfulness, ChannelKind::Helpfulness);
    fill(cs.centrality, ChannelKind::Centrality);
    fill(cs.view, ChannelKind::View);
    return cs;
}

/// Central finite difference of the objective with respect to one matrix.
inline Eigen::MatrixXd finite_difference(LatentFactors& f, Eigen::MatrixXd& mat,
                                         const TrainingProblem& prob,
                                         double h = 1e-5) {
    Eigen::MatrixXd fd(mat.rows(), mat.cols());
    for (Eigen::Index r = 0; r < mat.rows(); ++r)
        for (Eigen::Index c = 0; c < mat.cols(); ++c) {
            const double orig = mat(r, c);
            mat(r, c) = orig + h;
            const double up = objective(f, prob);
            mat(r, c) = orig - h;
            const double down = objective(f, prob);
            mat(r, c) = orig;
            fd(r, c) = (up - down) / (2.0 * h);
        }
    return fd;
}

inline double relative_error(const Eigen::MatrixXd& got,
                             const Eigen::MatrixXd& want) {
    return (got - want).norm() / std::max(want.norm(), 1e-12);
}

}  // namespace recfuse::testing
