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
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "recfuse/errors.hpp"
#include "recfuse/model.hpp"
#include "recfuse/rng.hpp"

namespace recfuse {

struct TrainConfig {
    std::uint64_t seed = 0;
    double init_std = 0.1;
    Hyperparameters hp;
    int log_every = 1;  // record every n-th epoch in the trace (first/last always)

    void validate() const {
        if (init_std < 0.0) throw DataError("init_std must be >= 0");
        if (log_every < 1) throw DataError("log_every must be >= 1");
        hp.validate();
    }
};

struct EpochStats {
    int epoch = 0;
    double objective = 0.0;
    double grad_norm = 0.0;
    double seconds = 0.0;  // wall time since training started
};

enum class StopReason { Converged, MaxEpochs };

struct TrainTrace {
    std::vector<EpochStats> epochs;
    StopReason reason = StopReason::MaxEpochs;
    int final_epoch = 0;

    /// CSV dump: `epoch,objective,grad_norm,seconds`.
    void write_csv(std::ostream& out) const {
        out << "epoch,objective,grad_norm,seconds\n";
        char buf[128];
        for (const EpochStats& e : epochs) {
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.6f", e.epoch,
                          e.objective, e.grad_norm, e.seconds);
            out << buf << '\n';
        }
    }
};

/// All eight matrices filled i.i.d. N(0, init_std^2), deterministic per seed.
inline LatentFactors init_factors(int n, int m, int k, std::uint64_t seed,
                                  double init_std) {
    if (n < 1 || m < 1 || k < 1)
        throw DataError("init_factors: dimensions must be >= 1");
    Rng rng = Rng::for_stream(seed, RngStream::FactorInit);
    LatentFactors f = LatentFactors::zeros(n, m, k);
    for (Eigen::MatrixXd* mat : {&f.W, &f.Z, &f.E, &f.F, &f.C, &f.O, &f.S, &f.U})
        for (Eigen::Index r = 0; r < mat->rows(); ++r)
            for (Eigen::Index c = 0; c < mat->cols(); ++c)
                (*mat)(r, c) = rng.normal(0.0, init_std);
    return f;
}

struct FitResult {
    LatentFactors factors;
    TrainTrace trace;
};

namespace detail {

inline double gradient_norm(const LatentFactors& g) {
    return std::sqrt(g.squared_norm());
}

inline void apply_step(LatentFactors& f, const LatentFactors& g, double step) {
    f.W -= step * g.W;
    f.Z -= step * g.Z;
    f.E -= step * g.E;
    f.F -= step * g.F;
    f.C -= step * g.C;
    f.O -= step * g.O;
    f.S -= step * g.S;
    f.U -= step * g.U;
}

}  // namespace detail

/// Full-batch gradient descent: every epoch steps all eight matrices
/// simultaneously from one gradient snapshot, X <- X - eps * dphi/dX, until
/// the relative objective change drops below conv_tol or max_epochs is hit.
/// Throws DivergenceError when the objective turns non-finite or grows for
/// ten consecutive epochs; `progress`, when given, then still holds the
/// epochs recorded before the abort.
inline FitResult fit(const TrainingProblem& problem, const TrainConfig& config,
                     TrainTrace* progress = nullptr) {
    config.validate();
    const Hyperparameters hp = config.hp.masked();
    const auto start = std::chrono::steady_clock::now();
    const auto elapsed = [&start] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start)
            .count();
    };

    FitResult result;
    result.factors = init_factors(problem.user_count, problem.item_count, hp.k,
                                  config.seed, config.init_std);
    LatentFactors& f = result.factors;
    TrainTrace local_trace;
    TrainTrace& trace = progress ? *progress : local_trace;
    trace = TrainTrace{};

    double phi_prev = objective(f, problem);
    LatentFactors g = gradient(f, problem);
    trace.epochs.push_back({0, phi_prev, detail::gradient_norm(g), elapsed()});

    int growth_streak = 0;
    for (int epoch = 1; epoch <= hp.max_epochs; ++epoch) {
        detail::apply_step(f, g, hp.learning_rate);
        const double phi = objective(f, problem);
        if (!std::isfinite(phi))
            throw DivergenceError("objective became non-finite at epoch " +
                                      std::to_string(epoch) +
                                      "; reduce the learning rate",
                                  epoch);
        g = gradient(f, problem);
        if (epoch % config.log_every == 0 || epoch == hp.max_epochs)
            trace.epochs.push_back({epoch, phi, detail::gradient_norm(g), elapsed()});

        growth_streak = phi > phi_prev ? growth_streak + 1 : 0;
        if (growth_streak >= 10)
            throw DivergenceError("objective grew for 10 consecutive epochs "
                                  "(last epoch " +
                                      std::to_string(epoch) + ")",
                                  epoch);

        const double rel_change =
            std::abs(phi - phi_prev) / std::max(phi_prev, 1e-12);
        phi_prev = phi;
        if (rel_change < hp.conv_tol) {
            if (trace.epochs.back().epoch != epoch)
                trace.epochs.push_back(
                    {epoch, phi, detail::gradient_norm(g), elapsed()});
            trace.reason = StopReason::Converged;
            trace.final_epoch = epoch;
            result.trace = trace;
            return result;
        }
    }
    trace.reason = StopReason::MaxEpochs;
    trace.final_epoch = hp.max_epochs;
    result.trace = trace;
    return result;
}

}  // namespace recfuse
