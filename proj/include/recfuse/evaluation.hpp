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

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "recfuse/channels.hpp"
#include "recfuse/checkpoint.hpp"
#include "recfuse/dataset.hpp"
#include "recfuse/errors.hpp"
#include "recfuse/model.hpp"
#include "recfuse/trainer.hpp"

namespace recfuse {

/// Mean squared error on the 1..5 rating scale.
inline double mse(std::span<const double> predictions,
                  std::span<const double> truths) {
    if (predictions.empty() || predictions.size() != truths.size())
        throw DataError("mse: need equal-length non-empty inputs");
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - truths[i];
        acc += d * d;
    }
    return acc / static_cast<double>(predictions.size());
}

/// One scored test pair, on the 1..5 scale.
struct PairPrediction {
    int user = 0;
    int item = 0;
    double truth = 0.0;
    double prediction = 0.0;
    bool fallback = false;  // global-mean used (pair unseen in training)
};

struct RepeatResult {
    int repeat = 0;
    double mse_full = 0.0;
    std::optional<double> mse_cold_user;  // absent when no cold test pairs
    std::optional<double> mse_cold_item;
    int test_pairs = 0;
    int cold_user_pairs = 0;
    int cold_item_pairs = 0;
    int epochs = 0;
    bool converged = false;
};

struct EvalReport {
    std::string variant;
    int k = 0;
    Hyperparameters hp;
    SplitSpec split;
    std::string dataset_fingerprint;
    std::vector<RepeatResult> repeats;
    double mse_mean = 0.0;
    double mse_std = 0.0;
    std::optional<double> cold_user_mse_mean;
    std::optional<double> cold_item_mse_mean;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace detail

/// One repeat of the protocol: split, rebuild the training channels, fit,
/// score the held-out reviews. Returns the result plus the pair-level
/// predictions and the fitted checkpoint.
struct RepeatOutcome {
    RepeatResult result;
    std::vector<PairPrediction> predictions;
    Checkpoint checkpoint;
    TrainTrace trace;
};

inline RepeatOutcome run_repeat(const Dataset& d, const SplitSpec& split_spec,
                                const TrainConfig& config, int repeat_index,
                                const ChannelOptions& opts = {}) {
    const TrainTestSplit split = split_train_test(d, split_spec, repeat_index);
    const ChannelSet channels = build_channels(d, split.train, opts);
    const TrainingProblem problem =
        make_problem(channels, d.user_count(), d.item_count(), config.hp);

    TrainConfig repeat_config = config;
    repeat_config.seed = derive_seed(config.seed, RngStream::FactorInit,
                                     static_cast<std::uint64_t>(repeat_index));
    const FitResult fitted = fit(problem, repeat_config);

    double mean_rating = 0.0;
    for (int r : split.train) mean_rating += d.reviews[r].rating;
    mean_rating /= static_cast<double>(split.train.size());

    // A pair is scored by the model unless neither side ever shows up in any
    // training channel; such pairs fall back to the global training mean.
    std::vector<bool> user_seen(d.user_count(), false);
    std::vector<bool> item_seen(d.item_count(), false);
    for (int r : split.train) {
        user_seen[d.reviews[r].user] = true;
        item_seen[d.reviews[r].item] = true;
    }
    for (const IndexedView& v : d.views) {
        user_seen[v.user] = true;
        item_seen[v.item] = true;
    }

    const ColdStartSegments cold = segment_cold_start(d, split.train);

    RepeatOutcome out;
    out.trace = fitted.trace;
    out.predictions.reserve(split.test.size());
    std::vector<double> pred_full, truth_full, pred_cu, truth_cu, pred_ci, truth_ci;
    for (int r : split.test) {
        const IndexedReview& rev = d.reviews[r];
        PairPrediction p;
        p.user = rev.user;
        p.item = rev.item;
        p.truth = rev.rating;
        p.fallback = !user_seen[rev.user] && !item_seen[rev.item];
        p.prediction = p.fallback
                           ? mean_rating
                           : predict_rating(fitted.factors, rev.user, rev.item);
        out.predictions.push_back(p);
        pred_full.push_back(p.prediction);
        truth_full.push_back(p.truth);
        if (cold.cold_user[rev.user]) {
            pred_cu.push_back(p.prediction);
            truth_cu.push_back(p.truth);
        }
        if (cold.cold_item[rev.item]) {
            pred_ci.push_back(p.prediction);
            truth_ci.push_back(p.truth);
        }
    }

    RepeatResult& res = out.result;
    res.repeat = repeat_index;
    res.test_pairs = static_cast<int>(split.test.size());
    res.mse_full = mse(pred_full, truth_full);
    res.cold_user_pairs = static_cast<int>(pred_cu.size());
    res.cold_item_pairs = static_cast<int>(pred_ci.size());
    if (!pred_cu.empty()) res.mse_cold_user = mse(pred_cu, truth_cu);
    if (!pred_ci.empty()) res.mse_cold_item = mse(pred_ci, truth_ci);
    res.epochs = fitted.trace.final_epoch;
    res.converged = fitted.trace.reason == StopReason::Converged;

    Checkpoint& cp = out.checkpoint;
    cp.user_ids = d.user_ids;
    cp.item_ids = d.item_ids;
    cp.hp = config.hp;
    cp.helpfulness_interval = channels.helpfulness.raw_interval;
    cp.centrality_interval = channels.centrality.raw_interval;
    cp.view_interval = channels.view.raw_interval;
    cp.global_mean_rating = mean_rating;
    cp.factors = fitted.factors;
    return out;
}

/// The full protocol: `repeats` independent holdout splits, one fit each,
/// full and cold-start MSE per repeat, aggregated over repeats.
inline EvalReport run_experiment(
    const Dataset& d, const SplitSpec& split_spec, const TrainConfig& config,
    const ChannelOptions& opts = {},
    std::vector<std::vector<PairPrediction>>* prediction_dump = nullptr) {
    split_spec.validate();
    config.validate();

    EvalReport report;
    report.variant = variant_name(config.hp.variant);
    report.k = config.hp.k;
    report.hp = config.hp;
    report.split = split_spec;
    report.dataset_fingerprint = dataset_fingerprint(d);
    if (prediction_dump) prediction_dump->clear();

    std::vector<double> full, cold_user, cold_item;
    for (int r = 0; r < split_spec.repeats; ++r) {
        RepeatOutcome outcome;
        try {
            outcome = run_repeat(d, split_spec, config, r, opts);
        } catch (const DivergenceError& e) {
            throw DivergenceError("repeat " + std::to_string(r) + ": " + e.what(),
                                  e.epoch());
        }
        report.repeats.push_back(outcome.result);
        full.push_back(outcome.result.mse_full);
        if (outcome.result.mse_cold_user)
            cold_user.push_back(*outcome.result.mse_cold_user);
        if (outcome.result.mse_cold_item)
            cold_item.push_back(*outcome.result.mse_cold_item);
        if (prediction_dump) prediction_dump->push_back(std::move(outcome.predictions));
    }
    report.mse_mean = detail::mean_of(full);
    report.mse_std = detail::sample_std(full, report.mse_mean);
    if (!cold_user.empty()) report.cold_user_mse_mean = detail::mean_of(cold_user);
    if (!cold_item.empty()) report.cold_item_mse_mean = detail::mean_of(cold_item);
    return report;
}

/// One report per K, same seeds across K so the comparison is paired.
inline std::vector<EvalReport> sweep_k(const Dataset& d,
                                       const SplitSpec& split_spec,
                                       const TrainConfig& config,
                                       std::span<const int> k_values,
                                       const ChannelOptions& opts = {}) {
    if (k_values.empty()) throw DataError("sweep_k: no K values given");
    std::vector<EvalReport> reports;
    reports.reserve(k_values.size());
    for (int k : k_values) {
        if (k < 1) throw DataError("sweep_k: K values must be >= 1");
        TrainConfig c = config;
        c.hp.k = k;
        reports.push_back(run_experiment(d, split_spec, c, opts));
    }
    return reports;
}

// ---------------------------------------------------------------------------
// Report output. The JSON form is fully deterministic (no wall-clock data),
// so identical runs produce byte-identical files.

inline nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["variant"] = r.variant;
    j["k"] = r.k;
    j["hyperparameters"] = hyperparameters_to_json(r.hp);
    j["split"] = {{"train_fraction", r.split.train_fraction},
                  {"seed", r.split.seed},
                  {"repeats", r.split.repeats}};
    j["dataset_fingerprint"] = r.dataset_fingerprint;
    auto& reps = j["repeats"] = nlohmann::json::array();
    for (const RepeatResult& rr : r.repeats) {
        nlohmann::json e;
        e["repeat"] = rr.repeat;
        e["mse"] = rr.mse_full;
        e["test_pairs"] = rr.test_pairs;
        e["cold_user_pairs"] = rr.cold_user_pairs;
        e["cold_item_pairs"] = rr.cold_item_pairs;
        if (rr.mse_cold_user) e["mse_cold_user"] = *rr.mse_cold_user;
        if (rr.mse_cold_item) e["mse_cold_item"] = *rr.mse_cold_item;
        e["epochs"] = rr.epochs;
        e["converged"] = rr.converged;
        reps.push_back(std::move(e));
    }
    j["mse_mean"] = r.mse_mean;
    j["mse_std"] = r.mse_std;
    if (r.cold_user_mse_mean) j["cold_user_mse_mean"] = *r.cold_user_mse_mean;
    if (r.cold_item_mse_mean) j["cold_item_mse_mean"] = *r.cold_item_mse_mean;
    return j;
}

/// Aligned text table over one or more reports (e.g. a K sweep).
inline void write_report_table(std::span<const EvalReport> reports,
                               std::ostream& out) {
    char line[256];
    std::snprintf(line, sizeof(line), "%-8s %4s %10s %10s %12s %12s %8s",
                  "variant", "K", "MSE", "std", "cold-user", "cold-item",
                  "repeats");
    out << line << '\n';
    out << std::string(70, '-') << '\n';
    const auto cell = [](std::optional<double> v) {
        char buf[32];
        if (v)
            std::snprintf(buf, sizeof(buf), "%12.4f", *v);
        else
            std::snprintf(buf, sizeof(buf), "%12s", "-");
        return std::string(buf);
    };
    for (const EvalReport& r : reports) {
        std::snprintf(line, sizeof(line), "%-8s %4d %10.4f %10.4f", r.variant.c_str(),
                      r.k, r.mse_mean, r.mse_std);
        out << line << cell(r.cold_user_mse_mean) << cell(r.cold_item_mse_mean);
        std::snprintf(line, sizeof(line), " %7d", r.split.repeats);
        out << line << '\n';
    }
    out << '\n';
    for (const EvalReport& r : reports) {
        out << "per-repeat MSE (variant=" << r.variant << ", K=" << r.k << "):";
        for (const RepeatResult& rr : r.repeats) {
            std::snprintf(line, sizeof(line), " %.4f", rr.mse_full);
            out << line;
        }
        out << '\n';
    }
}

/// Pair-level dump: `user \t item \t truth \t prediction`.
inline void write_predictions(const Dataset& d,
                              std::span<const PairPrediction> predictions,
                              std::ostream& out) {
    char buf[64];
    for (const PairPrediction& p : predictions) {
        out << d.user_ids[p.user] << '\t' << d.item_ids[p.item];
        std::snprintf(buf, sizeof(buf), "%.17g", p.truth);
        out << '\t' << buf;
        std::snprintf(buf, sizeof(buf), "%.17g", p.prediction);
        out << '\t' << buf << '\n';
    }
}

}  // namespace recfuse
