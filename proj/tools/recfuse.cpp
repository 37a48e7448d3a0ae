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

// Command-line front end: ingest review/view logs, export feature channels,
// train and evaluate the factorization models, answer point predictions, and
// generate synthetic corpora.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 training divergence.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "recfuse/channels.hpp"
#include "recfuse/checkpoint.hpp"
#include "recfuse/config.hpp"
#include "recfuse/dataset.hpp"
#include "recfuse/errors.hpp"
#include "recfuse/evaluation.hpp"
#include "recfuse/io.hpp"
#include "recfuse/synthetic.hpp"
#include "recfuse/trainer.hpp"

namespace fs = std::filesystem;
using namespace recfuse;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDivergence = 3;

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

Dataset load_dataset_file(const fs::path& path) {
    auto in = open_input(path);
    return load_dataset(in);
}

std::vector<int> parse_k_list(const std::string& text) {
    std::vector<int> ks;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        try {
            std::size_t pos = 0;
            const int k = std::stoi(token, &pos);
            if (pos != token.size() || k < 1) throw std::invalid_argument(token);
            ks.push_back(k);
        } catch (const std::exception&) {
            throw DataError("bad K value '" + token + "'");
        }
    }
    if (ks.empty()) throw DataError("empty K list");
    return ks;
}

// ---------------------------------------------------------------------------
// Shared training/evaluation flags. Every knob can also come from a
// `key = value` config file; explicit flags win over the file.

struct RunFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string variant = "rhcv";
    std::string k_list = "5";
    double learning_rate = 0.01;
    int max_epochs = 500;
    double conv_tol = 1e-5;
    double init_std = 0.1;
    int log_every = 1;
    double train_fraction = 0.8;
    int repeats = 5;
    double lambda_h = 0.2, lambda_d = 0.2, lambda_v = 0.2;
    double lambda_we = 0.2, lambda_wc = 0.2, lambda_ws = 0.2;
    double lambda_w = 0.1, lambda_z = 0.1, lambda_e = 0.1, lambda_f = 0.1;
    double lambda_c = 0.1, lambda_o = 0.1, lambda_s = 0.1, lambda_u = 0.1;
    double alpha = 0.5;
    double positive_threshold = 3.0;
    bool unviewed_as_negative = false;
};

void add_run_flags(CLI::App& cmd, RunFlags& f) {
    cmd.add_option("--config", f.config_path, "key = value config file");
    cmd.add_option("--seed", f.seed, "root seed for all randomness");
    cmd.add_option("--variant", f.variant, "model variant")
        ->check(CLI::IsMember({"mf", "rhc", "rv", "rhcv"}));
    cmd.add_option("--k", f.k_list, "latent dimensionality (N or N,N,...)");
    cmd.add_option("--learning-rate", f.learning_rate, "gradient step size");
    cmd.add_option("--max-epochs", f.max_epochs, "epoch cap");
    cmd.add_option("--conv-tol", f.conv_tol, "relative objective tolerance");
    cmd.add_option("--init-std", f.init_std, "factor init stddev");
    cmd.add_option("--log-every", f.log_every, "trace every n-th epoch");
    cmd.add_option("--train-fraction", f.train_fraction, "holdout train share");
    cmd.add_option("--repeats", f.repeats, "holdout repetitions");
    cmd.add_option("--lambda-h", f.lambda_h, "helpfulness channel weight");
    cmd.add_option("--lambda-d", f.lambda_d, "centrality channel weight");
    cmd.add_option("--lambda-v", f.lambda_v, "view channel weight");
    cmd.add_option("--lambda-we", f.lambda_we, "W~E coupling weight");
    cmd.add_option("--lambda-wc", f.lambda_wc, "W~C coupling weight");
    cmd.add_option("--lambda-ws", f.lambda_ws, "W~S coupling weight");
    cmd.add_option("--lambda-w", f.lambda_w, "prior weight for W");
    cmd.add_option("--lambda-z", f.lambda_z, "prior weight for Z");
    cmd.add_option("--lambda-e", f.lambda_e, "prior weight for E");
    cmd.add_option("--lambda-f", f.lambda_f, "prior weight for F");
    cmd.add_option("--lambda-c", f.lambda_c, "prior weight for C");
    cmd.add_option("--lambda-o", f.lambda_o, "prior weight for O");
    cmd.add_option("--lambda-s", f.lambda_s, "prior weight for S");
    cmd.add_option("--lambda-u", f.lambda_u, "prior weight for U");
    cmd.add_option("--alpha", f.alpha, "centrality blend weight");
    cmd.add_option("--positive-threshold", f.positive_threshold,
                   "ratings at/above this count as positive");
    cmd.add_flag("--unviewed-as-negative", f.unviewed_as_negative,
                 "treat never-viewed pairs as 0-valued view observations");
}

struct ResolvedRun {
    TrainConfig config;
    SplitSpec split;
    ChannelOptions channels;
    std::vector<int> ks;
};

ResolvedRun resolve_run(const CLI::App& cmd, const RunFlags& f) {
    RunConfig file;
    if (!f.config_path.empty()) {
        auto in = open_input(f.config_path);
        file = RunConfig::parse(in);
    }
    const auto pick_d = [&](const char* flag, double flag_val, const char* key,
                            double def) {
        return cmd.count(flag) ? flag_val : file.get_double(key, def);
    };
    const auto pick_i = [&](const char* flag, long long flag_val, const char* key,
                            long long def) {
        return cmd.count(flag) ? flag_val : file.get_int(key, def);
    };
    const Hyperparameters def{};

    ResolvedRun r;
    Hyperparameters& hp = r.config.hp;
    hp.lambda_h = pick_d("--lambda-h", f.lambda_h, "lambda_h", def.lambda_h);
    hp.lambda_d = pick_d("--lambda-d", f.lambda_d, "lambda_d", def.lambda_d);
    hp.lambda_v = pick_d("--lambda-v", f.lambda_v, "lambda_v", def.lambda_v);
    hp.lambda_we = pick_d("--lambda-we", f.lambda_we, "lambda_we", def.lambda_we);
    hp.lambda_wc = pick_d("--lambda-wc", f.lambda_wc, "lambda_wc", def.lambda_wc);
    hp.lambda_ws = pick_d("--lambda-ws", f.lambda_ws, "lambda_ws", def.lambda_ws);
    hp.lambda_w = pick_d("--lambda-w", f.lambda_w, "lambda_w", def.lambda_w);
    hp.lambda_z = pick_d("--lambda-z", f.lambda_z, "lambda_z", def.lambda_z);
    hp.lambda_e = pick_d("--lambda-e", f.lambda_e, "lambda_e", def.lambda_e);
    hp.lambda_f = pick_d("--lambda-f", f.lambda_f, "lambda_f", def.lambda_f);
    hp.lambda_c = pick_d("--lambda-c", f.lambda_c, "lambda_c", def.lambda_c);
    hp.lambda_o = pick_d("--lambda-o", f.lambda_o, "lambda_o", def.lambda_o);
    hp.lambda_s = pick_d("--lambda-s", f.lambda_s, "lambda_s", def.lambda_s);
    hp.lambda_u = pick_d("--lambda-u", f.lambda_u, "lambda_u", def.lambda_u);
    hp.learning_rate =
        pick_d("--learning-rate", f.learning_rate, "learning_rate", def.learning_rate);
    hp.max_epochs = static_cast<int>(
        pick_i("--max-epochs", f.max_epochs, "max_epochs", def.max_epochs));
    hp.conv_tol = pick_d("--conv-tol", f.conv_tol, "conv_tol", def.conv_tol);
    hp.variant = variant_from_name(
        cmd.count("--variant") ? f.variant : file.get_string("variant", "rhcv"));

    r.ks = parse_k_list(cmd.count("--k") ? f.k_list : file.get_string("k", "5"));
    hp.k = r.ks.front();

    r.config.seed = static_cast<std::uint64_t>(
        pick_i("--seed", static_cast<long long>(f.seed), "seed", 0));
    r.config.init_std = pick_d("--init-std", f.init_std, "init_std", 0.1);
    r.config.log_every =
        static_cast<int>(pick_i("--log-every", f.log_every, "log_every", 1));

    r.split.train_fraction =
        pick_d("--train-fraction", f.train_fraction, "train_fraction", 0.8);
    r.split.repeats =
        static_cast<int>(pick_i("--repeats", f.repeats, "repeats", 5));
    r.split.seed = r.config.seed;

    r.channels.sign_rule.positive_threshold = pick_d(
        "--positive-threshold", f.positive_threshold, "positive_threshold", 3.0);
    r.channels.centrality.alpha = pick_d("--alpha", f.alpha, "alpha", 0.5);
    r.channels.unviewed_as_negative =
        cmd.count("--unviewed-as-negative")
            ? f.unviewed_as_negative
            : file.get_bool("unviewed_as_negative", false);
    return r;
}

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_ingest(const std::string& reviews_path, const std::string& views_path,
               const std::string& out_dir) {
    auto reviews_in = open_input(reviews_path);
    const auto reviews = read_reviews_jsonl(reviews_in);
    std::vector<ViewRecord> views;
    if (!views_path.empty()) {
        auto views_in = open_input(views_path);
        views = read_views_tsv(views_in);
    }
    const Dataset d = build_dataset(reviews, views);

    fs::create_directories(out_dir);
    auto out = open_output(fs::path(out_dir) / "dataset.json");
    save_dataset(d, out);

    std::printf("%-12s %-12s %-18s %-10s\n", "# users", "# items",
                "# reviews/ratings", "sparsity");
    std::printf("%-12d %-12d %-18d %-10.6f\n", d.user_count(), d.item_count(),
                d.review_count(), d.sparsity());
    std::printf("dataset written to %s\n",
                (fs::path(out_dir) / "dataset.json").string().c_str());
    return kExitOk;
}

int cmd_features(const std::string& dataset_path, const std::string& out_dir,
                 const ResolvedRun& run) {
    const Dataset d = load_dataset_file(dataset_path);
    const auto indices = all_review_indices(d);
    const ChannelSet channels = build_channels(d, indices, run.channels);

    fs::create_directories(out_dir);
    const auto dump = [&](const FeedbackChannel& ch, const char* name) {
        auto out = open_output(fs::path(out_dir) / (std::string(name) + ".tsv"));
        export_channel(d, ch, out);
    };
    dump(channels.helpfulness, "helpfulness");
    dump(channels.centrality, "centrality");
    dump(channels.view, "view");

    nlohmann::json intervals = {
        {"rating", {channels.rating.raw_interval.lo, channels.rating.raw_interval.hi}},
        {"helpfulness",
         {channels.helpfulness.raw_interval.lo, channels.helpfulness.raw_interval.hi}},
        {"centrality",
         {channels.centrality.raw_interval.lo, channels.centrality.raw_interval.hi}},
        {"view", {channels.view.raw_interval.lo, channels.view.raw_interval.hi}}};
    auto iv_out = open_output(fs::path(out_dir) / "intervals.json");
    iv_out << intervals.dump(2) << '\n';

    std::printf("channels written: helpfulness=%zu centrality=%zu view=%zu\n",
                channels.helpfulness.size(), channels.centrality.size(),
                channels.view.size());
    return kExitOk;
}

int cmd_train(const std::string& dataset_path, const std::string& out_dir,
              const ResolvedRun& run) {
    const Dataset d = load_dataset_file(dataset_path);
    const auto indices = all_review_indices(d);
    const ChannelSet channels = build_channels(d, indices, run.channels);
    const TrainingProblem problem =
        make_problem(channels, d.user_count(), d.item_count(), run.config.hp);

    fs::create_directories(out_dir);
    TrainTrace trace;
    FitResult fitted;
    int exit_code = kExitOk;
    try {
        fitted = fit(problem, run.config, &trace);
    } catch (const DivergenceError& e) {
        auto trace_out = open_output(fs::path(out_dir) / "trace.csv");
        trace.write_csv(trace_out);
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDivergence;
    }
    {
        auto trace_out = open_output(fs::path(out_dir) / "trace.csv");
        fitted.trace.write_csv(trace_out);
    }

    double mean_rating = 0.0;
    for (const IndexedReview& r : d.reviews) mean_rating += r.rating;
    mean_rating /= static_cast<double>(d.review_count());

    Checkpoint cp;
    cp.user_ids = d.user_ids;
    cp.item_ids = d.item_ids;
    cp.hp = run.config.hp;
    cp.helpfulness_interval = channels.helpfulness.raw_interval;
    cp.centrality_interval = channels.centrality.raw_interval;
    cp.view_interval = channels.view.raw_interval;
    cp.global_mean_rating = mean_rating;
    cp.factors = fitted.factors;
    auto cp_out = open_output(fs::path(out_dir) / "checkpoint.json");
    save_checkpoint(cp, cp_out);

    std::printf("%s after %d epochs, objective %.6f\n",
                fitted.trace.reason == StopReason::Converged ? "converged"
                                                             : "hit max_epochs",
                fitted.trace.final_epoch, fitted.trace.epochs.back().objective);
    return exit_code;
}

int cmd_evaluate(const std::string& dataset_path, const std::string& out_dir,
                 const ResolvedRun& run) {
    const Dataset d = load_dataset_file(dataset_path);
    fs::create_directories(out_dir);

    std::vector<EvalReport> reports;
    for (int k : run.ks) {
        TrainConfig config = run.config;
        config.hp.k = k;
        std::vector<std::vector<PairPrediction>> dumps;
        const EvalReport report =
            run_experiment(d, run.split, config, run.channels, &dumps);
        reports.push_back(report);

        auto json_out =
            open_output(fs::path(out_dir) / ("report_k" + std::to_string(k) + ".json"));
        json_out << report_to_json(report).dump(2) << '\n';
        for (std::size_t r = 0; r < dumps.size(); ++r) {
            auto pred_out = open_output(
                fs::path(out_dir) / ("predictions_k" + std::to_string(k) +
                                     "_repeat" + std::to_string(r) + ".tsv"));
            write_predictions(d, dumps[r], pred_out);
        }
    }
    {
        auto table_out = open_output(fs::path(out_dir) / "report.txt");
        write_report_table(reports, table_out);
    }
    std::ostringstream table;
    write_report_table(reports, table);
    std::fputs(table.str().c_str(), stdout);
    return kExitOk;
}

int cmd_predict(const std::string& checkpoint_path, const std::string& user_id,
                const std::string& item_id) {
    auto in = open_input(checkpoint_path);
    const Checkpoint cp = load_checkpoint(in);
    const int u = cp.user_index_of(user_id);
    const int i = cp.item_index_of(item_id);
    if (u >= 0 && i >= 0) {
        const double rating =
            predict_rating(cp.factors, u, i, cp.rating_interval);
        std::printf("%.6f\n", rating);
    } else {
        std::printf("%.6f (fallback: unknown %s, using global mean)\n",
                    cp.global_mean_rating, u < 0 ? "user" : "item");
    }
    return kExitOk;
}

int cmd_synth(const SyntheticSpec& spec, const std::string& out_dir) {
    const SyntheticData data = generate_synthetic(spec);
    fs::create_directories(out_dir);

    auto reviews_out = open_output(fs::path(out_dir) / "reviews.jsonl");
    for (const ReviewRecord& r : data.reviews) {
        nlohmann::json j = {{"reviewerID", r.user_id},
                            {"asin", r.item_id},
                            {"overall", r.rating},
                            {"helpful", {r.helpful_yes, r.helpful_total}},
                            {"unixReviewTime", r.timestamp}};
        reviews_out << j.dump() << '\n';
    }
    auto views_out = open_output(fs::path(out_dir) / "views.tsv");
    for (const ViewRecord& v : data.views)
        views_out << v.user_id << '\t' << v.item_id << '\n';

    nlohmann::json factors;
    factors["format"] = "recfuse.planted_factors";
    factors["true_k"] = spec.true_k;
    factors["user_factors"] = detail::matrix_to_json(data.true_user_factors);
    factors["item_factors"] = detail::matrix_to_json(data.true_item_factors);
    auto factors_out = open_output(fs::path(out_dir) / "true_factors.json");
    factors_out << factors.dump(0) << '\n';

    std::printf("synthetic corpus: %zu reviews, %zu views -> %s\n",
                data.reviews.size(), data.views.size(), out_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"recommender toolkit: feedback channels + fused matrix "
                 "factorization"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "index review/view logs");
    std::string reviews_path, views_path, out_dir = ".";
    ingest->add_option("--reviews", reviews_path, "JSON-lines review file")
        ->required();
    ingest->add_option("--views", views_path, "TSV view file");
    ingest->add_option("--out", out_dir, "output directory");

    // features
    auto* features = app.add_subcommand("features", "export H/D/V channels");
    std::string dataset_path;
    features->add_option("--dataset", dataset_path, "dataset file")->required();
    features->add_option("--out", out_dir, "output directory");
    RunFlags features_flags;
    add_run_flags(*features, features_flags);

    // train
    auto* train = app.add_subcommand("train", "fit a model on the full dataset");
    train->add_option("--dataset", dataset_path, "dataset file")->required();
    train->add_option("--out", out_dir, "output directory");
    RunFlags train_flags;
    add_run_flags(*train, train_flags);

    // evaluate
    auto* evaluate =
        app.add_subcommand("evaluate", "repeated holdout MSE evaluation");
    evaluate->add_option("--dataset", dataset_path, "dataset file")->required();
    evaluate->add_option("--out", out_dir, "output directory");
    RunFlags eval_flags;
    add_run_flags(*evaluate, eval_flags);

    // predict
    auto* predict = app.add_subcommand("predict", "predict one rating");
    std::string checkpoint_path, user_id, item_id;
    predict->add_option("--checkpoint", checkpoint_path, "checkpoint file")
        ->required();
    predict->add_option("--user", user_id, "user id")->required();
    predict->add_option("--item", item_id, "item id")->required();

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    SyntheticSpec spec;
    bool no_quantize = false;
    synth->add_option("--out", out_dir, "output directory");
    synth->add_option("--users", spec.user_count, "user count");
    synth->add_option("--items", spec.item_count, "item count");
    synth->add_option("--true-k", spec.true_k, "planted rank");
    synth->add_option("--density", spec.density, "rated pair fraction");
    synth->add_option("--view-density", spec.view_density, "viewed pair fraction");
    synth->add_option("--rho", spec.channel_correlation,
                      "channel/rating factor correlation");
    synth->add_option("--noise", spec.noise_std, "latent noise stddev");
    synth->add_option("--seed", spec.seed, "generator seed");
    synth->add_flag("--no-quantize", no_quantize, "keep ratings continuous");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(reviews_path, views_path, out_dir);
        if (features->parsed())
            return cmd_features(dataset_path, out_dir,
                                resolve_run(*features, features_flags));
        if (train->parsed())
            return cmd_train(dataset_path, out_dir,
                             resolve_run(*train, train_flags));
        if (evaluate->parsed())
            return cmd_evaluate(dataset_path, out_dir,
                                resolve_run(*evaluate, eval_flags));
        if (predict->parsed())
            return cmd_predict(checkpoint_path, user_id, item_id);
        if (synth->parsed()) {
            spec.quantize_ratings = !no_quantize;
            return cmd_synth(spec, out_dir);
        }
    } catch (const DivergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDivergence;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
    return kExitUsage;
}
