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

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "recfuse/errors.hpp"
#include "recfuse/model.hpp"

namespace recfuse {

inline constexpr const char* kCheckpointFormat = "recfuse.checkpoint";
inline constexpr int kCheckpointVersion = 1;

/// Trained model snapshot: the factors, the hyperparameters that produced
/// them, every channel's raw scaling interval, and the id maps needed to
/// answer predictions by opaque id.
struct Checkpoint {
    std::vector<std::string> user_ids;
    std::vector<std::string> item_ids;
    Hyperparameters hp;
    ScaleInterval rating_interval = kRatingInterval;
    ScaleInterval helpfulness_interval;
    ScaleInterval centrality_interval;
    ScaleInterval view_interval{0.0, 1.0};
    double global_mean_rating = 3.0;  // fallback for unknown users/items
    LatentFactors factors;

    int user_index_of(const std::string& id) const {
        for (int u = 0; u < static_cast<int>(user_ids.size()); ++u)
            if (user_ids[u] == id) return u;
        return -1;
    }
    int item_index_of(const std::string& id) const {
        for (int i = 0; i < static_cast<int>(item_ids.size()); ++i)
            if (item_ids[i] == id) return i;
        return -1;
    }
};

namespace detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw DataError("checkpoint matrix is not an array");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols =
        rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[r].size()) != cols)
            throw DataError("ragged checkpoint matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

inline nlohmann::json interval_to_json(ScaleInterval iv) {
    return nlohmann::json::array({iv.lo, iv.hi});
}

inline ScaleInterval interval_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2)
        throw DataError("bad interval in checkpoint");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline nlohmann::json hyperparameters_to_json(const Hyperparameters& hp) {
    return {{"k", hp.k},
            {"lambda_h", hp.lambda_h},
            {"lambda_d", hp.lambda_d},
            {"lambda_v", hp.lambda_v},
            {"lambda_we", hp.lambda_we},
            {"lambda_wc", hp.lambda_wc},
            {"lambda_ws", hp.lambda_ws},
            {"lambda_w", hp.lambda_w},
            {"lambda_z", hp.lambda_z},
            {"lambda_e", hp.lambda_e},
            {"lambda_f", hp.lambda_f},
            {"lambda_c", hp.lambda_c},
            {"lambda_o", hp.lambda_o},
            {"lambda_s", hp.lambda_s},
            {"lambda_u", hp.lambda_u},
            {"learning_rate", hp.learning_rate},
            {"max_epochs", hp.max_epochs},
            {"conv_tol", hp.conv_tol},
            {"variant", variant_name(hp.variant)}};
}

inline Hyperparameters hyperparameters_from_json(const nlohmann::json& j) {
    Hyperparameters hp;
    hp.k = j.at("k").get<int>();
    hp.lambda_h = j.at("lambda_h").get<double>();
    hp.lambda_d = j.at("lambda_d").get<double>();
    hp.lambda_v = j.at("lambda_v").get<double>();
    hp.lambda_we = j.at("lambda_we").get<double>();
    hp.lambda_wc = j.at("lambda_wc").get<double>();
    hp.lambda_ws = j.at("lambda_ws").get<double>();
    hp.lambda_w = j.at("lambda_w").get<double>();
    hp.lambda_z = j.at("lambda_z").get<double>();
    hp.lambda_e = j.at("lambda_e").get<double>();
    hp.lambda_f = j.at("lambda_f").get<double>();
    hp.lambda_c = j.at("lambda_c").get<double>();
    hp.lambda_o = j.at("lambda_o").get<double>();
    hp.lambda_s = j.at("lambda_s").get<double>();
    hp.lambda_u = j.at("lambda_u").get<double>();
    hp.learning_rate = j.at("learning_rate").get<double>();
    hp.max_epochs = j.at("max_epochs").get<int>();
    hp.conv_tol = j.at("conv_tol").get<double>();
    hp.variant = variant_from_name(j.at("variant").get<std::string>());
    return hp;
}

inline void save_checkpoint(const Checkpoint& cp, std::ostream& out) {
    nlohmann::json j;
    j["format"] = kCheckpointFormat;
    j["version"] = kCheckpointVersion;
    j["k"] = cp.hp.k;
    j["users"] = cp.user_ids;
    j["items"] = cp.item_ids;
    j["hyperparameters"] = hyperparameters_to_json(cp.hp);
    j["intervals"] = {{"rating", detail::interval_to_json(cp.rating_interval)},
                      {"helpfulness", detail::interval_to_json(cp.helpfulness_interval)},
                      {"centrality", detail::interval_to_json(cp.centrality_interval)},
                      {"view", detail::interval_to_json(cp.view_interval)}};
    j["global_mean_rating"] = cp.global_mean_rating;
    j["factors"] = {{"W", detail::matrix_to_json(cp.factors.W)},
                    {"Z", detail::matrix_to_json(cp.factors.Z)},
                    {"E", detail::matrix_to_json(cp.factors.E)},
                    {"F", detail::matrix_to_json(cp.factors.F)},
                    {"C", detail::matrix_to_json(cp.factors.C)},
                    {"O", detail::matrix_to_json(cp.factors.O)},
                    {"S", detail::matrix_to_json(cp.factors.S)},
                    {"U", detail::matrix_to_json(cp.factors.U)}};
    out << j.dump(0) << '\n';
}

inline Checkpoint load_checkpoint(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("cannot parse checkpoint: ") + e.what());
    }
    if (!j.is_object() || j.value("format", "") != kCheckpointFormat)
        throw DataError("not a checkpoint file");
    if (j.value("version", 0) != kCheckpointVersion)
        throw DataError("unsupported checkpoint version");
    Checkpoint cp;
    try {
        cp.user_ids = j.at("users").get<std::vector<std::string>>();
        cp.item_ids = j.at("items").get<std::vector<std::string>>();
        cp.hp = hyperparameters_from_json(j.at("hyperparameters"));
        const auto& iv = j.at("intervals");
        cp.rating_interval = detail::interval_from_json(iv.at("rating"));
        cp.helpfulness_interval = detail::interval_from_json(iv.at("helpfulness"));
        cp.centrality_interval = detail::interval_from_json(iv.at("centrality"));
        cp.view_interval = detail::interval_from_json(iv.at("view"));
        cp.global_mean_rating = j.at("global_mean_rating").get<double>();
        const auto& f = j.at("factors");
        cp.factors.W = detail::matrix_from_json(f.at("W"));
        cp.factors.Z = detail::matrix_from_json(f.at("Z"));
        cp.factors.E = detail::matrix_from_json(f.at("E"));
        cp.factors.F = detail::matrix_from_json(f.at("F"));
        cp.factors.C = detail::matrix_from_json(f.at("C"));
        cp.factors.O = detail::matrix_from_json(f.at("O"));
        cp.factors.S = detail::matrix_from_json(f.at("S"));
        cp.factors.U = detail::matrix_from_json(f.at("U"));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed checkpoint: ") + e.what());
    }
    cp.factors.validate();
    return cp;
}

}  // namespace recfuse
