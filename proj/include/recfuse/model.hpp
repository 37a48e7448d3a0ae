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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "recfuse/channels.hpp"
#include "recfuse/errors.hpp"
#include "recfuse/scaling.hpp"

namespace recfuse {

// ---------------------------------------------------------------------------
// Model variants. All four share one objective; a variant merely zeroes the
// lambda groups of the channels it ignores:
//
//   MF    -- ratings only          (all channel and coupling weights zero)
//   RHC   -- ratings + helpfulness + centrality
//   RV    -- ratings + views
//   RHCV  -- everything
enum class Variant { MF, RHC, RV, RHCV };

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::MF: return "mf";
        case Variant::RHC: return "rhc";
        case Variant::RV: return "rv";
        case Variant::RHCV: return "rhcv";
    }
    return "?";
}

inline Variant variant_from_name(const std::string& name) {
    if (name == "mf") return Variant::MF;
    if (name == "rhc") return Variant::RHC;
    if (name == "rv") return Variant::RV;
    if (name == "rhcv") return Variant::RHCV;
    throw DataError("unknown variant '" + name + "' (expected mf|rhc|rv|rhcv)");
}

/// Channel weights (lambda_h/d/v), coupling weights pulling the rating user
/// factor toward the auxiliary user factors (lambda_we/wc/ws), and
/// count-weighted prior strengths for all eight factor matrices.
struct Hyperparameters {
    int k = 5;

    double lambda_h = 0.2;
    double lambda_d = 0.2;
    double lambda_v = 0.2;

    double lambda_we = 0.2;
    double lambda_wc = 0.2;
    double lambda_ws = 0.2;

    double lambda_w = 0.1;
    double lambda_z = 0.1;
    double lambda_e = 0.1;
    double lambda_f = 0.1;
    double lambda_c = 0.1;
    double lambda_o = 0.1;
    double lambda_s = 0.1;
    double lambda_u = 0.1;

    double learning_rate = 0.01;
    int max_epochs = 500;
    double conv_tol = 1e-5;

    Variant variant = Variant::RHCV;

    void validate() const {
        if (k < 1) throw DataError("k must be >= 1");
        for (double l : {lambda_h, lambda_d, lambda_v, lambda_we, lambda_wc,
                         lambda_ws, lambda_w, lambda_z, lambda_e, lambda_f,
                         lambda_c, lambda_o, lambda_s, lambda_u})
            if (!(l >= 0.0)) throw DataError("lambda weights must be >= 0");
        if (!(learning_rate > 0.0)) throw DataError("learning_rate must be > 0");
        if (max_epochs < 1) throw DataError("max_epochs must be >= 1");
        if (!(conv_tol > 0.0)) throw DataError("conv_tol must be > 0");
    }

    /// Copy with the variant's unused channel/coupling weights forced to zero.
    Hyperparameters masked() const {
        Hyperparameters hp = *this;
        if (variant == Variant::MF || variant == Variant::RV)
            hp.lambda_h = hp.lambda_d = hp.lambda_we = hp.lambda_wc = 0.0;
        if (variant == Variant::MF || variant == Variant::RHC)
            hp.lambda_v = hp.lambda_ws = 0.0;
        return hp;
    }
};

/// The eight K-dimensional factor matrices, one user/item pair per channel:
/// ratings (W, Z), helpfulness (E, F), centrality (C, O), views (S, U).
/// Rows are entities, columns latent dimensions.
struct LatentFactors {
    Eigen::MatrixXd W, E, C, S;  // user factors, n x K
    Eigen::MatrixXd Z, F, O, U;  // item factors, m x K

    static LatentFactors zeros(int n, int m, int k) {
        LatentFactors f;
        for (Eigen::MatrixXd* u : {&f.W, &f.E, &f.C, &f.S})
            *u = Eigen::MatrixXd::Zero(n, k);
        for (Eigen::MatrixXd* i : {&f.Z, &f.F, &f.O, &f.U})
            *i = Eigen::MatrixXd::Zero(m, k);
        return f;
    }

    int user_count() const { return static_cast<int>(W.rows()); }
    int item_count() const { return static_cast<int>(Z.rows()); }
    int k() const { return static_cast<int>(W.cols()); }

    void validate() const {
        const auto n = W.rows();
        const auto m = Z.rows();
        const auto kk = W.cols();
        for (const Eigen::MatrixXd* u : {&W, &E, &C, &S})
            if (u->rows() != n || u->cols() != kk)
                throw DataError("user factor matrices disagree on shape");
        for (const Eigen::MatrixXd* i : {&Z, &F, &O, &U})
            if (i->rows() != m || i->cols() != kk)
                throw DataError("item factor matrices disagree on shape");
        for (const Eigen::MatrixXd* mat : {&W, &E, &C, &S, &Z, &F, &O, &U})
            if (!mat->allFinite()) throw DataError("non-finite factor entry");
    }

    double squared_norm() const {
        double s = 0.0;
        for (const Eigen::MatrixXd* mat : {&W, &Z, &E, &F, &C, &O, &S, &U})
            s += mat->squaredNorm();
        return s;
    }
};

/// Per-row observation counts of each channel, floored to 1 so rows with no
/// observations (e.g. a view-only user's rating count) still feel their prior.
struct CountWeights {
    Eigen::ArrayXd w, e, c, s;  // per user
    Eigen::ArrayXd z, f, o, u;  // per item
};

/// One channel compiled for training: scaled values in both user-major and
/// item-major order, so each gradient row is a single contiguous sweep.
struct SparseChannel {
    int rows = 0, cols = 0;
    std::vector<int> row_ptr, cols_of_row;
    std::vector<double> row_values;
    std::vector<int> col_ptr, rows_of_col;
    std::vector<double> col_values;

    static SparseChannel compile(const FeedbackChannel& ch, int n, int m) {
        SparseChannel s;
        s.rows = n;
        s.cols = m;
        s.row_ptr.assign(n + 1, 0);
        s.col_ptr.assign(m + 1, 0);
        for (const ChannelEntry& e : ch.entries) {
            ++s.row_ptr[e.user + 1];
            ++s.col_ptr[e.item + 1];
        }
        for (int i = 0; i < n; ++i) s.row_ptr[i + 1] += s.row_ptr[i];
        for (int j = 0; j < m; ++j) s.col_ptr[j + 1] += s.col_ptr[j];
        s.cols_of_row.resize(ch.entries.size());
        s.row_values.resize(ch.entries.size());
        s.rows_of_col.resize(ch.entries.size());
        s.col_values.resize(ch.entries.size());
        std::vector<int> row_fill = s.row_ptr, col_fill = s.col_ptr;
        for (const ChannelEntry& e : ch.entries) {  // entries sorted by (user,item)
            s.cols_of_row[row_fill[e.user]] = e.item;
            s.row_values[row_fill[e.user]++] = e.scaled;
            s.rows_of_col[col_fill[e.item]] = e.user;
            s.col_values[col_fill[e.item]++] = e.scaled;
        }
        return s;
    }

    int nnz() const { return static_cast<int>(row_values.size()); }
    int row_count(int i) const { return row_ptr[i + 1] - row_ptr[i]; }
    int col_count(int j) const { return col_ptr[j + 1] - col_ptr[j]; }
};

/// Everything objective/gradient evaluation needs besides the factors.
struct TrainingProblem {
    int user_count = 0;
    int item_count = 0;
    SparseChannel rating, helpfulness, centrality, view;
    CountWeights counts;
    Hyperparameters hp;  // variant mask already applied
};

namespace detail {

inline Eigen::ArrayXd floored_counts(const SparseChannel& ch, bool by_row) {
    const int n = by_row ? ch.rows : ch.cols;
    Eigen::ArrayXd counts(n);
    for (int i = 0; i < n; ++i) {
        const int c = by_row ? ch.row_count(i) : ch.col_count(i);
        counts[i] = static_cast<double>(c > 0 ? c : 1);
    }
    return counts;
}

}  // namespace detail

inline CountWeights count_weights(const TrainingProblem& p) {
    CountWeights c;
    c.w = detail::floored_counts(p.rating, true);
    c.z = detail::floored_counts(p.rating, false);
    c.e = detail::floored_counts(p.helpfulness, true);
    c.f = detail::floored_counts(p.helpfulness, false);
    c.c = detail::floored_counts(p.centrality, true);
    c.o = detail::floored_counts(p.centrality, false);
    c.s = detail::floored_counts(p.view, true);
    c.u = detail::floored_counts(p.view, false);
    return c;
}

inline TrainingProblem make_problem(const ChannelSet& channels, int n, int m,
                                    const Hyperparameters& hp) {
    hp.validate();
    TrainingProblem p;
    p.user_count = n;
    p.item_count = m;
    p.rating = SparseChannel::compile(channels.rating, n, m);
    p.helpfulness = SparseChannel::compile(channels.helpfulness, n, m);
    p.centrality = SparseChannel::compile(channels.centrality, n, m);
    p.view = SparseChannel::compile(channels.view, n, m);
    p.hp = hp.masked();
    p.counts = count_weights(p);
    return p;
}

// ---------------------------------------------------------------------------
// Link function: tanh maps factor dot products into (-1,+1).

inline double link(double t) { return std::tanh(t); }

inline double link_derivative(double t) {
    const double g = std::tanh(t);
    return 1.0 - g * g;
}

// ---------------------------------------------------------------------------
// Objective. Fifteen terms, each carrying the 1/2 convention:
//
//   phi =  1/2        sum_{I^R} (R_ij - g(W_i.Z_j))^2
//        + lambda_h/2 sum_{I^H} (H_ij - g(E_i.F_j))^2
//        + lambda_d/2 sum_{I^D} (D_ij - g(C_i.O_j))^2
//        + lambda_v/2 sum_{I^V} (V_ij - g(S_i.U_j))^2
//        + lambda_we/2 ||W - E||^2 + lambda_wc/2 ||W - C||^2
//        + lambda_ws/2 ||W - S||^2
//        + eight count-weighted Frobenius priors lambda_*/2 sum n_* ||row||^2
//
// Channel values are the scaled [-1,+1] observations.

namespace detail {

inline double channel_squared_error(const Eigen::MatrixXd& user_factors,
                                    const Eigen::MatrixXd& item_factors,
                                    const SparseChannel& ch) {
    double acc = 0.0;
    for (int i = 0; i < ch.rows; ++i) {
        for (int e = ch.row_ptr[i]; e < ch.row_ptr[i + 1]; ++e) {
            const int j = ch.cols_of_row[e];
            const double err =
                ch.row_values[e] - link(user_factors.row(i).dot(item_factors.row(j)));
            acc += err * err;
        }
    }
    return acc;
}

inline double weighted_row_norms(const Eigen::MatrixXd& factors,
                                 const Eigen::ArrayXd& counts) {
    return (factors.rowwise().squaredNorm().array() * counts).sum();
}

/// Channel term of the gradient with respect to the user-side factor rows:
///   weight * sum_j I_ij g'(x_i.y_j)(g(x_i.y_j) - value_ij) y_j
inline void add_channel_gradient_rows(const Eigen::MatrixXd& user_factors,
                                      const Eigen::MatrixXd& item_factors,
                                      const SparseChannel& ch, double weight,
                                      Eigen::MatrixXd& grad_user) {
    for (int i = 0; i < ch.rows; ++i) {
        for (int e = ch.row_ptr[i]; e < ch.row_ptr[i + 1]; ++e) {
            const int j = ch.cols_of_row[e];
            const double t = user_factors.row(i).dot(item_factors.row(j));
            const double g = std::tanh(t);
            const double coef = weight * (1.0 - g * g) * (g - ch.row_values[e]);
            grad_user.row(i) += coef * item_factors.row(j);
        }
    }
}

/// Same channel term, item side (sweeps the column-major layout).
inline void add_channel_gradient_cols(const Eigen::MatrixXd& user_factors,
                                      const Eigen::MatrixXd& item_factors,
                                      const SparseChannel& ch, double weight,
                                      Eigen::MatrixXd& grad_item) {
    for (int j = 0; j < ch.cols; ++j) {
        for (int e = ch.col_ptr[j]; e < ch.col_ptr[j + 1]; ++e) {
            const int i = ch.rows_of_col[e];
            const double t = user_factors.row(i).dot(item_factors.row(j));
            const double g = std::tanh(t);
            const double coef = weight * (1.0 - g * g) * (g - ch.col_values[e]);
            grad_item.row(j) += coef * user_factors.row(i);
        }
    }
}

inline void add_prior_gradient(const Eigen::MatrixXd& factors,
                               const Eigen::ArrayXd& counts, double weight,
                               Eigen::MatrixXd& grad) {
    grad += weight * (factors.array().colwise() * counts).matrix();
}

}  // namespace detail

inline double objective(const LatentFactors& f, const TrainingProblem& p) {
    const Hyperparameters& hp = p.hp;
    double phi = 0.0;
    phi += 0.5 * detail::channel_squared_error(f.W, f.Z, p.rating);
    phi += 0.5 * hp.lambda_h * detail::channel_squared_error(f.E, f.F, p.helpfulness);
    phi += 0.5 * hp.lambda_d * detail::channel_squared_error(f.C, f.O, p.centrality);
    phi += 0.5 * hp.lambda_v * detail::channel_squared_error(f.S, f.U, p.view);

    phi += 0.5 * hp.lambda_we * (f.W - f.E).squaredNorm();
    phi += 0.5 * hp.lambda_wc * (f.W - f.C).squaredNorm();
    phi += 0.5 * hp.lambda_ws * (f.W - f.S).squaredNorm();

    phi += 0.5 * hp.lambda_w * detail::weighted_row_norms(f.W, p.counts.w);
    phi += 0.5 * hp.lambda_z * detail::weighted_row_norms(f.Z, p.counts.z);
    phi += 0.5 * hp.lambda_e * detail::weighted_row_norms(f.E, p.counts.e);
    phi += 0.5 * hp.lambda_f * detail::weighted_row_norms(f.F, p.counts.f);
    phi += 0.5 * hp.lambda_c * detail::weighted_row_norms(f.C, p.counts.c);
    phi += 0.5 * hp.lambda_o * detail::weighted_row_norms(f.O, p.counts.o);
    phi += 0.5 * hp.lambda_s * detail::weighted_row_norms(f.S, p.counts.s);
    phi += 0.5 * hp.lambda_u * detail::weighted_row_norms(f.U, p.counts.u);
    return phi;
}

/// Analytic gradient of the objective with respect to all eight matrices.
/// Per user row i (and symmetrically per item row j):
///   dphi/dW_i = sum_j I^R g'(W_i.Z_j)(g(W_i.Z_j)-R_ij) Z_j
///             + lambda_we (W_i-E_i) + lambda_wc (W_i-C_i) + lambda_ws (W_i-S_i)
///             + lambda_w n_w_i W_i
/// The coupled factors E, C, S receive the coupling with opposite sign.
inline LatentFactors gradient(const LatentFactors& f, const TrainingProblem& p) {
    const Hyperparameters& hp = p.hp;
    LatentFactors g = LatentFactors::zeros(f.user_count(), f.item_count(), f.k());

    detail::add_channel_gradient_rows(f.W, f.Z, p.rating, 1.0, g.W);
    detail::add_channel_gradient_cols(f.W, f.Z, p.rating, 1.0, g.Z);
    detail::add_channel_gradient_rows(f.E, f.F, p.helpfulness, hp.lambda_h, g.E);
    detail::add_channel_gradient_cols(f.E, f.F, p.helpfulness, hp.lambda_h, g.F);
    detail::add_channel_gradient_rows(f.C, f.O, p.centrality, hp.lambda_d, g.C);
    detail::add_channel_gradient_cols(f.C, f.O, p.centrality, hp.lambda_d, g.O);
    detail::add_channel_gradient_rows(f.S, f.U, p.view, hp.lambda_v, g.S);
    detail::add_channel_gradient_cols(f.S, f.U, p.view, hp.lambda_v, g.U);

    g.W += hp.lambda_we * (f.W - f.E);
    g.W += hp.lambda_wc * (f.W - f.C);
    g.W += hp.lambda_ws * (f.W - f.S);
    g.E -= hp.lambda_we * (f.W - f.E);
    g.C -= hp.lambda_wc * (f.W - f.C);
    g.S -= hp.lambda_ws * (f.W - f.S);

    detail::add_prior_gradient(f.W, p.counts.w, hp.lambda_w, g.W);
    detail::add_prior_gradient(f.Z, p.counts.z, hp.lambda_z, g.Z);
    detail::add_prior_gradient(f.E, p.counts.e, hp.lambda_e, g.E);
    detail::add_prior_gradient(f.F, p.counts.f, hp.lambda_f, g.F);
    detail::add_prior_gradient(f.C, p.counts.c, hp.lambda_c, g.C);
    detail::add_prior_gradient(f.O, p.counts.o, hp.lambda_o, g.O);
    detail::add_prior_gradient(f.S, p.counts.s, hp.lambda_s, g.S);
    detail::add_prior_gradient(f.U, p.counts.u, hp.lambda_u, g.U);
    return g;
}

// ---------------------------------------------------------------------------
// Rating prediction: the link output un-mapped onto the 1..5 star scale.

inline double predict_scaled(const LatentFactors& f, int user, int item) {
    return link(f.W.row(user).dot(f.Z.row(item)));
}

inline double predict_rating(const LatentFactors& f, int user, int item,
                             ScaleInterval rating_interval = kRatingInterval) {
    return unscale_value(predict_scaled(f, user, item), rating_interval,
                         kModelInterval);
}

}  // namespace recfuse
