// SPDX-License-Identifier: Apache-2.0
//
// fdpc-lab: dirty paper coding rates over fading channels with imperfect CSIT
// Copyright (C) 2026 The fdpc-lab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "fdpc/inflation.hpp"

#include <cmath>
#include <limits>

#include "fdpc/errors.hpp"
#include "fdpc/parallel.hpp"

namespace fdpc {

void SolverConfig::validate() const {
    if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
    if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("tol must be in (0, 1)");
    if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must be in (0, 1]");
    if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw std::invalid_argument("rank_tol must be in (0, 1)");
}

SolverKind parse_solver_kind(std::string_view name) {
    if (name == "alg1") return SolverKind::Alg1;
    if (name == "alg2") return SolverKind::Alg2;
    if (name == "zero") return SolverKind::Zero;
    if (name == "pinv") return SolverKind::Pinv;
    if (name == "identity") return SolverKind::Identity;
    if (name == "perfect") return SolverKind::Perfect;
    throw ConfigError("unknown solver '" + std::string(name) + "'");
}

std::string to_string(SolverKind kind) {
    switch (kind) {
        case SolverKind::Alg1: return "alg1";
        case SolverKind::Alg2: return "alg2";
        case SolverKind::Zero: return "zero";
        case SolverKind::Pinv: return "pinv";
        case SolverKind::Identity: return "identity";
        case SolverKind::Perfect: return "perfect";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------

InflationFactor w_perfect_csit(const ChannelSpec& spec, const Mat& H) {
    const Mat& T = spec.T();
    const Mat ht = H * T;
    Mat n = ht * ht.adjoint() + spec.sigma_z();
    Eigen::LLT<Mat> llt(n);
    return {ht.adjoint() * llt.solve(H)};
}

InflationFactor w_pinv(const ChannelSpec& spec, double rank_tol) { return {linalg::pinv(spec.T(), rank_tol)}; }

InflationFactor identity_embedding(const ChannelSpec& spec) {
    const auto& d = spec.dims();
    if (d.m == d.t && linalg::numerical_rank(spec.T()) == d.t) return from_unfactored(spec, Mat::Identity(d.t, d.t));
    return {Mat::Identity(d.m, d.t)};
}

Mat w_high_snr_pd(const ChannelSpec& spec) {
    const auto& d = spec.dims();
    if (d.m != d.t) throw std::invalid_argument("high-SNR p.d. choice requires m == t");
    return Mat::Identity(d.t, d.t);
}

InflationFactor from_unfactored(const ChannelSpec& spec, const Mat& W_pd) {
    const auto& d = spec.dims();
    if (d.m != d.t) throw std::invalid_argument("unfactored inflation factors require m == t");
    Eigen::FullPivLU<Mat> lu(spec.T());
    if (!lu.isInvertible()) throw std::invalid_argument("unfactored inflation factors require invertible T");
    return {lu.solve(W_pd)};
}

int theoretical_scaling(int rank_sum, int m, int r) {
    if (m < 1 || r < 1 || rank_sum < m)
        throw std::invalid_argument("theoretical_scaling requires rank_sum >= m >= 1 and r >= 1");
    return std::min(r, rank_sum) - std::min(r, rank_sum - m);
}

int pd_scaling(int t, int r) {
    if (t < 1 || r < 1) throw std::invalid_argument("pd_scaling requires positive antenna counts");
    return std::min(t, r);
}

InflationFactor canonicalize(const ChannelSpec& spec, const InflationFactor& W, double rank_tol) {
    return {W.w * linalg::range_projector(spec.sigma_s(), rank_tol)};
}

InflationFactor initial_guess(const ChannelSpec& spec, const InnerSamples& samples, const SolverConfig& config) {
    switch (config.init) {
        case SolverConfig::Init::PerfectAtMean: return w_perfect_csit(spec, samples.mean());
        case SolverConfig::Init::Zero: return InflationFactor::zero(spec.dims());
        case SolverConfig::Init::Pinv: return w_pinv(spec, config.rank_tol);
    }
    return InflationFactor::zero(spec.dims());
}

// ---------------------------------------------------------------------------
// Row-wise minimization
//
// With row k moved to the front, M = [[a, B*], [B, D]] where D does not
// depend on w = W_(k). Writing E = [W_rest; H] and c = [0; H t_k],
//   B = E S w* + c,   a = 1 + w S w*,
// so E(a - B* D^{-1} B) = 1 - gamma + w S w* - w S Phi S w* - 2 Re(w S psi)
// with Phi = E(E* D^{-1} E), psi = E(E* D^{-1} c), gamma = E(c* D^{-1} c).

namespace {

struct RowStats {
    Mat phi, psi;
    double gamma = 0.0;
};

Mat drop_row(const Mat& a, int k) {
    Mat out(a.rows() - 1, a.cols());
    for (Eigen::Index i = 0, o = 0; i < a.rows(); ++i)
        if (i != k) out.row(o++) = a.row(i);
    return out;
}

Mat drop_col(const Mat& a, int k) { return drop_row(a.transpose(), k).transpose(); }

RowStats row_statistics(const ChannelSpec& spec, const Mat& W, int k, const InnerSamples& samples) {
    const auto& d = spec.dims();
    const int mr = d.m - 1;
    const Mat& S = spec.sigma_s();
    const Mat w_rest = drop_row(W, k);
    const Mat t_rest = drop_col(spec.T(), k);
    const Mat t_k = spec.T().col(k);
    const Mat top_left = Mat::Identity(mr, mr) + w_rest * S * w_rest.adjoint();
    const Mat cross = t_rest.adjoint() + w_rest * S;

    auto init = [&] { return RowStats{Mat::Zero(d.t, d.t), Mat::Zero(d.t, 1), 0.0}; };
    auto add = [&](RowStats& acc, std::size_t i) {
        const Mat H = samples[i];
        const int n = mr + d.r;
        Mat D(n, n);
        D.topLeftCorner(mr, mr) = top_left;
        Mat upper = cross * H.adjoint();
        D.topRightCorner(mr, d.r) = upper;
        D.bottomLeftCorner(d.r, mr) = upper.adjoint();
        D.bottomRightCorner(d.r, d.r) = H * spec.sigma_xs() * H.adjoint() + spec.sigma_z();

        Mat rhs = Mat::Zero(n, d.t + 1);
        rhs.topLeftCorner(mr, d.t) = w_rest;
        rhs.bottomLeftCorner(d.r, d.t) = H;
        rhs.bottomRightCorner(d.r, 1) = H * t_k;
        Eigen::LLT<Mat> llt(D);
        if (llt.info() != Eigen::Success) throw EvaluationError("row-update block D is not positive definite", i);
        const Mat sol = llt.solve(rhs);
        const auto e = rhs.leftCols(d.t);
        const auto c = rhs.rightCols(1);
        acc.phi += e.adjoint() * sol.leftCols(d.t);
        acc.psi += e.adjoint() * sol.rightCols(1);
        acc.gamma += (c.adjoint() * sol.rightCols(1))(0, 0).real();
    };
    auto merge = [](RowStats& a, const RowStats& b) {
        a.phi += b.phi;
        a.psi += b.psi;
        a.gamma += b.gamma;
    };
    if (samples.empty()) throw std::invalid_argument("row update needs at least one draw");
    RowStats s = ordered_reduce<RowStats>(samples.size(), init, add, merge);
    const double inv = 1.0 / static_cast<double>(samples.size());
    s.phi *= inv;
    s.psi *= inv;
    s.gamma *= inv;
    s.phi = 0.5 * (s.phi + s.phi.adjoint());
    return s;
}

double surrogate_value(const ChannelSpec& spec, const RowStats& s, const Mat& w) {
    const Mat& S = spec.sigma_s();
    const Mat ws = w * S;
    const double quad = (ws * w.adjoint())(0, 0).real() - (ws * s.phi * ws.adjoint())(0, 0).real();
    const double lin = 2.0 * (ws * s.psi)(0, 0).real();
    return 1.0 - s.gamma + quad - lin;
}

}  // namespace

double row_surrogate(const ChannelSpec& spec, const InflationFactor& W, int k, const InnerSamples& samples) {
    if (k < 0 || k >= spec.dims().m) throw std::invalid_argument("row index out of range");
    const RowStats s = row_statistics(spec, W.w, k, samples);
    return surrogate_value(spec, s, W.w.row(k));
}

InflationFactor alg1_row_update(const ChannelSpec& spec, const InflationFactor& W, int k, const InnerSamples& samples,
                                double rank_tol) {
    const auto& d = spec.dims();
    if (k < 0 || k >= d.m) throw std::invalid_argument("row index out of range");
    InflationFactor out = W;
    const Mat t2 = linalg::range_factor(spec.sigma_s(), rank_tol);
    if (t2.cols() == 0) {
        out.w.row(k).setZero();
        return out;
    }
    const RowStats s = row_statistics(spec, W.w, k, samples);
    // Restricted to range(S): v = w T2 minimizes v (I - T2* Phi T2) v* - 2 Re(v T2* psi).
    Mat normal = Mat::Identity(t2.cols(), t2.cols()) - t2.adjoint() * s.phi * t2;
    normal = 0.5 * (normal + normal.adjoint());
    Eigen::LLT<Mat> llt(normal);
    if (llt.info() != Eigen::Success)
        throw SolverError("row " + std::to_string(k) + ": restricted normal matrix is singular");
    const Mat v_adj = llt.solve(t2.adjoint() * s.psi);  // k_s x 1
    // w = v T2^+, the minimum-norm row with w T2 = v.
    const Mat t2_pinv = linalg::pinv(t2, rank_tol);
    out.w.row(k) = v_adj.adjoint() * t2_pinv;
    return out;
}

InflationFactor rank_one_closed_form(const ChannelSpec& spec, const InnerSamples& samples, double epsilon) {
    const auto& d = spec.dims();
    if (d.m != 1) throw std::invalid_argument("rank-one closed form requires m == 1");
    const Mat& S = spec.sigma_s();
    struct Acc {
        Mat k;
    };
    Acc acc = ordered_reduce<Acc>(
        samples.size(), [&] { return Acc{Mat::Zero(d.t, d.t)}; },
        [&](Acc& a, std::size_t i) {
            const Mat H = samples[i];
            Eigen::LLT<Mat> llt(H * spec.sigma_xs() * H.adjoint() + spec.sigma_z());
            a.k += H.adjoint() * llt.solve(H);
        },
        [](Acc& a, const Acc& b) { a.k += b.k; });
    const Mat K = acc.k / static_cast<double>(samples.size());
    const Mat normal = S - S * K * S + epsilon * Mat::Identity(d.t, d.t);
    Eigen::FullPivLU<Mat> lu(normal);
    if (!lu.isInvertible()) throw SolverError("rank-one closed form: S - S K S is singular (use epsilon > 0)");
    return {spec.T().adjoint() * K * S * lu.inverse()};
}

SolveResult alg1_solve(const ChannelSpec& spec, const InflationFactor& W0, const SolverConfig& config,
                       const InnerSamples& samples) {
    config.validate();
    if (!W0.w.allFinite()) throw std::invalid_argument("initial W must be finite");
    SolveResult res;
    InflationFactor W = W0;
    double prev = objective(spec, W.w, samples);
    res.objective_trace.push_back(prev);
    for (int it = 1; it <= config.max_iters; ++it) {
        for (int k = 0; k < spec.dims().m; ++k) W = alg1_row_update(spec, W, k, samples, config.rank_tol);
        const double cur = objective(spec, W.w, samples);
        res.objective_trace.push_back(cur);
        res.iterations = it;
        if (std::abs(cur - prev) <= config.tol * std::max(1.0, std::abs(prev))) {
            res.converged = true;
            break;
        }
        prev = cur;
    }
    res.W = canonicalize(spec, W, config.rank_tol);
    return res;
}

// ---------------------------------------------------------------------------
// Fixed-point iteration

namespace {

struct MapStats {
    Mat a1, a2h;
    double logdet = 0.0;
};

// g(W) and the objective at W from one factorization per draw.
std::pair<InflationFactor, double> map_with_objective(const ChannelSpec& spec, const Mat& W,
                                                      const InnerSamples& samples) {
    const auto& d = spec.dims();
    const BlockMatrix blocks(spec, W);
    if (samples.empty()) throw std::invalid_argument("fixed-point map needs at least one draw");
    auto init = [&] { return MapStats{Mat::Zero(d.m, d.m), Mat::Zero(d.m, d.t), 0.0}; };
    auto add = [&](MapStats& acc, std::size_t i) {
        const Mat H = samples[i];
        const Mat M = blocks(H);
        Eigen::LLT<Mat> llt(M);
        auto ld = linalg::try_logdet_hpd(M);
        if (llt.info() != Eigen::Success || !ld) throw EvaluationError("block matrix M is numerically singular", i);
        const Mat x = llt.solve(Mat::Identity(d.m + d.r, d.m));
        acc.a1 += x.topRows(d.m);
        acc.a2h += x.bottomRows(d.r).adjoint() * H;
        acc.logdet += *ld;
    };
    auto merge = [](MapStats& a, const MapStats& b) {
        a.a1 += b.a1;
        a.a2h += b.a2h;
        a.logdet += b.logdet;
    };
    MapStats s = ordered_reduce<MapStats>(samples.size(), init, add, merge);
    const double inv = 1.0 / static_cast<double>(samples.size());
    Mat a1 = s.a1 * inv;
    a1 = 0.5 * (a1 + a1.adjoint());
    Eigen::FullPivLU<Mat> lu(a1);
    if (!lu.isInvertible()) throw SolverError("E(A1) is numerically singular; try damping or a different seed");
    return {InflationFactor{-lu.solve(s.a2h * inv)}, s.logdet * inv};
}

double relative_residual(const Mat& W, const Mat& g, const Mat& proj) {
    return ((W - g) * proj).norm() / std::max(1.0, (W * proj).norm());
}

}  // namespace

InflationFactor alg2_map(const ChannelSpec& spec, const InflationFactor& W, const InnerSamples& samples) {
    return map_with_objective(spec, W.w, samples).first;
}

double alg2_residual(const ChannelSpec& spec, const InflationFactor& W, const InnerSamples& samples, double rank_tol) {
    const Mat proj = linalg::range_projector(spec.sigma_s(), rank_tol);
    return relative_residual(W.w, alg2_map(spec, W, samples).w, proj);
}

SolveResult alg2_solve(const ChannelSpec& spec, const InflationFactor& W0, const SolverConfig& config,
                       const InnerSamples& samples) {
    config.validate();
    if (!W0.w.allFinite()) throw std::invalid_argument("initial W must be finite");
    SolveResult res;
    if (linalg::numerical_rank(spec.sigma_s(), config.rank_tol) == 0) {
        // (A1 W + A2* H) S = 0 holds for every W.
        res.W = W0;
        res.objective_trace.push_back(objective(spec, W0.w, samples));
        res.converged = true;
        return res;
    }
    const Mat proj = linalg::range_projector(spec.sigma_s(), config.rank_tol);
    double gamma = config.damping;
    Mat W = W0.w;
    Mat best = W;
    double best_obj = std::numeric_limits<double>::infinity();
    double prev = std::numeric_limits<double>::infinity();
    int increases = 0;

    for (int it = 0; it <= config.max_iters; ++it) {
        auto [g, obj] = map_with_objective(spec, W, samples);
        res.objective_trace.push_back(obj);
        res.iterations = it;
        if (obj < best_obj) {
            best_obj = obj;
            best = W;
        }
        if (relative_residual(W, g.w, proj) < config.tol) {
            res.converged = true;
            break;
        }
        if (obj > prev + 1e-13 * std::max(1.0, std::abs(prev))) {
            gamma = std::max(0.5 * gamma, 1.0 / 1024.0);
            if (++increases >= 5) break;
        } else {
            increases = 0;
        }
        prev = obj;
        if (it == config.max_iters) break;
        W = (1.0 - gamma) * W + gamma * g.w;
    }
    res.W = canonicalize(spec, InflationFactor{res.converged ? W : best}, config.rank_tol);
    return res;
}

// ---------------------------------------------------------------------------

InflationPolicy make_policy(SolverKind kind, const ChannelSpec& spec, const SolverConfig& config) {
    switch (kind) {
        case SolverKind::Alg1:
        case SolverKind::Alg2: {
            const bool first = kind == SolverKind::Alg1;
            return InflationPolicy::per_cell([config, first](const ChannelSpec& s, const SampleCell& cell, std::size_t) {
                const InflationFactor W0 = initial_guess(s, cell.draws, config);
                SolveResult r = first ? alg1_solve(s, W0, config, cell.draws) : alg2_solve(s, W0, config, cell.draws);
                return CellSolution{r.W, r.converged};
            });
        }
        case SolverKind::Zero: return InflationPolicy::fixed(InflationFactor::zero(spec.dims()));
        case SolverKind::Pinv: return InflationPolicy::fixed(w_pinv(spec, config.rank_tol));
        case SolverKind::Identity: return InflationPolicy::fixed(identity_embedding(spec));
        case SolverKind::Perfect: return InflationPolicy::genie();
    }
    throw std::invalid_argument("unknown solver kind");
}

}  // namespace fdpc
