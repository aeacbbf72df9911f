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

#include "fdpc/covopt.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "fdpc/errors.hpp"
#include "fdpc/parallel.hpp"

namespace fdpc {

void JointConfig::validate() const {
    if (rank_bound < 0) throw std::invalid_argument("rank_bound must be nonnegative");
    if (outer_iters < 1) throw std::invalid_argument("outer_iters must be at least 1");
    if (!(lambda_bracket.first > 0.0 && lambda_bracket.second > lambda_bracket.first))
        throw std::invalid_argument("lambda bracket must satisfy 0 < lo < hi");
    if (!(power_tol > 0.0 && power_tol < 1.0)) throw std::invalid_argument("power_tol must be in (0, 1)");
    if (!(min_gain_bits >= 0.0)) throw std::invalid_argument("min_gain_bits must be nonnegative");
    solver_config.validate();
}

namespace {

struct GradStats {
    Mat g;
    double value = 0.0;
};

GradStats gradient_stats(const ChannelSpec& spec, const Mat& W, const InnerSamples& samples, bool want_grad) {
    const auto& d = spec.dims();
    const Mat& T = spec.T();
    const BlockMatrix blocks(spec, W);
    if (samples.empty()) throw std::invalid_argument("need at least one draw");
    auto init = [&] { return GradStats{Mat::Zero(d.t, d.m), 0.0}; };
    auto add = [&](GradStats& acc, std::size_t i) {
        const Mat H = samples[i];
        const Mat M = blocks(H);
        const Mat N = M.bottomRightCorner(d.r, d.r);
        Eigen::LLT<Mat> lm(M), ln(N);
        auto ldm = linalg::try_logdet_hpd(M);
        auto ldn = linalg::try_logdet_hpd(N);
        if (lm.info() != Eigen::Success || !ldm || !ldn) throw EvaluationError("block matrix M is numerically singular", i);
        acc.value += *ldn - *ldm;
        if (!want_grad) return;
        const Mat ht = H * T;
        Mat rhs(d.m + d.r, d.m);
        rhs.topRows(d.m) = Mat::Identity(d.m, d.m);
        rhs.bottomRows(d.r) = ht;
        const Mat x = lm.solve(rhs);
        acc.g += H.adjoint() * ln.solve(ht) - H.adjoint() * x.bottomRows(d.r);
    };
    auto merge = [](GradStats& a, const GradStats& b) {
        a.g += b.g;
        a.value += b.value;
    };
    GradStats s = ordered_reduce<GradStats>(samples.size(), init, add, merge);
    const double inv = 1.0 / static_cast<double>(samples.size());
    s.g *= inv;
    s.value *= inv;
    return s;
}

double trace_power(const Mat& T) { return T.squaredNorm(); }

}  // namespace

Mat stationarity_map(const ChannelSpec& spec, const Mat& W, const InnerSamples& samples) {
    return gradient_stats(spec, W, samples, true).g;
}

Mat t_step_map(const ChannelSpec& spec, const Mat& W, double lambda, const InnerSamples& samples) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    return stationarity_map(spec, W, samples) / lambda;
}

double lagrangian(const ChannelSpec& spec, const Mat& W, double lambda, const InnerSamples& samples) {
    return gradient_stats(spec, W, samples, false).value - lambda * trace_power(spec.T());
}

Mat lagrangian_gradient(const ChannelSpec& spec, const Mat& W, double lambda, const InnerSamples& samples) {
    return stationarity_map(spec, W, samples) - lambda * spec.T();
}

LambdaResult solve_lambda(const ChannelSpec& spec, const Mat& g, const JointConfig& config) {
    config.validate();
    const double P = spec.P();
    if (!(P > 0.0)) throw SearchError("power budget is zero");
    auto power = [&](double lambda) { return trace_power(g) / (lambda * lambda); };
    double lo = std::log(config.lambda_bracket.first), hi = std::log(config.lambda_bracket.second);

    LambdaResult res;
    // Probe monotonicity at 8 points across the bracket.
    bool monotone = true;
    double last = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 8; ++k) {
        const double p = power(std::exp(lo + (hi - lo) * k / 7.0));
        if (!std::isfinite(p) || p > last) monotone = false;
        last = p;
    }
    if (!monotone) {
        std::cerr << "warning: power is not monotone in lambda; rescaling T to trace P\n";
        const double norm = std::sqrt(trace_power(g));
        if (!(norm > 0.0)) throw SearchError("stationarity map vanished; no lambda meets the power constraint");
        res.lambda = norm / std::sqrt(P);
        res.T = g * (std::sqrt(P) / norm);
        res.rescaled = true;
        return res;
    }
    if (!(power(std::exp(lo)) >= P && power(std::exp(hi)) <= P))
        throw SearchError("lambda bracket does not contain a root of the power constraint");
    for (int it = 1; it <= 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double p = power(std::exp(mid));
        res.iterations = it;
        res.lambda = std::exp(mid);
        // Accept only from below so the spec's trace(T T*) <= P check holds exactly.
        if (p <= P && p >= (1.0 - config.power_tol) * P) break;
        (p > P ? lo : hi) = mid;
    }
    res.T = g / res.lambda;
    return res;
}

Mat initial_factor(int t, int m, double P) {
    if (m < 1 || m > t) throw std::invalid_argument("initial factor needs 1 <= m <= t");
    return std::sqrt(P / m) * Mat::Identity(t, m);
}

namespace {

struct WStep {
    std::vector<InflationFactor> W;
    bool converged = true;
};

WStep solve_w(const ChannelSpec& spec, const SampleBank& bank, const JointConfig& config,
              const std::vector<InflationFactor>* warm) {
    const auto& cells = bank.cells();
    WStep out;
    out.W.resize(cells.size());
    std::vector<char> ok(cells.size(), 1);
    const bool perfect = bank.csit().kind() == CsitModel::Kind::Perfect;
    parallel_for(cells.size(), [&](std::size_t c) {
        if (perfect) {
            out.W[c] = w_perfect_csit(spec, cells[c].h_hat);
            return;
        }
        InflationFactor W0 = warm ? (*warm)[c] : initial_guess(spec, cells[c].draws, config.solver_config);
        switch (config.solver) {
            case SolverKind::Alg1:
            case SolverKind::Alg2: {
                SolveResult r = config.solver == SolverKind::Alg1
                                    ? alg1_solve(spec, W0, config.solver_config, cells[c].draws)
                                    : alg2_solve(spec, W0, config.solver_config, cells[c].draws);
                out.W[c] = r.W;
                ok[c] = r.converged;
                break;
            }
            default: {
                InflationPolicy p = make_policy(config.solver, spec, config.solver_config);
                out.W[c] = p.kind() == InflationPolicy::Kind::Fixed ? p.fixed_w() : W0;
            }
        }
    });
    for (char v : ok) out.converged = out.converged && v;
    return out;
}

InflationPolicy stored_policy(const std::vector<InflationFactor>& W) {
    return InflationPolicy::per_cell(
        [W](const ChannelSpec&, const SampleCell&, std::size_t c) { return CellSolution{W[c], true}; });
}

// Per-cell g averaged over cells.
Mat bank_stationarity(const ChannelSpec& spec, const SampleBank& bank, const std::vector<InflationFactor>& W) {
    const auto& cells = bank.cells();
    std::vector<Mat> parts(cells.size());
    parallel_for(cells.size(), [&](std::size_t c) { parts[c] = stationarity_map(spec, W[c].w, cells[c].draws); });
    Mat g = Mat::Zero(spec.dims().t, spec.dims().m);
    for (const auto& p : parts) g += p;
    return g / static_cast<double>(cells.size());
}

}  // namespace

RateEstimate rate_with_solved_w(const ChannelSpec& spec, SolverKind solver, const SolverConfig& config,
                                const SampleBank& bank) {
    return achievable_rate(spec, make_policy(solver, spec, config), bank);
}

JointResult joint_optimize(const ChannelSpec& spec_in, const JointConfig& config, const SampleBank& bank) {
    config.validate();
    const auto& d = spec_in.dims();
    const int m = config.rank_bound == 0 ? d.m : config.rank_bound;
    if (m > d.t) throw std::invalid_argument("rank bound exceeds transmit antennas");
    if (bank.cells().empty()) throw std::invalid_argument("empty sample bank");

    ChannelSpec spec = spec_in.with_factor(initial_factor(d.t, m, spec_in.P()));
    JointResult res;
    double best = -std::numeric_limits<double>::infinity();
    double prev = -std::numeric_limits<double>::infinity();
    std::vector<InflationFactor> warm;

    for (int it = 1; it <= config.outer_iters; ++it) {
        WStep ws = solve_w(spec, bank, config, warm.empty() ? nullptr : &warm);
        warm = ws.W;
        const RateEstimate r = achievable_rate(spec, stored_policy(ws.W), bank);
        res.raw_rate_trace.push_back(r.rate_bits);
        res.iterations = it;
        if (r.rate_bits > best) {
            best = r.rate_bits;
            res.T = spec.T();
            res.W = ws.W;
            res.rate_bits = r.rate_bits;
            res.stderr_bits = r.stderr_bits;
            res.solver_converged = ws.converged;
        }
        res.rate_trace.push_back(best);
        if (r.rate_bits - prev < config.min_gain_bits) {
            res.converged = true;
            break;
        }
        prev = r.rate_bits;
        if (it == config.outer_iters) break;

        const Mat g = bank_stationarity(spec, bank, ws.W);
        spec = spec.with_factor(solve_lambda(spec, g, config).T);
    }

    const Mat sx = res.T * res.T.adjoint();
    const RVec ev = linalg::hermitian_eigenvalues(sx);
    const double top = ev.maxCoeff();
    res.rank_used = linalg::numerical_rank(sx, 1e-9);
    double smallest = top;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev[i] > 1e-9 * top) smallest = std::min(smallest, ev[i]);
    res.eig_ratio = top > 0.0 ? top / smallest : 1.0;
    return res;
}

}  // namespace fdpc
