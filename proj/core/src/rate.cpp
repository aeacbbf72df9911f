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

#include "fdpc/rate.hpp"

#include <cmath>
#include <numeric>

#include "fdpc/errors.hpp"
#include "fdpc/inflation.hpp"
#include "fdpc/parallel.hpp"

namespace fdpc {

double RateTerms::mean() const {
    if (units.empty()) return 0.0;
    double acc = 0.0;
    for (double u : units) acc += u;
    return acc / static_cast<double>(units.size());
}

double RateTerms::standard_error() const {
    const std::size_t n = units.size();
    if (n < 2) return 0.0;
    const double mu = mean();
    double ss = 0.0;
    for (double u : units) ss += (u - mu) * (u - mu);
    return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

InflationPolicy InflationPolicy::fixed(InflationFactor W) {
    InflationPolicy p;
    p.kind_ = Kind::Fixed;
    p.fixed_ = std::move(W);
    return p;
}

InflationPolicy InflationPolicy::per_cell(CellSolver solver) {
    InflationPolicy p;
    p.kind_ = Kind::PerCell;
    p.solver_ = std::move(solver);
    return p;
}

InflationPolicy InflationPolicy::genie() {
    InflationPolicy p;
    p.kind_ = Kind::Genie;
    return p;
}

// ---------------------------------------------------------------------------

BlockMatrix::BlockMatrix(const ChannelSpec& spec, const Mat& W) : spec_(&spec) {
    const auto& d = spec.dims();
    if (W.rows() != d.m || W.cols() != d.t) throw std::invalid_argument("inflation factor must be m x t");
    const Mat ws = W * spec.sigma_s();
    top_left_ = Mat::Identity(d.m, d.m) + ws * W.adjoint();
    cross_ = spec.T().adjoint() + ws;
}

Mat BlockMatrix::received(const Mat& H) const {
    return H * spec_->sigma_xs() * H.adjoint() + spec_->sigma_z();
}

Mat BlockMatrix::operator()(const Mat& H) const {
    const Eigen::Index m = top_left_.rows();
    const Eigen::Index r = H.rows();
    Mat M(m + r, m + r);
    M.topLeftCorner(m, m) = top_left_;
    Mat upper = cross_ * H.adjoint();
    M.topRightCorner(m, r) = upper;
    M.bottomLeftCorner(r, m) = upper.adjoint();
    M.bottomRightCorner(r, r) = received(H);
    return M;
}

Mat build_M(const ChannelSpec& spec, const Mat& W, const Mat& H) { return BlockMatrix(spec, W)(H); }

double logdet_M(const ChannelSpec&, const BlockMatrix& blocks, const Mat& H, std::size_t sample_index) {
    auto ld = linalg::try_logdet_hpd(blocks(H));
    if (!ld) throw EvaluationError("block matrix M is numerically singular", sample_index);
    return *ld;
}

Mat residual_covariance(const ChannelSpec& spec, const Mat& W) {
    const BlockMatrix blocks(spec, W);
    const Mat& c = blocks.cross();  // T* + W S
    Eigen::LLT<Mat> llt(blocks.top_left());
    Mat a = spec.sigma_xs() - c.adjoint() * llt.solve(c);
    return 0.5 * (a + a.adjoint());
}

Mat residual_covariance_pd(const ChannelSpec& spec, const Mat& W_pd) {
    const Mat& X = spec.sigma_x();
    const Mat& S = spec.sigma_s();
    Mat inner = X + W_pd * S * W_pd.adjoint();
    Mat cross = X + W_pd * S;
    Eigen::LLT<Mat> llt(inner);
    if (llt.info() != Eigen::Success) throw EvaluationError("Sigma_X + W S W* is not positive definite", 0);
    Mat a = X + S - cross.adjoint() * llt.solve(cross);
    return 0.5 * (a + a.adjoint());
}

double logdet_M_schur(const ChannelSpec& spec, const Mat& W, const Mat& H) {
    const BlockMatrix blocks(spec, W);
    auto top = linalg::try_logdet_hpd(blocks.top_left());
    auto rest = linalg::try_logdet_hpd(spec.sigma_z() + H * residual_covariance(spec, W) * H.adjoint());
    if (!top || !rest) throw EvaluationError("Schur factor is numerically singular", 0);
    return *top + *rest;
}

namespace {

struct Sum {
    double value = 0.0;
};

double mean_over(std::size_t n, const std::function<double(std::size_t)>& term) {
    if (n == 0) throw std::invalid_argument("expectation over an empty sample list");
    Sum s = ordered_reduce<Sum>(
        n, [] { return Sum{}; }, [&](Sum& acc, std::size_t i) { acc.value += term(i); },
        [](Sum& a, const Sum& b) { a.value += b.value; });
    return s.value / static_cast<double>(n);
}

double logdet_received(const ChannelSpec& spec, const Mat& H, std::size_t index) {
    auto ld = linalg::try_logdet_hpd(H * spec.sigma_xs() * H.adjoint() + spec.sigma_z());
    if (!ld) throw EvaluationError("received covariance is numerically singular", index);
    return *ld;
}

// Per-draw rate contributions (nats) for a fixed W.
double draw_rate(const ChannelSpec& spec, const BlockMatrix& blocks, const Mat& H, std::size_t index) {
    return logdet_received(spec, H, index) - logdet_M(spec, blocks, H, index);
}

double draw_bound(const ChannelSpec& spec, const Mat& H, std::size_t index) {
    auto ld = linalg::try_logdet_hpd(H * spec.sigma_x() * H.adjoint() + spec.sigma_z());
    if (!ld) throw EvaluationError("Z + H X H* is numerically singular", index);
    return *ld - spec.logdet_sigma_z();
}

}  // namespace

double objective(const ChannelSpec& spec, const Mat& W, const InnerSamples& samples) {
    const BlockMatrix blocks(spec, W);
    return mean_over(samples.size(), [&](std::size_t i) { return logdet_M(spec, blocks, samples[i], i); });
}

double mean_logdet_received(const ChannelSpec& spec, const InnerSamples& samples) {
    return mean_over(samples.size(), [&](std::size_t i) { return logdet_received(spec, samples[i], i); });
}

RateTerms achievable_rate_terms(const ChannelSpec& spec, const InflationPolicy& policy, const SampleBank& bank) {
    const auto& cells = bank.cells();
    if (cells.empty()) throw std::invalid_argument("empty sample bank");
    const bool perfect = bank.csit().kind() == CsitModel::Kind::Perfect;

    // Chooses W for one cell; genie handled separately.
    auto cell_w = [&](const SampleCell& cell, std::size_t c, bool& converged) -> Mat {
        converged = true;
        if (policy.kind() == InflationPolicy::Kind::Fixed) return policy.fixed_w().w;
        if (perfect) return w_perfect_csit(spec, cell.h_hat).w;
        CellSolution sol = policy.solver()(spec, cell, c);
        converged = sol.converged;
        return sol.W.w;
    };

    RateTerms terms;
    if (cells.size() == 1) {
        const SampleCell& cell = cells.front();
        const std::size_t n = cell.draws.size();
        terms.units.resize(n);
        if (policy.kind() == InflationPolicy::Kind::Genie) {
            parallel_for(n, [&](std::size_t i) {
                const Mat H = cell.draws[i];
                const BlockMatrix blocks(spec, w_perfect_csit(spec, H).w);
                terms.units[i] = draw_rate(spec, blocks, H, i) / kLn2;
            });
        } else {
            bool converged = true;
            const BlockMatrix blocks(spec, cell_w(cell, 0, converged));
            terms.solver_converged = converged;
            terms.unconverged_cells = converged ? 0 : 1;
            parallel_for(n, [&](std::size_t i) { terms.units[i] = draw_rate(spec, blocks, cell.draws[i], i) / kLn2; });
        }
        return terms;
    }

    terms.units.resize(cells.size());
    std::vector<char> ok(cells.size(), 1);
    parallel_for(cells.size(), [&](std::size_t c) {
        const SampleCell& cell = cells[c];
        const std::size_t n = cell.draws.size();
        double acc = 0.0;
        if (policy.kind() == InflationPolicy::Kind::Genie) {
            for (std::size_t i = 0; i < n; ++i) {
                const Mat H = cell.draws[i];
                acc += draw_rate(spec, BlockMatrix(spec, w_perfect_csit(spec, H).w), H, i);
            }
        } else {
            bool converged = true;
            const BlockMatrix blocks(spec, cell_w(cell, c, converged));
            ok[c] = converged;
            for (std::size_t i = 0; i < n; ++i) acc += draw_rate(spec, blocks, cell.draws[i], i);
        }
        terms.units[c] = acc / static_cast<double>(n) / kLn2;
    });
    for (char c : ok)
        if (!c) ++terms.unconverged_cells;
    terms.solver_converged = terms.unconverged_cells == 0;
    return terms;
}

RateTerms bound_terms(const ChannelSpec& spec, const SampleBank& bank) {
    const auto& cells = bank.cells();
    if (cells.empty()) throw std::invalid_argument("empty sample bank");
    RateTerms terms;
    if (cells.size() == 1) {
        const auto& draws = cells.front().draws;
        terms.units.resize(draws.size());
        parallel_for(draws.size(), [&](std::size_t i) { terms.units[i] = draw_bound(spec, draws[i], i) / kLn2; });
        return terms;
    }
    terms.units.resize(cells.size());
    parallel_for(cells.size(), [&](std::size_t c) {
        const auto& draws = cells[c].draws;
        double acc = 0.0;
        for (std::size_t i = 0; i < draws.size(); ++i) acc += draw_bound(spec, draws[i], i);
        terms.units[c] = acc / static_cast<double>(draws.size()) / kLn2;
    });
    return terms;
}

RateEstimate summarize(const RateTerms& terms, const SampleBank& bank) {
    RateEstimate e;
    e.rate_bits = terms.mean();
    e.stderr_bits = terms.standard_error();
    e.n_outer = bank.n_outer();
    e.n_inner = bank.n_inner();
    e.seed = bank.seed();
    e.solver_converged = terms.solver_converged;
    e.unconverged_cells = terms.unconverged_cells;
    return e;
}

RateEstimate achievable_rate(const ChannelSpec& spec, const InflationPolicy& policy, const SampleBank& bank) {
    return summarize(achievable_rate_terms(spec, policy, bank), bank);
}

RateEstimate no_interference_bound(const ChannelSpec& spec, const SampleBank& bank) {
    return summarize(bound_terms(spec, bank), bank);
}

RateEstimate achievable_rate_pd(const ChannelSpec& spec, const Mat& W_pd, const SampleBank& bank) {
    const auto& d = spec.dims();
    if (d.m != d.t) throw std::invalid_argument("unfactored auxiliary requires m == t");
    if (W_pd.rows() != d.t || W_pd.cols() != d.t) throw std::invalid_argument("W must be t x t");
    const Mat& X = spec.sigma_x();
    auto ld_x = linalg::try_logdet_hpd(X);
    auto ld_inner = linalg::try_logdet_hpd(X + W_pd * spec.sigma_s() * W_pd.adjoint());
    if (!ld_x || !ld_inner) throw EvaluationError("Sigma_X must be positive definite", 0);
    const Mat A = residual_covariance_pd(spec, W_pd);
    const double constant = *ld_x - *ld_inner;

    auto draw = [&](const Mat& H, std::size_t i) {
        auto rest = linalg::try_logdet_hpd(spec.sigma_z() + H * A * H.adjoint());
        if (!rest) throw EvaluationError("Z + H A H* is numerically singular", i);
        return (constant + logdet_received(spec, H, i) - *rest) / kLn2;
    };

    RateTerms terms;
    const auto& cells = bank.cells();
    if (cells.size() == 1) {
        const auto& draws = cells.front().draws;
        terms.units.resize(draws.size());
        parallel_for(draws.size(), [&](std::size_t i) { terms.units[i] = draw(draws[i], i); });
    } else {
        terms.units.resize(cells.size());
        parallel_for(cells.size(), [&](std::size_t c) {
            const auto& draws = cells[c].draws;
            double acc = 0.0;
            for (std::size_t i = 0; i < draws.size(); ++i) acc += draw(draws[i], i);
            terms.units[c] = acc / static_cast<double>(draws.size());
        });
    }
    return summarize(terms, bank);
}

}  // namespace fdpc
