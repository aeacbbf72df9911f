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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "fdpc/model.hpp"

namespace fdpc {

/// m x t inflation factor W of the auxiliary variable U = X' + W S, where X = T X'.
struct InflationFactor {
    Mat w;

    static InflationFactor zero(const Dimensions& d) { return {Mat::Zero(d.m, d.t)}; }
};

struct RateEstimate {
    double rate_bits = 0.0;
    double stderr_bits = 0.0;
    std::size_t n_outer = 0;
    std::size_t n_inner = 0;
    std::uint64_t seed = 0;
    /// False when at least one per-cell solver run stopped without converging;
    /// the best W it found was still used.
    bool solver_converged = true;
    std::size_t unconverged_cells = 0;
};

/// Rate contributions per statistical unit, in bits: one per outer cell when
/// the bank has several cells, one per inner draw when it has a single cell.
/// The rate is the plain mean of the units; the standard error is their
/// sample standard deviation over sqrt(#units).
struct RateTerms {
    std::vector<double> units;
    bool solver_converged = true;
    std::size_t unconverged_cells = 0;

    double mean() const;
    double standard_error() const;
};

struct CellSolution {
    InflationFactor W;
    bool converged = true;
};

using CellSolver = std::function<CellSolution(const ChannelSpec&, const SampleCell&, std::size_t cell_index)>;

/// How the inflation factor is chosen for each outer cell of a bank.
class InflationPolicy {
public:
    enum class Kind { Fixed, PerCell, Genie };

    /// The same W for every cell.
    static InflationPolicy fixed(InflationFactor W);
    /// W solved from each cell's draws (per H-hat). Under perfect CSIT the
    /// closed-form optimum is used instead.
    static InflationPolicy per_cell(CellSolver solver);
    /// Closed-form perfect-CSIT W for every individual draw (a genie reference).
    static InflationPolicy genie();

    Kind kind() const { return kind_; }
    const InflationFactor& fixed_w() const { return fixed_; }
    const CellSolver& solver() const { return solver_; }

private:
    Kind kind_ = Kind::Fixed;
    InflationFactor fixed_;
    CellSolver solver_;
};

/// Blocks of the (m + r) x (m + r) matrix
///   [[I_m + W S W*, (T* + W S) H*], [H (T + S W*), H (T T* + S) H* + Z]]
/// that depend only on W, so per-draw assembly is two small products.
class BlockMatrix {
public:
    BlockMatrix(const ChannelSpec& spec, const Mat& W);

    Mat operator()(const Mat& H) const;
    /// H (T T* + S) H* + Z
    Mat received(const Mat& H) const;

    const Mat& top_left() const { return top_left_; }
    const Mat& cross() const { return cross_; }  ///< T* + W S

private:
    const ChannelSpec* spec_;
    Mat top_left_, cross_;
};

Mat build_M(const ChannelSpec& spec, const Mat& W, const Mat& H);

/// log det M in nats; throws EvaluationError(sample_index) when M is numerically singular.
double logdet_M(const ChannelSpec& spec, const BlockMatrix& blocks, const Mat& H, std::size_t sample_index = 0);

/// The same quantity through the Schur complement of the top-left block:
/// log det(I + W S W*) + log det(Z + H A H*).
double logdet_M_schur(const ChannelSpec& spec, const Mat& W, const Mat& H);

/// A = T T* + S - (T + S W*)(I + W S W*)^{-1}(T* + W S), the interference
/// residual seen by the receiver after decoding U. P.s.d. for every W.
Mat residual_covariance(const ChannelSpec& spec, const Mat& W);

/// The same residual for the unfactored auxiliary U = X + W S (p.d. Sigma_X, W is t x t):
/// A = X + S - (X + S W*)(X + W S W*)^{-1}(X + W S).
Mat residual_covariance_pd(const ChannelSpec& spec, const Mat& W_pd);

/// Sample mean of log det M over the draws, in nats.
double objective(const ChannelSpec& spec, const Mat& W, const InnerSamples& samples);

/// Sample mean of log det(H (T T* + S) H* + Z), in nats.
double mean_logdet_received(const ChannelSpec& spec, const InnerSamples& samples);

RateTerms achievable_rate_terms(const ChannelSpec& spec, const InflationPolicy& policy, const SampleBank& bank);
RateTerms bound_terms(const ChannelSpec& spec, const SampleBank& bank);
RateEstimate summarize(const RateTerms& terms, const SampleBank& bank);

/// DPC-achievable rate in bits: mean over cells of
/// E log det(H (TT* + S) H* + Z) - E log det M(W_cell).
RateEstimate achievable_rate(const ChannelSpec& spec, const InflationPolicy& policy, const SampleBank& bank);

/// C = E log det(Z + H X H*) / det Z in bits, on the same draws.
RateEstimate no_interference_bound(const ChannelSpec& spec, const SampleBank& bank);

/// Rate for a fixed W of the unfactored auxiliary U = X + W S (requires m = t
/// and invertible T), evaluated through
///   log |X| |Z + H(X+S)H*| - log |X + W S W*| |Z + H A H*|.
RateEstimate achievable_rate_pd(const ChannelSpec& spec, const Mat& W_pd, const SampleBank& bank);

inline constexpr double kLn2 = 0.69314718055994530942;

}  // namespace fdpc
