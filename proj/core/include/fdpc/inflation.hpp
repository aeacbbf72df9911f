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

#include <string>
#include <string_view>
#include <vector>

#include "fdpc/rate.hpp"

namespace fdpc {

struct SolverConfig {
    enum class Init { PerfectAtMean, Zero, Pinv };

    int max_iters = 200;
    double tol = 1e-7;       ///< relative change threshold
    double damping = 1.0;    ///< initial step of the fixed-point iteration, in (0, 1]
    double rank_tol = 1e-10; ///< relative singular-value cutoff
    Init init = Init::PerfectAtMean;

    void validate() const;
};

struct SolveResult {
    InflationFactor W;
    std::vector<double> objective_trace;  ///< nats; initial value first
    bool converged = false;
    int iterations = 0;
};

enum class SolverKind { Alg1, Alg2, Zero, Pinv, Identity, Perfect };

SolverKind parse_solver_kind(std::string_view name);
std::string to_string(SolverKind kind);

// ---------------------------------------------------------------------------
// Closed forms

/// Perfect-CSIT optimum T* H* (H T T* H* + Z)^{-1} H.
InflationFactor w_perfect_csit(const ChannelSpec& spec, const Mat& H);

/// Moore-Penrose pseudo-inverse of T; attains the best high-SNR scaling without CSIT.
InflationFactor w_pinv(const ChannelSpec& spec, double rank_tol = 1e-10);

/// Identity choice in signal space: for m == t this is T^{-1} (the unfactored
/// W = I_t); otherwise the m x t embedding [I_m 0].
InflationFactor identity_embedding(const ChannelSpec& spec);

/// High-SNR optimum for p.d. Sigma_X and t > r, expressed for the unfactored
/// auxiliary U = X + W S: the t x t identity. Requires m == t.
Mat w_high_snr_pd(const ChannelSpec& spec);

/// Maps an unfactored W (U = X + W S) to the factored one (U = X' + W S): T^{-1} W.
InflationFactor from_unfactored(const ChannelSpec& spec, const Mat& W_pd);

/// Largest DPC-achievable high-SNR scaling without CSIT:
/// min(r, rank_sum) - min(r, rank_sum - m), with rank_sum = rank(Sigma_X + Sigma_S).
int theoretical_scaling(int rank_sum, int m, int r);

/// Scaling available with p.d. Sigma_X: min(t, r).
int pd_scaling(int t, int r);

// ---------------------------------------------------------------------------
// Iterative solvers

/// W is unique only modulo rows in null(Sigma_S); project rows onto its range.
InflationFactor canonicalize(const ChannelSpec& spec, const InflationFactor& W, double rank_tol = 1e-10);

InflationFactor initial_guess(const ChannelSpec& spec, const InnerSamples& samples, const SolverConfig& config);

/// Jensen surrogate E(a - B* D^{-1} B) of the row-k Schur factor of M, at the current W.
double row_surrogate(const ChannelSpec& spec, const InflationFactor& W, int k, const InnerSamples& samples);

/// Replaces row k (0-based) of W by the exact minimizer of the row surrogate.
/// Singular Sigma_S is handled on its range through Sigma_S = T2 T2*.
InflationFactor alg1_row_update(const ChannelSpec& spec, const InflationFactor& W, int k,
                                const InnerSamples& samples, double rank_tol = 1e-10);

/// Direct rank-one (m = 1) formula
///   W = T* K S (S - S K S + eps I)^{-1},  K = E[H* (H (TT* + S) H* + Z)^{-1} H].
/// eps = 0 requires p.d. Sigma_S.
InflationFactor rank_one_closed_form(const ChannelSpec& spec, const InnerSamples& samples, double epsilon = 0.0);

/// Row-wise minimization, sweeping rows until the objective stalls.
SolveResult alg1_solve(const ChannelSpec& spec, const InflationFactor& W0, const SolverConfig& config,
                       const InnerSamples& samples);

/// Stationarity map g(W) = -(E A1)^{-1} E(A2* H), [A1; A2] = M^{-1} [I_m; 0].
InflationFactor alg2_map(const ChannelSpec& spec, const InflationFactor& W, const InnerSamples& samples);

/// || (W - g(W)) P_S ||_F / max(1, || W P_S ||_F), with P_S the projector onto range(Sigma_S).
double alg2_residual(const ChannelSpec& spec, const InflationFactor& W, const InnerSamples& samples,
                     double rank_tol = 1e-10);

/// Damped fixed-point iteration W <- (1 - gamma) W + gamma g(W); gamma halves
/// whenever the objective increases.
SolveResult alg2_solve(const ChannelSpec& spec, const InflationFactor& W0, const SolverConfig& config,
                       const InnerSamples& samples);

/// Rate policy for a named choice. alg1/alg2 solve per outer cell from
/// initial_guess; zero/pinv/identity are fixed; perfect is the per-draw genie.
InflationPolicy make_policy(SolverKind kind, const ChannelSpec& spec, const SolverConfig& config = {});

}  // namespace fdpc
