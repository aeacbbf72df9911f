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
#include <utility>
#include <vector>

#include "fdpc/inflation.hpp"

namespace fdpc {

struct JointConfig {
    int rank_bound = 0;  ///< m of the optimized factor; 0 keeps the spec's m
    int outer_iters = 30;
    double min_gain_bits = 1e-4;  ///< stop once an outer iteration gains less than this
    std::pair<double, double> lambda_bracket{1e-10, 1e10};
    double power_tol = 1e-6;  ///< relative
    SolverKind solver = SolverKind::Alg1;
    SolverConfig solver_config;

    void validate() const;
};

struct LambdaResult {
    double lambda = 0.0;
    Mat T;  ///< g / lambda with trace(T T*) = P within power_tol
    int iterations = 0;
    /// Set when the trace was not monotone over the bracket and T was rescaled to trace P instead.
    bool rescaled = false;
};

struct JointResult {
    Mat T;  ///< t x m factor of the best iterate
    std::vector<InflationFactor> W;  ///< per outer cell of the bank
    double rate_bits = 0.0;
    double stderr_bits = 0.0;
    std::vector<double> rate_trace;  ///< running best rate after each outer iteration, bits
    std::vector<double> raw_rate_trace;  ///< rate of each iterate, bits
    double eig_ratio = 1.0;  ///< largest / smallest nonzero eigenvalue of T T*
    int rank_used = 0;
    int iterations = 0;
    bool converged = false;
    bool solver_converged = true;
};

/// g(T, W) = E{ H* N^{-1} H T - [0 H*] M^{-1} [I_m; H T] }, N = Z + H (TT* + S) H*,
/// M the block matrix at (T, W). This is the derivative of E log(|N| / |M|) with
/// respect to conj(T), so lambda T = g(T, W) is the stationarity condition.
Mat stationarity_map(const ChannelSpec& spec, const Mat& W, const InnerSamples& samples);

/// (1 / lambda) g(T, W) with T taken from the spec.
Mat t_step_map(const ChannelSpec& spec, const Mat& W, double lambda, const InnerSamples& samples);

/// J = E log(|N| / |M|) - lambda tr(T T*), in nats.
double lagrangian(const ChannelSpec& spec, const Mat& W, double lambda, const InnerSamples& samples);

/// dJ / d conj(T) = g(T, W) - lambda T. For real data the ordinary gradient is twice its real part.
Mat lagrangian_gradient(const ChannelSpec& spec, const Mat& W, double lambda, const InnerSamples& samples);

/// Finds lambda with trace((g / lambda)(g / lambda)*) = P by bisection in log(lambda).
LambdaResult solve_lambda(const ChannelSpec& spec, const Mat& g, const JointConfig& config);

/// T(0) = sqrt(P / m) [I_m; 0].
Mat initial_factor(int t, int m, double P);

/// Alternates a W-step (per cell) and a T-step on one fixed bank, returning the best iterate.
JointResult joint_optimize(const ChannelSpec& spec, const JointConfig& config, const SampleBank& bank);

/// Rate of a fixed T with W solved per cell on the bank (the scaled-identity baseline uses T = sqrt(P/t) I).
RateEstimate rate_with_solved_w(const ChannelSpec& spec, SolverKind solver, const SolverConfig& config,
                                const SampleBank& bank);

}  // namespace fdpc
