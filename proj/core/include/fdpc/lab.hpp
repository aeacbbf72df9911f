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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fdpc/config.hpp"
#include "fdpc/inflation.hpp"

namespace fdpc {

// ---------------------------------------------------------------------------
// Reference configurations

std::vector<std::string> reference_names();
/// Throws ConfigError for unknown names.
ExperimentConfig reference_config(std::string_view name);

/// "none", "perfect" or "B=<bits>" (designed step for the fading law).
CsitModel parse_csit_label(std::string_view label, const FadingModel& fading);

/// rank(T T* + Sigma_S) at the given relative tolerance.
int rank_sum(const ChannelSpec& spec, double rank_tol = 1e-10);

/// Bank for a config at a given CSIT model and seed, using the config's sample counts.
SampleBank make_bank(const ExperimentConfig& config, const ChannelSpec& spec, const CsitModel& csit,
                     std::uint64_t seed);

// ---------------------------------------------------------------------------
// Sweeps

struct SweepPlan {
    std::vector<double> snr_db_list;
    double q_over_p = 1.0;
    std::vector<SolverKind> solvers;
    std::vector<std::string> csit;  ///< labels as accepted by parse_csit_label
    bool include_bound = true;

    void validate() const;
};

struct SweepRow {
    double snr_db = 0.0;
    std::string csit;
    std::string solver;
    double rate_bits = 0.0;
    double stderr_bits = 0.0;
    double bound_bits = 0.0;
    std::size_t n_outer = 0;
    std::size_t n_inner = 0;
    std::uint64_t seed = 0;
    bool converged = true;
    std::string error;  ///< nonempty for a failed cell; numeric fields are then NaN

    bool ok() const { return error.empty(); }
};

/// Rows in plan order (snr, then csit, then solver). All solvers at one
/// (snr, csit) share a bank; failures become error rows.
std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const SweepPlan& plan, std::uint64_t seed,
                                const SolverConfig& solver_config = {});

inline constexpr const char* kSweepHeader = "snr_db,csit,solver,rate_bits,stderr_bits,bound_bits,n_outer,n_inner,seed";

/// printf("%.6g") formatting used by every CSV writer.
std::string format_g6(double v);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// ---------------------------------------------------------------------------
// Asymptotics

struct ScalingResult {
    double slope = 0.0;
    double slope_stderr = 0.0;  ///< from paired per-unit differences
    double rate_lo_bits = 0.0, rate_hi_bits = 0.0;
    double bound_slope = 0.0;
    int predicted = 0;  ///< theoretical_scaling(rank_sum, m, r)
    int rank_sum = 0;
};

/// Secant slope (R(hi) - R(lo)) / (log2 P_hi - log2 P_lo) on common random numbers; hi > lo >= 30 dB.
ScalingResult estimate_scaling(const ExperimentConfig& base, SolverKind w_choice, double snr_lo_db, double snr_hi_db,
                               std::uint64_t seed, const SolverConfig& solver_config = {});

struct LowSnrPoint {
    double snr_db = 0.0;
    double ratio = 0.0;   ///< R(W = 0) / C
    double stderr = 0.0;  ///< delta method on paired units
};

std::vector<LowSnrPoint> low_snr_ratio(const ExperimentConfig& base, const std::vector<double>& snr_db_list,
                                       std::uint64_t seed);

void write_lowsnr_csv(std::ostream& out, const std::vector<LowSnrPoint>& points);

struct GapResult {
    double gap_bits = 0.0;  ///< C - R
    double stderr_bits = 0.0;
    double rate_bits = 0.0, bound_bits = 0.0;
};

GapResult gap_to_bound(const ExperimentConfig& base, double snr_db, SolverKind solver, std::uint64_t seed,
                       const SolverConfig& solver_config = {});

struct SolverComparison {
    double snr_db = 0.0;
    double alg1_bits = 0.0, alg2_bits = 0.0;
    double diff_bits = 0.0;  ///< alg1 - alg2
    double diff_stderr = 0.0;
};

std::vector<SolverComparison> compare_solvers(const ExperimentConfig& base, const std::vector<double>& snr_db_list,
                                              std::uint64_t seed, const SolverConfig& solver_config = {});

/// Standard error of the mean of a - b for paired units.
double paired_stderr(const RateTerms& a, const RateTerms& b);

}  // namespace fdpc
