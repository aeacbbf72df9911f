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

#include "fdpc/lab.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>

#include "fdpc/errors.hpp"
#include "fdpc/parallel.hpp"

namespace fdpc {

namespace {

// Kept byte-identical to configs/<name>.json.
const std::map<std::string, std::string, std::less<>>& registry() {
    static const std::map<std::string, std::string, std::less<>> r = {
        {"fdpc-2x2-a", R"({
  "name": "fdpc-2x2-a",
  "t": 2, "r": 2, "m": 1,
  "snr_db": 10, "q_over_p": 1, "n": 1,
  "field": "real",
  "fading": {"variant": "iid_real_gaussian"},
  "csit": {"variant": "quantized", "bits": 1},
  "sigma_s": {"kind": "random", "rank": 2, "seed": 7},
  "sigma_x": {"kind": "factor", "matrix": [[1], [0]]},
  "mc": {"n_outer": 200, "n_inner": 20000, "seed": 1}
}
)"},
        {"fdpc-2x2-b", R"({
  "name": "fdpc-2x2-b",
  "t": 2, "r": 2, "m": 1,
  "snr_db": 40, "q_over_p": 1, "n": 1,
  "field": "real",
  "fading": {"variant": "iid_real_gaussian"},
  "csit": {"variant": "none"},
  "sigma_s": {"kind": "matrix", "matrix": [[1, 0], [0, 0]]},
  "sigma_x": {"kind": "factor", "matrix": [[1], [0]]},
  "mc": {"n_outer": 200, "n_inner": 20000, "seed": 1}
}
)"},
        {"fdpc-3x2-a", R"({
  "name": "fdpc-3x2-a",
  "t": 3, "r": 2, "m": 2,
  "snr_db": 40, "q_over_p": 1, "n": 1,
  "field": "complex",
  "fading": {"variant": "iid_complex_gaussian"},
  "csit": {"variant": "none"},
  "sigma_s": {"kind": "scaled_identity"},
  "sigma_x": {"kind": "factor", "matrix": [[1, 0], [0, 1], [0, 0]]},
  "mc": {"n_outer": 200, "n_inner": 20000, "seed": 1}
}
)"},
        {"fdpc-3x2-b", R"({
  "name": "fdpc-3x2-b",
  "t": 3, "r": 2, "m": 2,
  "snr_db": 40, "q_over_p": 1, "n": 1,
  "field": "complex",
  "fading": {"variant": "iid_complex_gaussian"},
  "csit": {"variant": "none"},
  "sigma_s": {"kind": "matrix", "matrix": [[1, 0.3, 0], [0.3, 0.5, 0], [0, 0, 0]]},
  "sigma_x": {"kind": "factor", "matrix": [[1, 0], [0, 1], [0, 0]]},
  "mc": {"n_outer": 200, "n_inner": 20000, "seed": 1}
}
)"},
        {"fdpc-3x2-c", R"({
  "name": "fdpc-3x2-c",
  "t": 3, "r": 2, "m": 1,
  "snr_db": 40, "q_over_p": 1, "n": 1,
  "field": "complex",
  "fading": {"variant": "iid_complex_gaussian"},
  "csit": {"variant": "none"},
  "sigma_s": {"kind": "scaled_identity"},
  "sigma_x": {"kind": "factor", "matrix": [[1], [0], [0]]},
  "mc": {"n_outer": 200, "n_inner": 20000, "seed": 1}
}
)"},
        {"fdpc-3x2-pd", R"({
  "name": "fdpc-3x2-pd",
  "t": 3, "r": 2, "m": 3,
  "snr_db": 40, "q_over_p": 1, "n": 1,
  "field": "complex",
  "fading": {"variant": "iid_complex_gaussian"},
  "csit": {"variant": "none"},
  "sigma_s": {"kind": "random", "rank": 3, "seed": 17},
  "sigma_x": {"kind": "scaled_identity"},
  "mc": {"n_outer": 200, "n_inner": 20000, "seed": 1}
}
)"},
        {"fdpc-lowsnr", R"({
  "name": "fdpc-lowsnr",
  "t": 2, "r": 2, "m": 2,
  "snr_db": -30, "q_over_p": 1, "n": 1,
  "field": "real",
  "fading": {"variant": "iid_real_gaussian"},
  "csit": {"variant": "none"},
  "sigma_s": {"kind": "scaled_identity"},
  "sigma_x": {"kind": "scaled_identity"},
  "mc": {"n_outer": 200, "n_inner": 20000, "seed": 1}
}
)"},
        {"fdpc-fig4-1", R"({
  "name": "fdpc-fig4-1",
  "t": 2, "r": 2, "m": 1,
  "snr_db": 10, "q_over_p": 1, "n": 1,
  "field": "complex",
  "fading": {"variant": "iid_complex_gaussian"},
  "csit": {"variant": "none"},
  "sigma_s": {"kind": "random", "rank": 2, "seed": 11},
  "sigma_x": {"kind": "factor", "matrix": [[1], [0]]},
  "mc": {"n_outer": 200, "n_inner": 20000, "seed": 1}
}
)"},
        {"fdpc-fig4-2", R"({
  "name": "fdpc-fig4-2",
  "t": 3, "r": 2, "m": 2,
  "snr_db": 10, "q_over_p": 1, "n": 1,
  "field": "complex",
  "fading": {"variant": "iid_complex_gaussian"},
  "csit": {"variant": "none"},
  "sigma_s": {"kind": "random", "rank": 3, "seed": 13},
  "sigma_x": {"kind": "factor", "matrix": [[1, 0], [0, 1], [0, 0]]},
  "mc": {"n_outer": 200, "n_inner": 20000, "seed": 1}
}
)"},
        {"fdpc-3x3-corr", R"({
  "name": "fdpc-3x3-corr",
  "t": 3, "r": 3, "m": 3,
  "snr_db": 10, "q_over_p": 1, "n": 1,
  "field": "complex",
  "fading": {"variant": "correlated_rayleigh", "rx_rho": 0.5, "tx_rho": 0.9},
  "csit": {"variant": "none"},
  "sigma_s": {"kind": "scaled_identity"},
  "sigma_x": {"kind": "scaled_identity"},
  "mc": {"n_outer": 200, "n_inner": 10000, "seed": 1}
}
)"},
        {"fdpc-3x2-rank", R"({
  "name": "fdpc-3x2-rank",
  "t": 3, "r": 2, "m": 3,
  "snr_db": -10, "q_over_p": 1, "n": 1,
  "field": "complex",
  "fading": {"variant": "correlated_rayleigh", "rx_rho": 0.3, "tx_rho": 0.7},
  "csit": {"variant": "none"},
  "sigma_s": {"kind": "scaled_identity"},
  "sigma_x": {"kind": "scaled_identity"},
  "mc": {"n_outer": 200, "n_inner": 10000, "seed": 1}
}
)"},
    };
    return r;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

std::vector<std::string> reference_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : registry()) out.push_back(k);
    return out;
}

ExperimentConfig reference_config(std::string_view name) {
    auto it = registry().find(name);
    if (it == registry().end()) throw ConfigError("unknown reference config '" + std::string(name) + "'");
    return parse_config(it->second);
}

CsitModel parse_csit_label(std::string_view label, const FadingModel& fading) {
    if (label == "none") return CsitModel::none();
    if (label == "perfect") return CsitModel::perfect();
    if (label.size() > 2 && label.substr(0, 2) == "B=") {
        const std::string digits(label.substr(2));
        if (digits.find_first_not_of("0123456789") == std::string::npos && digits.size() <= 2) {
            const int bits = std::stoi(digits);
            if (bits >= 1 && bits <= 6) return CsitModel::quantized_for(bits, fading);
        }
    }
    throw ConfigError("unknown CSIT label '" + std::string(label) + "' (expected none, perfect or B=1..6)");
}

int rank_sum(const ChannelSpec& spec, double rank_tol) { return linalg::numerical_rank(spec.sigma_xs(), rank_tol); }

SampleBank make_bank(const ExperimentConfig& config, const ChannelSpec& spec, const CsitModel& csit,
                     std::uint64_t seed) {
    return build_sample_bank(spec, config.fading_model(), csit, config.mc.n_outer, config.mc.n_inner, seed);
}

double paired_stderr(const RateTerms& a, const RateTerms& b) {
    if (a.units.size() != b.units.size()) throw std::invalid_argument("paired terms must have equal unit counts");
    std::vector<double> d(a.units.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.units[i] - b.units[i];
    return stderr_of(d);
}

// ---------------------------------------------------------------------------

void SweepPlan::validate() const {
    if (snr_db_list.empty() || solvers.empty() || csit.empty())
        throw ConfigError("sweep plan needs nonempty SNR, solver and CSIT lists");
    if (!(q_over_p >= 0.0)) throw ConfigError("q_over_p must be nonnegative");
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const SweepPlan& plan, std::uint64_t seed,
                                const SolverConfig& solver_config) {
    plan.validate();
    ExperimentConfig cfg = base;
    cfg.q_over_p = plan.q_over_p;
    const std::size_t ns = plan.solvers.size();
    const std::size_t groups = plan.snr_db_list.size() * plan.csit.size();
    std::vector<SweepRow> rows(groups * ns);

    parallel_for(groups, [&](std::size_t gi) {
        const double snr = plan.snr_db_list[gi / plan.csit.size()];
        const std::string& label = plan.csit[gi % plan.csit.size()];
        auto fill_error = [&](std::size_t first, std::size_t last, const std::string& msg) {
            for (std::size_t k = first; k < last; ++k) {
                SweepRow& row = rows[gi * ns + k];
                row.snr_db = snr;
                row.csit = label;
                row.solver = to_string(plan.solvers[k]);
                row.rate_bits = row.stderr_bits = row.bound_bits = nan();
                row.seed = seed;
                row.converged = false;
                row.error = msg;
            }
        };
        std::optional<SampleBank> bank;
        std::optional<ChannelSpec> spec;
        double bound = nan();
        try {
            spec = cfg.channel_at(snr);
            bank = make_bank(cfg, *spec, parse_csit_label(label, cfg.fading_model()), seed);
            if (plan.include_bound) bound = no_interference_bound(*spec, *bank).rate_bits;
        } catch (const std::exception& e) {
            fill_error(0, ns, e.what());
            return;
        }
        for (std::size_t k = 0; k < ns; ++k) {
            try {
                const RateEstimate est =
                    achievable_rate(*spec, make_policy(plan.solvers[k], *spec, solver_config), *bank);
                SweepRow& row = rows[gi * ns + k];
                row.snr_db = snr;
                row.csit = label;
                row.solver = to_string(plan.solvers[k]);
                row.rate_bits = est.rate_bits;
                row.stderr_bits = est.stderr_bits;
                row.bound_bits = bound;
                row.n_outer = est.n_outer;
                row.n_inner = est.n_inner;
                row.seed = seed;
                row.converged = est.solver_converged;
            } catch (const std::exception& e) {
                fill_error(k, k + 1, e.what());
                rows[gi * ns + k].n_outer = bank->n_outer();
                rows[gi * ns + k].n_inner = bank->n_inner();
            }
        }
    });
    return rows;
}

std::string format_g6(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << kSweepHeader << '\n';
    for (const auto& r : rows) {
        out << format_g6(r.snr_db) << ',' << r.csit << ',' << r.solver << ',' << format_g6(r.rate_bits) << ','
            << format_g6(r.stderr_bits) << ',' << format_g6(r.bound_bits) << ',' << r.n_outer << ',' << r.n_inner
            << ',' << r.seed << '\n';
    }
}

// ---------------------------------------------------------------------------

ScalingResult estimate_scaling(const ExperimentConfig& base, SolverKind w_choice, double snr_lo_db, double snr_hi_db,
                               std::uint64_t seed, const SolverConfig& solver_config) {
    if (!(snr_hi_db > snr_lo_db && snr_lo_db >= 30.0))
        throw std::invalid_argument("scaling window needs hi > lo >= 30 dB");
    const CsitModel csit = base.csit_model();
    const ChannelSpec lo = base.channel_at(snr_lo_db), hi = base.channel_at(snr_hi_db);
    // The fading draws do not depend on P, so one seed gives common random numbers.
    const SampleBank bank_lo = make_bank(base, lo, csit, seed);
    const SampleBank bank_hi = make_bank(base, hi, csit, seed);
    const RateTerms r_lo = achievable_rate_terms(lo, make_policy(w_choice, lo, solver_config), bank_lo);
    const RateTerms r_hi = achievable_rate_terms(hi, make_policy(w_choice, hi, solver_config), bank_hi);
    const RateTerms c_lo = bound_terms(lo, bank_lo), c_hi = bound_terms(hi, bank_hi);

    const double dlog = (snr_hi_db - snr_lo_db) / 10.0 * std::log2(10.0);
    ScalingResult res;
    res.rate_lo_bits = r_lo.mean();
    res.rate_hi_bits = r_hi.mean();
    res.slope = (res.rate_hi_bits - res.rate_lo_bits) / dlog;
    res.slope_stderr = paired_stderr(r_hi, r_lo) / dlog;
    res.bound_slope = (c_hi.mean() - c_lo.mean()) / dlog;
    res.rank_sum = rank_sum(hi, solver_config.rank_tol);
    res.predicted = theoretical_scaling(res.rank_sum, base.m, base.r);
    return res;
}

std::vector<LowSnrPoint> low_snr_ratio(const ExperimentConfig& base, const std::vector<double>& snr_db_list,
                                       std::uint64_t seed) {
    if (snr_db_list.empty()) throw std::invalid_argument("low_snr_ratio needs at least one SNR");
    const CsitModel csit = base.csit_model();
    std::vector<LowSnrPoint> out(snr_db_list.size());
    parallel_for(snr_db_list.size(), [&](std::size_t k) {
        const ChannelSpec spec = base.channel_at(snr_db_list[k]);
        const SampleBank bank = make_bank(base, spec, csit, seed);
        const RateTerms r = achievable_rate_terms(spec, InflationPolicy::fixed(InflationFactor::zero(spec.dims())), bank);
        const RateTerms c = bound_terms(spec, bank);
        const double rm = r.mean(), cm = c.mean();
        const double ratio = rm / cm;
        // Delta method: Var(R/C) ~ Var(r_i - ratio c_i) / (n C^2).
        std::vector<double> lin(r.units.size());
        for (std::size_t i = 0; i < lin.size(); ++i) lin[i] = r.units[i] - ratio * c.units[i];
        out[k] = LowSnrPoint{snr_db_list[k], ratio, stderr_of(lin) / std::abs(cm)};
    });
    return out;
}

void write_lowsnr_csv(std::ostream& out, const std::vector<LowSnrPoint>& points) {
    out << "snr_db,ratio\n";
    for (const auto& p : points) out << format_g6(p.snr_db) << ',' << format_g6(p.ratio) << '\n';
}

GapResult gap_to_bound(const ExperimentConfig& base, double snr_db, SolverKind solver, std::uint64_t seed,
                       const SolverConfig& solver_config) {
    const ChannelSpec spec = base.channel_at(snr_db);
    const SampleBank bank = make_bank(base, spec, base.csit_model(), seed);
    const RateTerms r = achievable_rate_terms(spec, make_policy(solver, spec, solver_config), bank);
    const RateTerms c = bound_terms(spec, bank);
    GapResult g;
    g.rate_bits = r.mean();
    g.bound_bits = c.mean();
    g.gap_bits = g.bound_bits - g.rate_bits;
    g.stderr_bits = paired_stderr(c, r);
    return g;
}

std::vector<SolverComparison> compare_solvers(const ExperimentConfig& base, const std::vector<double>& snr_db_list,
                                              std::uint64_t seed, const SolverConfig& solver_config) {
    const CsitModel csit = base.csit_model();
    std::vector<SolverComparison> out(snr_db_list.size());
    parallel_for(snr_db_list.size(), [&](std::size_t k) {
        const ChannelSpec spec = base.channel_at(snr_db_list[k]);
        const SampleBank bank = make_bank(base, spec, csit, seed);
        const RateTerms a = achievable_rate_terms(spec, make_policy(SolverKind::Alg1, spec, solver_config), bank);
        const RateTerms b = achievable_rate_terms(spec, make_policy(SolverKind::Alg2, spec, solver_config), bank);
        out[k] = SolverComparison{snr_db_list[k], a.mean(), b.mean(), a.mean() - b.mean(), paired_stderr(a, b)};
    });
    return out;
}

}  // namespace fdpc
