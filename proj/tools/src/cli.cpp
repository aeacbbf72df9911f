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

#include "fdpc_cli/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "fdpc/covopt.hpp"
#include "fdpc/errors.hpp"
#include "fdpc/lab.hpp"
#include "fdpc/parallel.hpp"
#include "json.hpp"

namespace fdpc::cli {

namespace {

using json = nlohmann::ordered_json;

struct Options {
    std::string config_path;
    std::string reference;
    std::optional<double> snr_db;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<std::size_t> outer;
    int threads = 0;
    std::string out;
    std::string solver;

    // sweep / lowsnr
    std::string snr_list;
    std::string solvers = "alg1";
    std::string csit;
    std::optional<double> q_over_p;
    bool no_bound = false;
    // scaling
    double lo_db = 40.0, hi_db = 60.0;
    // solve-w
    std::size_t cell = 0;
    // jointopt
    std::optional<int> rank;
    int outer_iters = 30;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("config", o.config_path, "Path to a JSON experiment config");
    sub->add_option("--ref", o.reference, "Use a built-in reference config by name instead of a file");
    sub->add_option("--snr-db", o.snr_db, "SNR in dB (overrides the config)");
    sub->add_option("--seed", o.seed, "Monte Carlo seed (overrides FDPC_SEED and the config)");
    sub->add_option("--samples", o.samples, "Inner draws per outer cell (mc.n_inner)");
    sub->add_option("--outer", o.outer, "Outer cells for quantized/perfect CSIT (mc.n_outer)");
    sub->add_option("--threads", o.threads, "Worker threads (results do not depend on it)")->check(CLI::NonNegativeNumber);
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split(s)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw ConfigError("not a number: '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("empty SNR list");
    return out;
}

std::uint64_t env_seed() {
    const char* v = std::getenv("FDPC_SEED");
    if (!v) return 0;
    std::string s(v);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError("FDPC_SEED must be a nonnegative integer");
    return std::stoull(s);
}

// Precedence: command-line flags, then FDPC_SEED (seed only), then the config file.
ExperimentConfig effective_config(const Options& o) {
    ExperimentConfig c;
    if (!o.reference.empty() && !o.config_path.empty()) throw ConfigError("give either a config path or --ref, not both");
    if (!o.reference.empty())
        c = reference_config(o.reference);
    else if (!o.config_path.empty())
        c = load_config(o.config_path);
    else
        throw ConfigError("missing config path (or --ref <name>)");
    if (o.snr_db) c.snr_db = *o.snr_db;
    if (o.samples) c.mc.n_inner = *o.samples;
    if (o.outer) c.mc.n_outer = *o.outer;
    if (o.seed)
        c.mc.seed = *o.seed;
    else if (std::getenv("FDPC_SEED"))
        c.mc.seed = env_seed();
    if (c.mc.n_inner < 1 || c.mc.n_outer < 1) throw ConfigError("sample counts must be at least 1");
    return c;
}

json matrix_json(const Mat& a) {
    json rows = json::array();
    const bool real = linalg::is_real(a);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (real)
                row.push_back(a(i, j).real());
            else
                row.push_back(json::array({a(i, j).real(), a(i, j).imag()}));
        }
        rows.push_back(row);
    }
    return rows;
}

json provenance(const ExperimentConfig& c, const std::string& command) {
    json j;
    j["command"] = command;
    j["config"] = c.name;
    j["config_hash"] = config_hash(c);
    j["seed"] = c.mc.seed;
    return j;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file '" + path + "'");
    f << text;
    if (!f) throw ConfigError("failed writing '" + path + "'");
}

SolverKind solver_or(const std::string& name, SolverKind fallback) {
    return name.empty() ? fallback : parse_solver_kind(name);
}

// ---------------------------------------------------------------------------

json cmd_rate(const Options& o) {
    const ExperimentConfig c = effective_config(o);
    const SolverKind kind = solver_or(o.solver, SolverKind::Alg1);
    const ChannelSpec spec = c.channel();
    const SampleBank bank = make_bank(c, spec, c.csit_model(), c.mc.seed);

    std::vector<int> iters(bank.n_cells(), 0);
    InflationPolicy policy = make_policy(kind, spec);
    if (kind == SolverKind::Alg1 || kind == SolverKind::Alg2) {
        const SolverConfig sc;
        policy = InflationPolicy::per_cell([&iters, kind, sc](const ChannelSpec& s, const SampleCell& cell,
                                                              std::size_t index) {
            const InflationFactor W0 = initial_guess(s, cell.draws, sc);
            SolveResult r = kind == SolverKind::Alg1 ? alg1_solve(s, W0, sc, cell.draws)
                                                     : alg2_solve(s, W0, sc, cell.draws);
            iters[index] = r.iterations;
            return CellSolution{r.W, r.converged};
        });
    }
    const RateEstimate r = achievable_rate(spec, policy, bank);
    const RateEstimate b = no_interference_bound(spec, bank);

    json j = provenance(c, "rate");
    j["snr_db"] = c.snr_db;
    j["solver"] = to_string(kind);
    j["csit"] = bank.csit().label();
    j["rate_bits"] = r.rate_bits;
    j["stderr_bits"] = r.stderr_bits;
    j["bound_bits"] = b.rate_bits;
    j["converged"] = r.solver_converged;
    j["unconverged_cells"] = r.unconverged_cells;
    j["iterations"] = *std::max_element(iters.begin(), iters.end());
    j["n_outer"] = r.n_outer;
    j["n_inner"] = r.n_inner;
    return j;
}

json cmd_sweep(const Options& o) {
    const ExperimentConfig c = effective_config(o);
    if (o.out.empty()) throw ConfigError("sweep needs --out <file.csv>");
    SweepPlan plan;
    plan.snr_db_list = o.snr_list.empty() ? std::vector<double>{c.snr_db} : parse_doubles(o.snr_list);
    plan.q_over_p = o.q_over_p.value_or(c.q_over_p);
    for (const auto& s : split(o.solvers)) plan.solvers.push_back(parse_solver_kind(s));
    plan.csit = o.csit.empty() ? std::vector<std::string>{c.csit_model().label()} : split(o.csit);
    plan.include_bound = !o.no_bound;
    for (const auto& label : plan.csit) (void)parse_csit_label(label, c.fading_model());

    const std::vector<SweepRow> rows = run_sweep(c, plan, c.mc.seed);
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    write_file(o.out, csv.str());

    ExperimentConfig effective = c;
    effective.q_over_p = plan.q_over_p;
    json j = provenance(effective, "sweep");
    j["out"] = o.out;
    j["rows"] = rows.size();
    json errors = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (!rows[i].ok()) errors.push_back(json{{"row", i}, {"error", rows[i].error}});
    j["error_rows"] = errors;
    return j;
}

json cmd_scaling(const Options& o) {
    const ExperimentConfig c = effective_config(o);
    const SolverKind kind = solver_or(o.solver, SolverKind::Pinv);
    const ScalingResult s = estimate_scaling(c, kind, o.lo_db, o.hi_db, c.mc.seed);
    json j = provenance(c, "scaling");
    j["solver"] = to_string(kind);
    j["snr_lo_db"] = o.lo_db;
    j["snr_hi_db"] = o.hi_db;
    j["measured_slope"] = s.slope;
    j["slope_stderr"] = s.slope_stderr;
    j["predicted_slope"] = s.predicted;
    j["rank_sum"] = s.rank_sum;
    j["bound_slope"] = s.bound_slope;
    j["rate_lo_bits"] = s.rate_lo_bits;
    j["rate_hi_bits"] = s.rate_hi_bits;
    return j;
}

json cmd_lowsnr(const Options& o) {
    const ExperimentConfig c = effective_config(o);
    if (o.out.empty()) throw ConfigError("lowsnr needs --out <file.csv>");
    const std::vector<double> snrs =
        o.snr_list.empty() ? std::vector<double>{0, -5, -10, -15, -20, -25, -30} : parse_doubles(o.snr_list);
    const std::vector<LowSnrPoint> pts = low_snr_ratio(c, snrs, c.mc.seed);
    std::ostringstream csv;
    write_lowsnr_csv(csv, pts);
    write_file(o.out, csv.str());
    json j = provenance(c, "lowsnr");
    j["out"] = o.out;
    json arr = json::array();
    for (const auto& p : pts) arr.push_back(json{{"snr_db", p.snr_db}, {"ratio", p.ratio}, {"stderr", p.stderr}});
    j["points"] = arr;
    return j;
}

json cmd_solve_w(const Options& o) {
    const ExperimentConfig c = effective_config(o);
    const SolverKind kind = solver_or(o.solver, SolverKind::Alg1);
    const ChannelSpec spec = c.channel();
    const SampleBank bank = make_bank(c, spec, c.csit_model(), c.mc.seed);
    if (o.cell >= bank.n_cells())
        throw ConfigError("--cell " + std::to_string(o.cell) + " out of range (bank has " +
                          std::to_string(bank.n_cells()) + " cells)");
    const SampleCell& cell = bank.cells()[o.cell];
    const SolverConfig sc;
    SolveResult r;
    switch (kind) {
        case SolverKind::Alg1: r = alg1_solve(spec, initial_guess(spec, cell.draws, sc), sc, cell.draws); break;
        case SolverKind::Alg2: r = alg2_solve(spec, initial_guess(spec, cell.draws, sc), sc, cell.draws); break;
        case SolverKind::Perfect:
            r.W = bank.csit().kind() == CsitModel::Kind::Perfect ? w_perfect_csit(spec, cell.h_hat)
                                                                  : w_perfect_csit(spec, cell.draws.mean());
            r.converged = true;
            r.objective_trace.push_back(objective(spec, r.W.w, cell.draws));
            break;
        default:
            r.W = make_policy(kind, spec).fixed_w();
            r.converged = true;
            r.objective_trace.push_back(objective(spec, r.W.w, cell.draws));
    }
    json j = provenance(c, "solve-w");
    j["snr_db"] = c.snr_db;
    j["solver"] = to_string(kind);
    j["cell"] = o.cell;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["objective_trace"] = r.objective_trace;
    j["W"] = matrix_json(r.W.w);
    return j;
}

json cmd_jointopt(const Options& o) {
    ExperimentConfig c = effective_config(o);
    JointConfig jc;
    jc.rank_bound = o.rank.value_or(c.m);
    jc.outer_iters = o.outer_iters;
    jc.solver = solver_or(o.solver, SolverKind::Alg1);
    if (jc.rank_bound < 1 || jc.rank_bound > c.t) throw ConfigError("--rank must be in [1, t]");
    const ChannelSpec spec = c.channel();
    const SampleBank bank = make_bank(c, spec, c.csit_model(), c.mc.seed);
    const JointResult res = joint_optimize(spec, jc, bank);

    json j = provenance(c, "jointopt");
    j["snr_db"] = c.snr_db;
    j["rank"] = jc.rank_bound;
    j["solver"] = to_string(jc.solver);
    j["rate_bits"] = res.rate_bits;
    j["stderr_bits"] = res.stderr_bits;
    j["eig_ratio"] = res.eig_ratio;
    j["rank_used"] = res.rank_used;
    j["rate_trace"] = res.rate_trace;
    j["iterations"] = res.iterations;
    j["converged"] = res.converged;
    j["T"] = matrix_json(res.T);
    if (!o.out.empty()) write_file(o.out, j.dump(2) + "\n");
    return j;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fading dirty paper channel laboratory"};
    app.require_subcommand(1);
    Options o;

    auto* rate = app.add_subcommand("rate", "Achievable rate and no-interference bound at one SNR");
    add_common(rate, o);
    rate->add_option("--solver", o.solver, "alg1 | alg2 | zero | pinv | identity | perfect");

    auto* sweep = app.add_subcommand("sweep", "Rate-vs-SNR sweep written as CSV");
    add_common(sweep, o);
    sweep->add_option("--snr-list", o.snr_list, "Comma-separated SNRs in dB");
    sweep->add_option("--solvers", o.solvers, "Comma-separated solver names");
    sweep->add_option("--csit", o.csit, "Comma-separated CSIT labels (none, perfect, B=k)");
    sweep->add_option("--q-over-p", o.q_over_p, "Interference-to-signal power ratio");
    sweep->add_flag("--no-bound", o.no_bound, "Skip the no-interference bound column");
    sweep->add_option("--out", o.out, "CSV output path")->required();

    auto* scaling = app.add_subcommand("scaling", "High-SNR slope against the predicted scaling factor");
    add_common(scaling, o);
    scaling->add_option("--solver", o.solver, "Inflation choice (default pinv)");
    scaling->add_option("--lo", o.lo_db, "Lower SNR of the secant, dB");
    scaling->add_option("--hi", o.hi_db, "Upper SNR of the secant, dB");

    auto* lowsnr = app.add_subcommand("lowsnr", "R(W = 0) / C ratio at decreasing SNR, written as CSV");
    add_common(lowsnr, o);
    lowsnr->add_option("--snr-list", o.snr_list, "Comma-separated SNRs in dB");
    lowsnr->add_option("--out", o.out, "CSV output path")->required();

    auto* solvew = app.add_subcommand("solve-w", "Solve the inflation factor on one outer cell");
    add_common(solvew, o);
    solvew->add_option("--solver", o.solver, "alg1 | alg2 | zero | pinv | identity | perfect");
    solvew->add_option("--cell", o.cell, "Outer cell index");

    auto* joint = app.add_subcommand("jointopt", "Joint covariance and inflation-factor optimization");
    add_common(joint, o);
    joint->add_option("--rank", o.rank, "Rank bound m of the input covariance");
    joint->add_option("--outer-iters", o.outer_iters, "Maximum alternations")->check(CLI::PositiveNumber);
    joint->add_option("--solver", o.solver, "Inflation solver for the W-step (alg1 | alg2)");
    joint->add_option("--out", o.out, "Also write the JSON result to this path");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (o.threads > 0) set_thread_count(o.threads);
        json result;
        if (rate->parsed())
            result = cmd_rate(o);
        else if (sweep->parsed())
            result = cmd_sweep(o);
        else if (scaling->parsed())
            result = cmd_scaling(o);
        else if (lowsnr->parsed())
            result = cmd_lowsnr(o);
        else if (solvew->parsed())
            result = cmd_solve_w(o);
        else
            result = cmd_jointopt(o);
        out << result.dump(2) << '\n';
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    } catch (const EvaluationError& e) {
        err << "evaluation failure: " << e.what() << '\n';
        return kExitSolver;
    } catch (const SearchError& e) {
        err << "search failure: " << e.what() << '\n';
        return kExitSolver;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace fdpc::cli
