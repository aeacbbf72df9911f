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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fdpc/errors.hpp"
#include "fdpc/lab.hpp"
#include "fdpc/parallel.hpp"

namespace fdpc {
namespace {

ExperimentConfig small(std::string_view name, std::size_t n_inner = 400, std::size_t n_outer = 20) {
    ExperimentConfig c = reference_config(name);
    c.mc.n_inner = n_inner;
    c.mc.n_outer = n_outer;
    return c;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    write_sweep_csv(os, rows);
    return os.str();
}

TEST(Registry, NamesAndErrors) {
    const auto names = reference_names();
    for (const char* n : {"fdpc-2x2-a", "fdpc-2x2-b", "fdpc-3x2-a", "fdpc-3x2-b", "fdpc-lowsnr", "fdpc-fig4-1",
                          "fdpc-fig4-2"})
        EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
    EXPECT_THROW(reference_config("fdpc-9x9"), ConfigError);
}

TEST(Registry, RankSums) {
    EXPECT_EQ(rank_sum(reference_config("fdpc-3x2-a").channel()), 3);
    EXPECT_EQ(rank_sum(reference_config("fdpc-3x2-b").channel()), 2);
    EXPECT_EQ(rank_sum(reference_config("fdpc-3x2-c").channel()), 3);
}

TEST(CsitLabel, Parse) {
    const FadingModel f = FadingModel::iid_complex_gaussian();
    EXPECT_EQ(parse_csit_label("none", f).kind(), CsitModel::Kind::NoCsit);
    EXPECT_EQ(parse_csit_label("perfect", f).kind(), CsitModel::Kind::Perfect);
    const CsitModel q = parse_csit_label("B=2", f);
    EXPECT_EQ(q.kind(), CsitModel::Kind::Quantized);
    EXPECT_EQ(q.bits(), 2);
    EXPECT_EQ(q.label(), "B=2");
    for (const char* bad : {"B=0", "B=7", "B=", "B=x", "quantized", ""})
        EXPECT_THROW(parse_csit_label(bad, f), ConfigError) << bad;
}

TEST(Csv, Formatting) {
    EXPECT_EQ(format_g6(1.23456789), "1.23457");
    EXPECT_EQ(format_g6(10.0), "10");
    EXPECT_EQ(format_g6(-30.0), "-30");
    EXPECT_EQ(format_g6(1e-7), "1e-07");
    EXPECT_EQ(format_g6(std::nan("")), "nan");
    SweepRow row;
    row.snr_db = 10;
    row.csit = "B=1";
    row.solver = "alg1";
    row.rate_bits = 3.14159265;
    row.stderr_bits = 0.0123456789;
    row.bound_bits = 4.5;
    row.n_outer = 200;
    row.n_inner = 20000;
    row.seed = 7;
    EXPECT_EQ(sweep_csv({row}), std::string(kSweepHeader) + "\n10,B=1,alg1,3.14159,0.0123457,4.5,200,20000,7\n");
    EXPECT_EQ(std::string(kSweepHeader), "snr_db,csit,solver,rate_bits,stderr_bits,bound_bits,n_outer,n_inner,seed");
}

TEST(Sweep, PlanOrderAndBound) {
    SweepPlan plan;
    plan.snr_db_list = {0.0, 10.0};
    plan.solvers = {SolverKind::Zero, SolverKind::Pinv, SolverKind::Alg1};
    plan.csit = {"none", "B=1"};
    const auto rows = run_sweep(small("fdpc-2x2-b"), plan, 3);
    ASSERT_EQ(rows.size(), 12u);
    std::size_t i = 0;
    for (double snr : plan.snr_db_list)
        for (const auto& c : plan.csit)
            for (auto s : plan.solvers) {
                const SweepRow& r = rows[i++];
                EXPECT_EQ(r.snr_db, snr);
                EXPECT_EQ(r.csit, c);
                EXPECT_EQ(r.solver, to_string(s));
                ASSERT_TRUE(r.ok()) << r.error;
                EXPECT_EQ(r.seed, 3u);
                EXPECT_GE(r.bound_bits, r.rate_bits - 2 * r.stderr_bits);
                EXPECT_EQ(r.n_inner, 400u);
                EXPECT_EQ(r.n_outer, c == "none" ? 1u : 20u);
            }
}

TEST(Sweep, ByteIdenticalAcrossRunsAndThreads) {
    SweepPlan plan;
    plan.snr_db_list = {5.0, 15.0};
    plan.solvers = {SolverKind::Alg1, SolverKind::Alg2};
    plan.csit = {"none", "B=2", "perfect"};
    const ExperimentConfig cfg = small("fdpc-2x2-a", 200, 10);
    const int saved = thread_count();
    set_thread_count(1);
    const std::string a = sweep_csv(run_sweep(cfg, plan, 11));
    const std::string b = sweep_csv(run_sweep(cfg, plan, 11));
    set_thread_count(4);
    const std::string c = sweep_csv(run_sweep(cfg, plan, 11));
    set_thread_count(saved);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    EXPECT_NE(a, sweep_csv(run_sweep(cfg, plan, 12)));
}

TEST(Sweep, FailuresBecomeErrorRows) {
    SweepPlan plan;
    plan.snr_db_list = {10.0};
    plan.solvers = {SolverKind::Zero, SolverKind::Pinv};
    plan.csit = {"B=9", "none"};
    const auto rows = run_sweep(small("fdpc-2x2-b"), plan, 1);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_FALSE(rows[0].ok());
    EXPECT_FALSE(rows[1].ok());
    EXPECT_TRUE(std::isnan(rows[0].rate_bits));
    EXPECT_TRUE(rows[2].ok());
    EXPECT_TRUE(rows[3].ok());
    EXPECT_NE(sweep_csv(rows).find("10,B=9,zero,nan,nan,nan"), std::string::npos);
}

TEST(Sweep, PlanValidation) {
    SweepPlan plan;
    EXPECT_THROW(plan.validate(), ConfigError);
    plan.snr_db_list = {0};
    plan.solvers = {SolverKind::Zero};
    plan.csit = {"none"};
    EXPECT_NO_THROW(plan.validate());
    plan.q_over_p = -1;
    EXPECT_THROW(plan.validate(), ConfigError);
}

TEST(Scaling, ZeroInterferenceFollowsBound) {
    for (const char* name : {"fdpc-3x2-a", "fdpc-3x2-c"}) {
        ExperimentConfig cfg = small(name, 4000);
        cfg.q_over_p = 0.0;
        for (SolverKind w : {SolverKind::Pinv, SolverKind::Zero}) {
            const ScalingResult s = estimate_scaling(cfg, w, 40.0, 60.0, 5);
            EXPECT_NEAR(s.slope, std::min(cfg.m, cfg.r), 0.15) << name;
            EXPECT_NEAR(s.slope, s.bound_slope, 1e-9) << name;
        }
    }
}

TEST(Scaling, ReportsPrediction) {
    const ScalingResult s = estimate_scaling(small("fdpc-3x2-b", 2000), SolverKind::Pinv, 40.0, 60.0, 1);
    EXPECT_EQ(s.rank_sum, 2);
    EXPECT_EQ(s.predicted, 2);
    EXPECT_GT(s.slope_stderr, 0.0);
    EXPECT_THROW(estimate_scaling(small("fdpc-3x2-b"), SolverKind::Pinv, 20.0, 60.0, 1), std::invalid_argument);
    EXPECT_THROW(estimate_scaling(small("fdpc-3x2-b"), SolverKind::Pinv, 40.0, 40.0, 1), std::invalid_argument);
}

TEST(LowSnr, ZeroInterferenceRatioIsOne) {
    ExperimentConfig cfg = small("fdpc-lowsnr", 500);
    cfg.q_over_p = 0.0;
    for (const auto& p : low_snr_ratio(cfg, {0.0, -10.0, -30.0}, 2)) EXPECT_NEAR(p.ratio, 1.0, 1e-9) << p.snr_db;
}

TEST(LowSnr, CsvAndOrder) {
    const auto pts = low_snr_ratio(small("fdpc-lowsnr", 500), {0.0, -15.0, -30.0}, 2);
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_EQ(pts[1].snr_db, -15.0);
    for (const auto& p : pts) {
        EXPECT_GT(p.ratio, 0.0);
        EXPECT_LE(p.ratio, 1.0 + 1e-12);
        EXPECT_GE(p.stderr, 0.0);
    }
    std::ostringstream os;
    write_lowsnr_csv(os, pts);
    EXPECT_EQ(os.str().substr(0, 15), "snr_db,ratio\n0,");
    EXPECT_THROW(low_snr_ratio(small("fdpc-lowsnr"), {}, 1), std::invalid_argument);
}

TEST(Gap, ZeroInterferenceIsZero) {
    ExperimentConfig cfg = small("fdpc-2x2-b", 500);
    cfg.q_over_p = 0.0;
    for (SolverKind s : {SolverKind::Zero, SolverKind::Alg1, SolverKind::Pinv}) {
        const GapResult g = gap_to_bound(cfg, 20.0, s, 4);
        EXPECT_NEAR(g.gap_bits, 0.0, 1e-9);
        EXPECT_NEAR(g.bound_bits - g.rate_bits, g.gap_bits, 1e-15);
    }
}

TEST(Compare, FieldsConsistent) {
    const auto cmp = compare_solvers(small("fdpc-fig4-1", 300), {0.0, 10.0}, 1);
    ASSERT_EQ(cmp.size(), 2u);
    for (const auto& c : cmp) {
        EXPECT_NEAR(c.diff_bits, c.alg1_bits - c.alg2_bits, 1e-15);
        EXPECT_GE(c.diff_stderr, 0.0);
    }
}

TEST(PairedStderr, SizesMustMatch) {
    RateTerms a, b;
    a.units = {1.0, 2.0, 3.0};
    b.units = {1.0, 1.0, 1.0};
    EXPECT_NEAR(paired_stderr(a, b), 1.0 / std::sqrt(3.0), 1e-15);
    b.units.pop_back();
    EXPECT_THROW(paired_stderr(a, b), std::invalid_argument);
}

}  // namespace
}  // namespace fdpc
