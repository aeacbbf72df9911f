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
#include <random>
#include <stdexcept>

#include "fdpc/errors.hpp"
#include "fdpc/inflation.hpp"
#include "fdpc/rate.hpp"
#include "test_support.hpp"

namespace fdpc {
namespace {

using testing::random_draws;
using testing::random_matrix;
using testing::random_spec;
using testing::scalar;
using testing::scalar_spec;
using testing::single_draw;
using testing::SpecShape;

double obj(const ChannelSpec& spec, const Mat& W, const InnerSamples& s) { return objective(spec, W, s); }

// Row k of W via the literal block recipe: permute row k to the front, form
// M, strip its first row and column to get D, split D^{-1} into F, G, J, K and
// evaluate the completed-square minimizer with S_eps = S + eps I.
Mat literal_row_update(const ChannelSpec& spec, const Mat& W, int k, const InnerSamples& samples, double eps) {
    const auto& d = spec.dims();
    const int m = d.m, r = d.r, t = d.t;
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(m);
    perm.setIdentity();
    for (int i = k; i > 0; --i) perm.applyTranspositionOnTheRight(i, i - 1);
    const Mat Wp = perm.transpose() * W;
    const Mat Tp = spec.T() * perm;
    const ChannelSpec sp = spec.with_factor(Tp);
    const Mat w_bar = Wp.bottomRows(m - 1);
    const Mat t1_adj = Tp.col(0).adjoint();

    Mat eF = Mat::Zero(m - 1, m - 1), eHJ = Mat::Zero(t, m - 1), eGH = Mat::Zero(m - 1, t), eHKH = Mat::Zero(t, t);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Mat H = samples[i];
        const Mat M = build_M(sp, Wp, H);
        const Mat D = M.bottomRightCorner(m - 1 + r, m - 1 + r);
        const Mat Dinv = D.inverse();
        const Mat F = Dinv.topLeftCorner(m - 1, m - 1);
        const Mat G = Dinv.topRightCorner(m - 1, r);
        const Mat J = Dinv.bottomLeftCorner(r, m - 1);
        const Mat K = Dinv.bottomRightCorner(r, r);
        eF += F;
        eHJ += H.adjoint() * J;
        eGH += G * H;
        eHKH += H.adjoint() * K * H;
    }
    const double n = static_cast<double>(samples.size());
    eF /= n;
    eHJ /= n;
    eGH /= n;
    eHKH /= n;

    const Mat S = spec.sigma_s() + eps * Mat::Identity(t, t);
    const Mat num = t1_adj * eHJ * w_bar * S + t1_adj * eHKH * S;
    const Mat den = S - S * w_bar.adjoint() * eF * w_bar * S - S * eHJ * w_bar * S - S * w_bar.adjoint() * eGH * S -
                    S * eHKH * S;
    Mat out = W;
    out.row(k) = num * den.inverse();
    return out;
}

SpecShape shape(Field f, int t, int r, int m, double snr_db, int rank_s = -1) {
    const double P = std::pow(10.0, snr_db / 10.0);
    return {f, t, r, m, P, P, 1.0, rank_s};
}

// ---------------------------------------------------------------------------
// Closed forms

TEST(PerfectCsit, ScalarIsCostaFactor) {
    const ChannelSpec spec = scalar_spec(1.0, 1.0, 1.0);
    EXPECT_NEAR(w_perfect_csit(spec, scalar(1.0)).w(0, 0).real(), 0.5, 1e-15);
}

TEST(PerfectCsit, ZeroChannelGivesZero) {
    Rng rng(10);
    const ChannelSpec spec = random_spec(shape(Field::Complex, 3, 2, 2, 10.0), rng);
    const Mat W = w_perfect_csit(spec, Mat::Zero(2, 3)).w;
    EXPECT_EQ(W.rows(), 2);
    EXPECT_EQ(W.cols(), 3);
    EXPECT_EQ(W.norm(), 0.0);
}

TEST(PerfectCsit, LocalOptimumOnDegenerateBank) {
    Rng rng(11);
    for (Field f : {Field::Real, Field::Complex}) {
        const ChannelSpec spec = random_spec(shape(f, 3, 2, 2, 10.0), rng);
        const bool real = f == Field::Real;
        const Mat H = random_matrix(2, 3, real, rng);
        const InnerSamples bank = single_draw(H);
        const Mat W = w_perfect_csit(spec, H).w;
        const double base = obj(spec, W, bank);
        for (int p = 0; p < 100; ++p) {
            const double scale = std::pow(10.0, -3.0 + 3.0 * (p % 4) / 3.0);
            const Mat Wp = W + scale * random_matrix(2, 3, real, rng);
            EXPECT_GE(obj(spec, Wp, bank), base - 1e-12);
        }
    }
}

TEST(Pinv, OrthonormalColumn) {
    Mat T = Mat::Zero(2, 1);
    T(0, 0) = 1.0;
    const ChannelSpec spec = ChannelSpec::create(Field::Real, T, Mat::Identity(2, 2), Mat::Identity(2, 2), 1.0);
    const Mat W = w_pinv(spec).w;
    ASSERT_EQ(W.rows(), 1);
    ASSERT_EQ(W.cols(), 2);
    EXPECT_NEAR(std::abs(W(0, 0) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(W(0, 1)), 0.0, 1e-15);
}

TEST(Pinv, SquareInverse) {
    Rng rng(12);
    const ChannelSpec spec = random_spec(shape(Field::Complex, 3, 2, 3, 10.0), rng);
    const Mat W = w_pinv(spec).w;
    EXPECT_LT((W * spec.T() - Mat::Identity(3, 3)).norm(), 1e-10);
}

TEST(Pinv, PenroseConditions) {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const int t = 1 + trial % 3, m = 1 + trial % t;
        const ChannelSpec spec = random_spec(shape(trial % 2 ? Field::Real : Field::Complex, t, 2, m, 10.0), rng);
        const Mat& T = spec.T();
        const Mat W = w_pinv(spec).w;
        EXPECT_LT((W * T * W - W).norm(), 1e-10);
        EXPECT_LT((T * W * T - T).norm(), 1e-10);
    }
}

TEST(Scaling, TheoreticalExamples) {
    EXPECT_EQ(theoretical_scaling(2, 2, 2), 2);
    EXPECT_EQ(theoretical_scaling(3, 2, 2), 1);
    EXPECT_EQ(theoretical_scaling(3, 1, 2), 0);
    EXPECT_EQ(theoretical_scaling(4, 4, 2), 2);
    EXPECT_THROW(theoretical_scaling(1, 2, 2), std::invalid_argument);
    EXPECT_THROW(theoretical_scaling(2, 0, 2), std::invalid_argument);
    EXPECT_EQ(pd_scaling(3, 2), 2);
    EXPECT_EQ(pd_scaling(2, 3), 2);
    EXPECT_THROW(pd_scaling(0, 2), std::invalid_argument);
}

TEST(HighSnrPd, IsIdentity) {
    Rng rng(14);
    const ChannelSpec spec = random_spec(shape(Field::Complex, 3, 2, 3, 40.0), rng);
    EXPECT_EQ(w_high_snr_pd(spec), Mat::Identity(3, 3));
    const ChannelSpec low = random_spec(shape(Field::Complex, 3, 2, 2, 40.0), rng);
    EXPECT_THROW(w_high_snr_pd(low), std::invalid_argument);
}

TEST(HighSnrPd, NearBoundWhenTxNotAboveRx) {
    Rng rng(15);
    for (auto [t, r] : {std::pair{2, 2}, std::pair{2, 3}}) {
        const ChannelSpec spec = random_spec(shape(Field::Complex, t, r, t, 50.0), rng);
        const SampleBank bank = build_sample_bank(spec, FadingModel::iid_complex_gaussian(), CsitModel::none(), 1,
                                                  4000, 21);
        const double R = achievable_rate_pd(spec, w_high_snr_pd(spec), bank).rate_bits;
        const double C = no_interference_bound(spec, bank).rate_bits;
        EXPECT_LT(C - R, 0.1) << "t=" << t << " r=" << r;
    }
}

TEST(Identity, EmbeddingShapes) {
    Rng rng(16);
    const ChannelSpec sq = random_spec(shape(Field::Complex, 3, 2, 3, 10.0), rng);
    EXPECT_LT((identity_embedding(sq).w * sq.T() - Mat::Identity(3, 3)).norm(), 1e-10);
    const ChannelSpec thin = random_spec(shape(Field::Complex, 3, 2, 2, 10.0), rng);
    EXPECT_EQ(identity_embedding(thin).w, Mat::Identity(2, 3));
}

// ---------------------------------------------------------------------------
// Row updates

TEST(RowUpdate, ZeroInterferenceGivesZeroRow) {
    Rng rng(20);
    const ChannelSpec spec = random_spec(shape(Field::Complex, 3, 2, 2, 10.0, 0), rng);
    const InnerSamples s = random_draws(spec, 50, rng);
    const Mat W = random_matrix(2, 3, false, rng);
    for (int k = 0; k < 2; ++k) {
        const Mat out = alg1_row_update(spec, {W}, k, s).w;
        EXPECT_EQ(out.row(k).norm(), 0.0);
        EXPECT_EQ(out.row(1 - k), W.row(1 - k));
    }
}

TEST(RowUpdate, RejectsBadRow) {
    Rng rng(21);
    const ChannelSpec spec = random_spec(shape(Field::Real, 2, 2, 1, 10.0), rng);
    const InnerSamples s = random_draws(spec, 5, rng);
    EXPECT_THROW(alg1_row_update(spec, InflationFactor::zero(spec.dims()), 1, s), std::invalid_argument);
    EXPECT_THROW(alg1_row_update(spec, InflationFactor::zero(spec.dims()), -1, s), std::invalid_argument);
}

TEST(RowUpdate, RankOneSingleDrawRandomSearch) {
    Rng rng(22);
    for (Field f : {Field::Real, Field::Complex}) {
        const bool real = f == Field::Real;
        const ChannelSpec spec = random_spec(shape(f, 2, 2, 1, 10.0), rng);
        const InnerSamples bank = single_draw(random_matrix(2, 2, real, rng));
        const Mat W = alg1_row_update(spec, InflationFactor::zero(spec.dims()), 0, bank).w;
        const double base = obj(spec, W, bank);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double best = std::numeric_limits<double>::infinity();
        for (int p = 0; p < 10000; ++p) {
            const double scale = std::pow(10.0, 3.0 * (u(rng) - 1.0));
            Mat dir = random_matrix(1, 2, real, rng);
            dir /= dir.norm();
            best = std::min(best, obj(spec, W + scale * dir, bank));
        }
        EXPECT_GE(best, base - 1e-8);
    }
}

TEST(RowUpdate, SurrogateNeverIncreases) {
    Rng rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const Field f = trial % 2 ? Field::Real : Field::Complex;
        const int t = 2 + trial % 2, m = 1 + trial % t;
        const int rank_s = trial % 3 == 0 ? 1 : -1;
        const ChannelSpec spec = random_spec(shape(f, t, 2, m, 10.0 * (trial % 3), rank_s), rng);
        const InnerSamples s = random_draws(spec, 30, rng);
        const InflationFactor W{random_matrix(m, t, f == Field::Real, rng)};
        for (int k = 0; k < m; ++k) {
            const double before = row_surrogate(spec, W, k, s);
            const double after = row_surrogate(spec, alg1_row_update(spec, W, k, s), k, s);
            EXPECT_LE(after, before + 1e-10 * std::max(1.0, std::abs(before))) << "trial " << trial << " row " << k;
        }
    }
}

TEST(RowUpdate, MatchesLiteralBlockFormulaPd) {
    Rng rng(24);
    for (int trial = 0; trial < 12; ++trial) {
        const Field f = trial % 2 ? Field::Real : Field::Complex;
        const int t = 2 + trial % 2, m = 1 + trial % t;
        const ChannelSpec spec = random_spec(shape(f, t, 2, m, 5.0), rng);
        const InnerSamples s = random_draws(spec, 40, rng);
        const Mat W = random_matrix(m, t, f == Field::Real, rng);
        for (int k = 0; k < m; ++k) {
            const Mat got = alg1_row_update(spec, {W}, k, s).w;
            const Mat want = literal_row_update(spec, W, k, s, 0.0);
            EXPECT_LT((got - want).norm(), 1e-8 * std::max(1.0, want.norm())) << "trial " << trial << " row " << k;
        }
    }
}

TEST(RowUpdate, MatchesRegularizedFormulaSingular) {
    Rng rng(25);
    for (int trial = 0; trial < 12; ++trial) {
        const Field f = trial % 2 ? Field::Real : Field::Complex;
        const int m = 1 + trial % 3;
        const ChannelSpec spec = random_spec(shape(f, 3, 2, m, 5.0, 1 + trial % 2), rng);
        const InnerSamples s = random_draws(spec, 40, rng);
        const Mat W = random_matrix(m, 3, f == Field::Real, rng);
        const double eps = 1e-8 * spec.sigma_s().trace().real();
        const Mat& S = spec.sigma_s();
        for (int k = 0; k < m; ++k) {
            const Mat got = alg1_row_update(spec, {W}, k, s).w;
            const Mat want = literal_row_update(spec, W, k, s, eps);
            // Only W S is identifiable; the regularized row carries O(1) null-space parts.
            const Mat gs = got.row(k) * S, ws = want.row(k) * S;
            EXPECT_LT((gs - ws).norm(), 1e-5 * std::max(1.0, ws.norm())) << "trial " << trial << " row " << k;
            EXPECT_LT((got.row(k) * (Mat::Identity(3, 3) - linalg::range_projector(S))).norm(), 1e-10);
        }
    }
}

TEST(RankOne, OneSweepMatchesClosedForm) {
    Rng rng(26);
    for (int trial = 0; trial < 10; ++trial) {
        const Field f = trial % 2 ? Field::Real : Field::Complex;
        const int t = 1 + trial % 3;
        const ChannelSpec spec = random_spec(shape(f, t, 2, 1, 10.0), rng);
        const InnerSamples s = random_draws(spec, 100, rng);
        const Mat closed = rank_one_closed_form(spec, s).w;
        const InflationFactor W0{random_matrix(1, t, f == Field::Real, rng)};
        const Mat row = alg1_row_update(spec, W0, 0, s).w;
        EXPECT_LT((row - closed).norm(), 1e-8 * std::max(1.0, closed.norm()));
        SolverConfig cfg;
        cfg.max_iters = 1;
        const Mat swept = alg1_solve(spec, W0, cfg, s).W.w;
        EXPECT_LT((swept - closed).norm(), 1e-8 * std::max(1.0, closed.norm()));
    }
}

TEST(RankOne, SingularInterferenceNeedsRegularization) {
    Rng rng(27);
    const ChannelSpec spec = random_spec(shape(Field::Complex, 3, 2, 1, 10.0, 1), rng);
    const InnerSamples s = random_draws(spec, 100, rng);
    EXPECT_THROW(rank_one_closed_form(spec, s), SolverError);
    const double eps = 1e-8 * spec.sigma_s().trace().real();
    const Mat reg = rank_one_closed_form(spec, s, eps).w;
    const Mat row = alg1_row_update(spec, InflationFactor::zero(spec.dims()), 0, s).w;
    const Mat& S = spec.sigma_s();
    EXPECT_LT((row * S - reg * S).norm(), 1e-5 * std::max(1.0, (reg * S).norm()));
    EXPECT_NEAR(obj(spec, row, s), obj(spec, reg, s), 1e-8);
}

TEST(RankOne, RequiresRankOne) {
    Rng rng(28);
    const ChannelSpec spec = random_spec(shape(Field::Complex, 2, 2, 2, 10.0), rng);
    EXPECT_THROW(rank_one_closed_form(spec, random_draws(spec, 5, rng)), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Row-wise solver

TEST(Alg1, ObjectiveTraceNonIncreasing) {
    Rng rng(30);
    for (int trial = 0; trial < 24; ++trial) {
        const Field f = trial % 2 ? Field::Real : Field::Complex;
        const int t = 2 + trial % 2, m = 1 + (trial / 2) % t;
        const int rank_s = trial % 4 == 0 ? 1 : -1;
        const ChannelSpec spec = random_spec(shape(f, t, 2, m, 10.0 * (trial % 3), rank_s), rng);
        const InnerSamples s = random_draws(spec, 100, rng);
        SolverConfig cfg;
        cfg.max_iters = 50;
        const SolveResult res = alg1_solve(spec, initial_guess(spec, s, cfg), cfg, s);
        ASSERT_FALSE(res.objective_trace.empty());
        for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
            EXPECT_LE(res.objective_trace[i], res.objective_trace[i - 1] + 1e-12) << "trial " << trial << " sweep " << i;
    }
}

TEST(Alg1, ZeroInterferenceConvergesInOneSweep) {
    Rng rng(31);
    const ChannelSpec spec = random_spec(shape(Field::Complex, 3, 2, 2, 10.0, 0), rng);
    const InnerSamples s = random_draws(spec, 50, rng);
    const SolveResult res = alg1_solve(spec, {random_matrix(2, 3, false, rng)}, SolverConfig{}, s);
    EXPECT_TRUE(res.converged);
    EXPECT_EQ(res.iterations, 1);
    EXPECT_NEAR(res.objective_trace.back(), spec.logdet_sigma_z(), 1e-9);
    EXPECT_EQ(res.W.w.norm(), 0.0);
}

TEST(Alg1, ConvergedTraceMeetsTolerance) {
    Rng rng(32);
    const ChannelSpec spec = random_spec(shape(Field::Complex, 3, 2, 2, 10.0), rng);
    const InnerSamples s = random_draws(spec, 100, rng);
    SolverConfig cfg;
    const SolveResult res = alg1_solve(spec, initial_guess(spec, s, cfg), cfg, s);
    ASSERT_TRUE(res.converged);
    const auto& tr = res.objective_trace;
    ASSERT_GE(tr.size(), 2u);
    EXPECT_LT(std::abs(tr.back() - tr[tr.size() - 2]), cfg.tol * std::max(1.0, std::abs(tr[tr.size() - 2])));
}

TEST(Alg1, NearFixedPointOfStationarityMap) {
    Rng rng(33);
    for (Field f : {Field::Real, Field::Complex}) {
        const ChannelSpec spec = random_spec(shape(f, 2, 2, 2, 10.0), rng);
        const InnerSamples bank = single_draw(random_matrix(2, 2, f == Field::Real, rng));
        SolverConfig cfg;
        cfg.tol = 1e-14;
        cfg.max_iters = 5000;
        const Mat W1 = alg1_solve(spec, InflationFactor::zero(spec.dims()), cfg, bank).W.w;
        const Mat g = alg2_map(spec, {W1}, bank).w;
        EXPECT_LT((g - W1).norm(), 1e-3 * W1.norm());
    }
}

// ---------------------------------------------------------------------------
// Fixed-point solver

TEST(Alg2, ScalarFixedPointMatchesGrid) {
    const ChannelSpec spec = scalar_spec(1.0, 1.0, 1.0);
    const InnerSamples bank = single_draw(scalar(1.0));
    double best_w = 0.0, best = std::numeric_limits<double>::infinity();
    for (int i = -20000; i <= 20000; ++i) {
        const double w = i * 1e-4;
        const double v = obj(spec, scalar(w), bank);
        if (v < best) {
            best = v;
            best_w = w;
        }
    }
    SolverConfig cfg;
    cfg.damping = 1.0;
    cfg.tol = 1e-12;
    const SolveResult res = alg2_solve(spec, InflationFactor{scalar(0.0)}, cfg, bank);
    EXPECT_TRUE(res.converged);
    EXPECT_NEAR(res.W.w(0, 0).real(), best_w, 1e-4);
    EXPECT_NEAR(alg2_map(spec, res.W, bank).w(0, 0).real(), res.W.w(0, 0).real(), 1e-10);
}

TEST(Alg2, ResidualBelowTenTimesTolerance) {
    Rng rng(40);
    for (int trial = 0; trial < 8; ++trial) {
        const Field f = trial % 2 ? Field::Real : Field::Complex;
        const int rank_s = trial % 4 == 3 ? 2 : -1;
        const ChannelSpec spec = random_spec(shape(f, 3, 2, 1 + trial % 3, 10.0, rank_s), rng);
        const InnerSamples s = random_draws(spec, 200, rng);
        SolverConfig cfg;
        cfg.max_iters = 2000;
        const SolveResult res = alg2_solve(spec, initial_guess(spec, s, cfg), cfg, s);
        ASSERT_TRUE(res.converged) << "trial " << trial;
        EXPECT_LT(alg2_residual(spec, res.W, s), 10 * cfg.tol) << "trial " << trial;
    }
}

TEST(Alg2, DirectionalDerivativesVanish) {
    Rng rng(41);
    for (Field f : {Field::Real, Field::Complex}) {
        const bool real = f == Field::Real;
        const ChannelSpec spec = random_spec(shape(f, 3, 2, 2, 10.0), rng);
        const InnerSamples s = random_draws(spec, 200, rng);
        SolverConfig cfg;
        cfg.max_iters = 2000;
        const SolveResult res = alg2_solve(spec, initial_guess(spec, s, cfg), cfg, s);
        ASSERT_TRUE(res.converged);
        const Mat& W = res.W.w;
        const double scale = std::max(1.0, std::abs(obj(spec, W, s)));
        const double h = 1e-5;
        for (int dir = 0; dir < 20; ++dir) {
            Mat D = random_matrix(2, 3, real, rng);
            D /= D.norm();
            const double deriv = (obj(spec, W + h * D, s) - obj(spec, W - h * D, s)) / (2 * h);
            EXPECT_LT(std::abs(deriv), 1e-3 * scale) << "direction " << dir;
        }
    }
}

TEST(Alg2, ZeroInterferenceReturnsStart) {
    Rng rng(42);
    const ChannelSpec spec = random_spec(shape(Field::Complex, 3, 2, 2, 10.0, 0), rng);
    const InnerSamples s = random_draws(spec, 20, rng);
    const InflationFactor W0{random_matrix(2, 3, false, rng)};
    const SolveResult res = alg2_solve(spec, W0, SolverConfig{}, s);
    EXPECT_TRUE(res.converged);
    EXPECT_EQ(res.W.w, W0.w);
    EXPECT_EQ(res.objective_trace.size(), 1u);
}

TEST(Alg2, RecordsObjectivePerIteration) {
    Rng rng(43);
    const ChannelSpec spec = random_spec(shape(Field::Complex, 2, 2, 2, 10.0), rng);
    const InnerSamples s = random_draws(spec, 50, rng);
    SolverConfig cfg;
    cfg.max_iters = 3;
    cfg.tol = 1e-15;
    const SolveResult res = alg2_solve(spec, InflationFactor::zero(spec.dims()), cfg, s);
    EXPECT_FALSE(res.objective_trace.empty());
    EXPECT_LE(res.iterations, cfg.max_iters);
}

TEST(SolverConfig, Validation) {
    SolverConfig c;
    EXPECT_NO_THROW(c.validate());
    c.max_iters = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.tol = 1.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.damping = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(SolverKind, NamesRoundTrip) {
    for (auto k : {SolverKind::Alg1, SolverKind::Alg2, SolverKind::Zero, SolverKind::Pinv, SolverKind::Identity,
                   SolverKind::Perfect})
        EXPECT_EQ(parse_solver_kind(to_string(k)), k);
    EXPECT_THROW(parse_solver_kind("newton"), ConfigError);
}

// ---------------------------------------------------------------------------
// Properties

TEST(Properties, GaugeInvariance) {
    Rng rng(50);
    for (int trial = 0; trial < 8; ++trial) {
        const Field f = trial % 2 ? Field::Real : Field::Complex;
        const bool real = f == Field::Real;
        const int m = 1 + trial % 3;
        const ChannelSpec spec = random_spec(shape(f, 3, 2, m, 10.0, 1 + trial % 2), rng);
        const InnerSamples s = random_draws(spec, 50, rng);
        const Mat null_proj = Mat::Identity(3, 3) - linalg::range_projector(spec.sigma_s());
        SolverConfig cfg;
        cfg.max_iters = 500;
        const InflationFactor W0 = initial_guess(spec, s, cfg);
        for (const Mat& W : {alg1_solve(spec, W0, cfg, s).W.w, alg2_solve(spec, W0, cfg, s).W.w}) {
            const Mat dW = random_matrix(m, 3, real, rng) * null_proj;
            EXPECT_NEAR(obj(spec, W + dW, s), obj(spec, W, s), 1e-10) << "trial " << trial;
        }
    }
}

TEST(Properties, SolversDominateFixedChoices) {
    Rng rng(51);
    for (int trial = 0; trial < 12; ++trial) {
        const Field f = trial % 2 ? Field::Real : Field::Complex;
        const int t = 2 + trial % 2, m = 1 + (trial / 2) % t;
        const ChannelSpec spec = random_spec(shape(f, t, 2, m, 10.0 * (trial % 3)), rng);
        const InnerSamples s = random_draws(spec, 300, rng);
        SolverConfig cfg;
        cfg.max_iters = 500;
        const InflationFactor W0 = initial_guess(spec, s, cfg);
        const Mat W1 = alg1_solve(spec, W0, cfg, s).W.w, W2 = alg2_solve(spec, W0, cfg, s).W.w;
        const Mat& Wb = obj(spec, W1, s) <= obj(spec, W2, s) ? W1 : W2;
        for (const Mat& C : {Mat(Mat::Zero(m, t)), w_pinv(spec).w, identity_embedding(spec).w}) {
            // Paired per-draw differences give the Monte Carlo noise of the comparison.
            const BlockMatrix bb(spec, Wb), bc(spec, C);
            std::vector<double> diff(s.size());
            for (std::size_t i = 0; i < s.size(); ++i)
                diff[i] = logdet_M(spec, bb, s[i], i) - logdet_M(spec, bc, s[i], i);
            double mean = 0, var = 0;
            for (double d : diff) mean += d;
            mean /= diff.size();
            for (double d : diff) var += (d - mean) * (d - mean);
            const double se = std::sqrt(var / (diff.size() - 1) / diff.size());
            EXPECT_LE(mean, 2 * se + 1e-12) << "trial " << trial;
        }
    }
}

// Rank measured against the scale of T T* + S, since A(T^+) may vanish entirely.
int residual_rank(const ChannelSpec& spec, const Mat& A) {
    const double tol = 1e-10 * linalg::spectral_radius_hermitian(spec.sigma_xs());
    const RVec ev = linalg::hermitian_eigenvalues(A);
    return static_cast<int>((ev.array() > tol).count());
}

TEST(Properties, ResidualRankBound) {
    Rng rng(52);
    for (int trial = 0; trial < 20; ++trial) {
        const Field f = trial % 2 ? Field::Real : Field::Complex;
        const bool real = f == Field::Real;
        const int m = 1 + trial % 3;
        const ChannelSpec spec = random_spec(shape(f, 3, 2, m, 0.0, trial % 4), rng);
        const int rank_sum = linalg::numerical_rank(spec.sigma_xs());
        for (int p = 0; p < 10; ++p) {
            const Mat A = residual_covariance(spec, random_matrix(m, 3, real, rng));
            EXPECT_GE(residual_rank(spec, A), rank_sum - m) << "trial " << trial;
        }
        const Mat A = residual_covariance(spec, w_pinv(spec).w);
        EXPECT_EQ(residual_rank(spec, A), std::max(0, rank_sum - m)) << "trial " << trial;
    }
}

TEST(Policy, KindsProduceExpectedPolicies) {
    Rng rng(53);
    const ChannelSpec spec = random_spec(shape(Field::Complex, 3, 2, 2, 10.0), rng);
    EXPECT_EQ(make_policy(SolverKind::Zero, spec).kind(), InflationPolicy::Kind::Fixed);
    EXPECT_EQ(make_policy(SolverKind::Pinv, spec).fixed_w().w, w_pinv(spec).w);
    EXPECT_EQ(make_policy(SolverKind::Identity, spec).kind(), InflationPolicy::Kind::Fixed);
    EXPECT_EQ(make_policy(SolverKind::Perfect, spec).kind(), InflationPolicy::Kind::Genie);
    EXPECT_EQ(make_policy(SolverKind::Alg1, spec).kind(), InflationPolicy::Kind::PerCell);
    EXPECT_EQ(make_policy(SolverKind::Alg2, spec).kind(), InflationPolicy::Kind::PerCell);
}

}  // namespace
}  // namespace fdpc
