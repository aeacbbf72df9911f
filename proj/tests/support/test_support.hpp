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

#include <random>

#include "fdpc/model.hpp"

namespace fdpc::testing {

inline Mat random_matrix(int rows, int cols, bool real, Rng& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    Mat a(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) a(i, j) = real ? cd(n01(rng), 0.0) : cd(n01(rng), n01(rng));
    return a;
}

/// Hermitian p.s.d. of the given rank, scaled to trace tr.
inline Mat random_psd(int n, int rank, double tr, bool real, Rng& rng) {
    if (rank == 0 || tr == 0.0) return Mat::Zero(n, n);
    const Mat g = random_matrix(n, rank, real, rng);
    Mat s = g * g.adjoint();
    return s * (tr / s.trace().real());
}

struct SpecShape {
    Field field = Field::Complex;
    int t = 2, r = 2, m = 2;
    double P = 10.0, Q = 10.0, N = 1.0;
    int rank_s = -1;  ///< -1: full rank
};

/// Random T (trace P), Sigma_S of the requested rank (trace Q) and a random p.d. Sigma_Z (trace N).
inline ChannelSpec random_spec(const SpecShape& s, Rng& rng) {
    const bool real = s.field == Field::Real;
    Mat T = random_matrix(s.t, s.m, real, rng);
    T *= std::sqrt(s.P / T.squaredNorm());
    const Mat S = random_psd(s.t, s.rank_s < 0 ? s.t : s.rank_s, s.Q, real, rng);
    Mat Z = random_psd(s.r, s.r, 1.0, real, rng) + Mat::Identity(s.r, s.r);
    Z *= s.N / Z.trace().real();
    return ChannelSpec::create(s.field, T, S, Z, s.P);
}

inline InnerSamples random_draws(const ChannelSpec& spec, std::size_t n, Rng& rng) {
    InnerSamples out(spec.dims().r, spec.dims().t);
    const FadingModel f =
        spec.field() == Field::Real ? FadingModel::iid_real_gaussian() : FadingModel::iid_complex_gaussian();
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample_H(f, spec.dims(), rng));
    return out;
}

inline InnerSamples single_draw(const Mat& H) {
    InnerSamples out(static_cast<int>(H.rows()), static_cast<int>(H.cols()));
    out.push_back(H);
    return out;
}

/// Scalar spec t = r = m = 1 with T = sqrt(P), Sigma_S = q, Sigma_Z = n.
inline ChannelSpec scalar_spec(double P, double q, double n, Field field = Field::Real) {
    Mat T(1, 1), S(1, 1), Z(1, 1);
    T(0, 0) = std::sqrt(P);
    S(0, 0) = q;
    Z(0, 0) = n;
    return ChannelSpec::create(field, T, S, Z, P);
}

inline Mat scalar(double v) {
    Mat a(1, 1);
    a(0, 0) = v;
    return a;
}

}  // namespace fdpc::testing
