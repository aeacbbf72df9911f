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

#include <complex>
#include <optional>

#include <Eigen/Dense>

namespace fdpc {

using cd = std::complex<double>;

/// Largest matrix dimension handled by the small-matrix types below. Block
/// matrices are (m + r) x (m + r), so antenna counts are capped at kMaxAntennas.
inline constexpr int kMaxDim = 16;
inline constexpr int kMaxAntennas = 8;

// Dynamic size, fixed capacity: no heap traffic in the per-sample hot loops.
using Mat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using RVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

namespace linalg {

Mat identity(int n);
Mat zeros(int rows, int cols);

bool is_hermitian(const Mat& a, double tol = 1e-12);

/// Largest absolute eigenvalue of a Hermitian matrix.
double spectral_radius_hermitian(const Mat& a);

/// log det of a Hermitian positive definite matrix via Cholesky. Returns
/// nullopt when factorization fails or a pivot drops below
/// pivot_tol * (largest diagonal entry).
std::optional<double> try_logdet_hpd(const Mat& a, double pivot_tol = 1e-12);

/// Hermitian p.s.d. square root (eigenvalues below zero are clipped).
Mat hermitian_sqrt(const Mat& a);

/// Moore-Penrose pseudo-inverse; singular values below rel_tol * sigma_max are dropped.
Mat pinv(const Mat& a, double rel_tol = 1e-10);

/// Numerical rank with relative singular-value cutoff.
int numerical_rank(const Mat& a, double rel_tol = 1e-10);

/// Factor F (n x k, k = numerical rank) with F F* = a for Hermitian p.s.d. a.
Mat range_factor(const Mat& a, double rel_tol = 1e-10);

/// Orthogonal projector onto the column space of Hermitian p.s.d. a.
Mat range_projector(const Mat& a, double rel_tol = 1e-10);

/// Validates Hermitian p.s.d. input and clips tiny negative eigenvalues
/// (>= -1e-10 * sigma_max) to zero. Throws ConfigError otherwise.
Mat clip_psd(const Mat& a, const char* what);

/// Eigenvalues of a Hermitian matrix, ascending.
RVec hermitian_eigenvalues(const Mat& a);

bool is_real(const Mat& a, double tol = 0.0);

}  // namespace linalg
}  // namespace fdpc
