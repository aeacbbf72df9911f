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

#include "fdpc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fdpc/errors.hpp"

namespace fdpc::linalg {

Mat identity(int n) { return Mat::Identity(n, n); }

Mat zeros(int rows, int cols) { return Mat::Zero(rows, cols); }

bool is_hermitian(const Mat& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

RVec hermitian_eigenvalues(const Mat& a) {
    if (a.rows() == 0) return RVec();
    Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double spectral_radius_hermitian(const Mat& a) {
    if (a.rows() == 0) return 0.0;
    return hermitian_eigenvalues(a).cwiseAbs().maxCoeff();
}

std::optional<double> try_logdet_hpd(const Mat& a, double pivot_tol) {
    const Eigen::Index n = a.rows();
    if (n == 0) return 0.0;
    Eigen::LLT<Mat> llt(a);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const double scale = a.diagonal().real().cwiseAbs().maxCoeff();
    const auto& l = llt.matrixLLT();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = l(i, i).real();
        const double pivot = d * d;
        if (!(pivot > pivot_tol * scale) || !std::isfinite(pivot)) return std::nullopt;
        acc += std::log(pivot);
    }
    return acc;
}

Mat hermitian_sqrt(const Mat& a) {
    if (a.rows() == 0) return a;
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    RVec s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

Mat pinv(const Mat& a, double rel_tol) {
    if (a.size() == 0) return Mat::Zero(a.cols(), a.rows());
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cut = rel_tol * (s.size() ? s(0) : 0.0);
    Mat out = Mat::Zero(a.cols(), a.rows());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > cut && s(i) > 0.0)
            out += svd.matrixV().col(i) * (1.0 / s(i)) * svd.matrixU().col(i).adjoint();
    }
    return out;
}

int numerical_rank(const Mat& a, double rel_tol) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(a);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0)) ++rank;
    return rank;
}

Mat range_factor(const Mat& a, double rel_tol) {
    const Eigen::Index n = a.rows();
    if (n == 0) return Mat::Zero(0, 0);
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    const auto& ev = es.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    int k = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (ev(i) > rel_tol * top && ev(i) > 0.0) ++k;
    Mat f(n, k);
    int col = 0;
    // Largest eigenvalues first.
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        if (ev(i) > rel_tol * top && ev(i) > 0.0) f.col(col++) = es.eigenvectors().col(i) * std::sqrt(ev(i));
    }
    return f;
}

Mat range_projector(const Mat& a, double rel_tol) {
    const Eigen::Index n = a.rows();
    Mat f = range_factor(a, rel_tol);
    if (f.cols() == 0) return Mat::Zero(n, n);
    // Orthonormalize the factor columns.
    Eigen::HouseholderQR<Mat> qr(f);
    Mat q = qr.householderQ() * Mat::Identity(n, f.cols());
    return q * q.adjoint();
}

Mat clip_psd(const Mat& a, const char* what) {
    if (!is_hermitian(a, 1e-12))
        throw ConfigError(std::string(what) + " is not Hermitian");
    Mat h = 0.5 * (a + a.adjoint());
    if (h.rows() == 0) return h;
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    RVec ev = es.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    if (ev.minCoeff() < -1e-10 * top)
        throw ConfigError(std::string(what) + " is not positive semi-definite");
    if (ev.minCoeff() >= 0.0) return h;
    ev = ev.cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

bool is_real(const Mat& a, double tol) { return a.size() == 0 || a.imag().cwiseAbs().maxCoeff() <= tol; }

}  // namespace fdpc::linalg
