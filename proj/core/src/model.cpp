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

#include "fdpc/model.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "fdpc/errors.hpp"
#include "fdpc/parallel.hpp"

namespace fdpc {

void Dimensions::validate() const {
    if (t < 1 || r < 1 || m < 1) throw ConfigError("dimensions must be positive");
    if (m > t) throw ConfigError("rank bound m must not exceed t");
    if (t > kMaxAntennas || r > kMaxAntennas)
        throw ConfigError("at most " + std::to_string(kMaxAntennas) + " antennas per side are supported");
}

// ---------------------------------------------------------------------------
// ChannelSpec

ChannelSpec ChannelSpec::create(Field field, const Mat& T, const Mat& sigma_s, const Mat& sigma_z, double P) {
    ChannelSpec spec;
    spec.dims_ = Dimensions{static_cast<int>(T.rows()), static_cast<int>(sigma_z.rows()), static_cast<int>(T.cols())};
    spec.dims_.validate();
    if (sigma_s.rows() != T.rows() || sigma_s.cols() != T.rows())
        throw ConfigError("sigma_s must be t x t");
    if (sigma_z.cols() != sigma_z.rows()) throw ConfigError("sigma_z must be square");
    if (!(P >= 0.0) || !std::isfinite(P)) throw ConfigError("power P must be finite and nonnegative");
    if (!T.allFinite() || !sigma_s.allFinite() || !sigma_z.allFinite())
        throw ConfigError("channel matrices must be finite");
    if (field == Field::Real &&
        (!linalg::is_real(T) || !linalg::is_real(sigma_s) || !linalg::is_real(sigma_z)))
        throw ConfigError("real-field spec requires real matrices");

    spec.field_ = field;
    spec.T_ = T;
    spec.sigma_s_ = linalg::clip_psd(sigma_s, "sigma_s");
    spec.sigma_z_ = linalg::clip_psd(sigma_z, "sigma_z");
    spec.sigma_x_ = T * T.adjoint();
    spec.sigma_xs_ = spec.sigma_x_ + spec.sigma_s_;
    spec.P_ = P;
    spec.Q_ = spec.sigma_s_.trace().real();
    spec.N_ = spec.sigma_z_.trace().real();

    const double power = spec.sigma_x_.trace().real();
    if (power > P * (1.0 + 1e-9) + 1e-300) throw ConfigError("trace(T T*) exceeds the power budget P");
    auto ld = linalg::try_logdet_hpd(spec.sigma_z_);
    if (!(spec.N_ > 0.0) || !ld) throw ConfigError("sigma_z must be positive definite");
    spec.logdet_sigma_z_ = *ld;
    return spec;
}

ChannelSpec ChannelSpec::with_factor(const Mat& T) const {
    return create(field_, T, sigma_s_, sigma_z_, P_);
}

// ---------------------------------------------------------------------------
// FadingModel

FadingModel FadingModel::iid_complex_gaussian() {
    FadingModel f;
    f.kind_ = Kind::IidComplexGaussian;
    return f;
}

FadingModel FadingModel::iid_real_gaussian() {
    FadingModel f;
    f.kind_ = Kind::IidRealGaussian;
    return f;
}

FadingModel FadingModel::iid_uniform_complex() {
    FadingModel f;
    f.kind_ = Kind::IidUniformComplex;
    return f;
}

FadingModel FadingModel::correlated_rayleigh(const Mat& rx_correlation, const Mat& tx_correlation) {
    for (const Mat* c : {&rx_correlation, &tx_correlation}) {
        if (c->rows() != c->cols() || c->rows() == 0) throw ConfigError("correlation matrix must be square");
        if (!linalg::is_hermitian(*c, 1e-12)) throw ConfigError("correlation matrix is not Hermitian");
        if (!linalg::try_logdet_hpd(*c)) throw ConfigError("correlation matrix is not positive definite");
    }
    FadingModel f;
    f.kind_ = Kind::CorrelatedRayleigh;
    f.rx_sqrt_ = linalg::hermitian_sqrt(rx_correlation);
    f.tx_sqrt_ = linalg::hermitian_sqrt(tx_correlation);
    return f;
}

std::string FadingModel::label() const {
    switch (kind_) {
        case Kind::IidComplexGaussian: return "iid_complex_gaussian";
        case Kind::IidRealGaussian: return "iid_real_gaussian";
        case Kind::CorrelatedRayleigh: return "correlated_rayleigh";
        case Kind::IidUniformComplex: return "iid_uniform_complex";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// CsitModel

CsitModel CsitModel::perfect() {
    CsitModel c;
    c.kind_ = Kind::Perfect;
    return c;
}

CsitModel CsitModel::none() { return CsitModel{}; }

CsitModel CsitModel::quantized(int bits, double step) {
    if (bits < 1 || bits > 16) throw ConfigError("quantizer bits must be in [1, 16]");
    if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("quantizer step must be positive");
    CsitModel c;
    c.kind_ = Kind::Quantized;
    c.bits_ = bits;
    c.step_ = step;
    return c;
}

CsitModel CsitModel::quantized_for(int bits, const FadingModel& fading) {
    const double step = design_uniform_quantizer(bits);
    return quantized(bits, fading.is_real() ? step : step / std::sqrt(2.0));
}

std::string CsitModel::label() const {
    switch (kind_) {
        case Kind::Perfect: return "perfect";
        case Kind::NoCsit: return "none";
        case Kind::Quantized: return "B=" + std::to_string(bits_);
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

double entry_sigma(const FadingModel& model) { return model.is_real() ? 1.0 : std::sqrt(0.5); }

// Uniform in the open interval (0, 1) from 53 random bits.
double open_uniform(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal truncated to [a, b] by inverse CDF, working on the side of
// zero where the tail probabilities stay well conditioned.
double truncated_standard_normal(double a, double b, Rng& rng) {
    using boost::math::erfc;
    using boost::math::erfc_inv;
    constexpr double kSqrt2 = 1.4142135623730950488;
    if (a >= 0.0) {
        // Upper tail: Qc(x) = P(Z > x) = erfc(x / sqrt2) / 2.
        const double qa = 0.5 * erfc(a / kSqrt2);
        const double qb = std::isinf(b) ? 0.0 : 0.5 * erfc(b / kSqrt2);
        const double u = qb + (qa - qb) * open_uniform(rng);
        return kSqrt2 * erfc_inv(2.0 * u);
    }
    if (b <= 0.0) return -truncated_standard_normal(-b, -a, rng);
    const double pa = std::isinf(a) ? 0.0 : 0.5 * erfc(-a / kSqrt2);
    const double pb = std::isinf(b) ? 1.0 : 0.5 * erfc(-b / kSqrt2);
    const double u = pa + (pb - pa) * open_uniform(rng);
    return -kSqrt2 * erfc_inv(2.0 * u);
}

double sample_in_bin(double level, const CsitModel& csit, double sigma, Rng& rng) {
    const int bits = csit.bits();
    const double step = csit.step();
    const int L = csit.levels();
    const int bin = static_cast<int>(std::lround(level / step + 0.5 * (L - 1)));
    if (bin < 0 || bin >= L || std::abs(quantizer_level(bin, bits, step) - level) > 1e-9 * step * L)
        throw ConfigError("H-hat entry is not a reconstruction level of the quantizer");
    const double inf = std::numeric_limits<double>::infinity();
    const double lo = bin == 0 ? -inf : (bin - 0.5 * L) * step;
    const double hi = bin == L - 1 ? inf : (bin - 0.5 * L + 1.0) * step;
    return sigma * truncated_standard_normal(lo / sigma, hi / sigma, rng);
}

}  // namespace

Mat sample_H(const FadingModel& model, const Dimensions& dims, Rng& rng) {
    Mat H(dims.r, dims.t);
    switch (model.kind()) {
        case FadingModel::Kind::IidRealGaussian: {
            std::normal_distribution<double> n01(0.0, 1.0);
            for (int j = 0; j < dims.t; ++j)
                for (int i = 0; i < dims.r; ++i) H(i, j) = cd(n01(rng), 0.0);
            return H;
        }
        case FadingModel::Kind::IidComplexGaussian:
        case FadingModel::Kind::CorrelatedRayleigh: {
            std::normal_distribution<double> half(0.0, std::sqrt(0.5));
            for (int j = 0; j < dims.t; ++j)
                for (int i = 0; i < dims.r; ++i) {
                    const double re = half(rng);
                    const double im = half(rng);
                    H(i, j) = cd(re, im);
                }
            if (model.kind() == FadingModel::Kind::CorrelatedRayleigh) {
                if (model.rx_sqrt().rows() != dims.r || model.tx_sqrt().rows() != dims.t)
                    throw ConfigError("correlation matrix size does not match antenna counts");
                return model.rx_sqrt() * H * model.tx_sqrt();
            }
            return H;
        }
        case FadingModel::Kind::IidUniformComplex: {
            std::uniform_real_distribution<double> u01(0.0, 1.0);
            for (int j = 0; j < dims.t; ++j)
                for (int i = 0; i < dims.r; ++i) {
                    const double re = u01(rng);
                    const double im = u01(rng);
                    H(i, j) = cd(re, im);
                }
            return H;
        }
    }
    return H;
}

Mat quantize_H(const Mat& H, const CsitModel& csit) {
    if (csit.kind() != CsitModel::Kind::Quantized) throw ConfigError("quantize_H requires a quantized CSIT model");
    // A real-valued channel stays real; otherwise both parts are quantized.
    const bool real = linalg::is_real(H);
    Mat out(H.rows(), H.cols());
    for (Eigen::Index j = 0; j < H.cols(); ++j)
        for (Eigen::Index i = 0; i < H.rows(); ++i) {
            const double re = quantize_scalar(H(i, j).real(), csit.bits(), csit.step());
            const double im = real ? 0.0 : quantize_scalar(H(i, j).imag(), csit.bits(), csit.step());
            out(i, j) = cd(re, im);
        }
    return out;
}

Mat sample_H_given_Hhat(const Mat& h_hat, const CsitModel& csit, const FadingModel& model, Rng& rng) {
    if (csit.kind() != CsitModel::Kind::Quantized)
        throw ConfigError("conditional sampling requires a quantized CSIT model");
    if (!model.is_iid_gaussian())
        throw ConfigError("conditional sampling supports only i.i.d. Gaussian fading, got " + model.label());
    const double sigma = entry_sigma(model);
    Mat H(h_hat.rows(), h_hat.cols());
    for (Eigen::Index j = 0; j < h_hat.cols(); ++j)
        for (Eigen::Index i = 0; i < h_hat.rows(); ++i) {
            const double re = sample_in_bin(h_hat(i, j).real(), csit, sigma, rng);
            const double im = model.is_real() ? 0.0 : sample_in_bin(h_hat(i, j).imag(), csit, sigma, rng);
            H(i, j) = cd(re, im);
        }
    return H;
}

// ---------------------------------------------------------------------------
// InnerSamples / SampleBank

void InnerSamples::push_back(const Mat& H) {
    if (H.rows() != r_ || H.cols() != t_) throw std::invalid_argument("InnerSamples: draw has wrong shape");
    for (Eigen::Index j = 0; j < H.cols(); ++j)
        for (Eigen::Index i = 0; i < H.rows(); ++i) data_.push_back(H(i, j));
}

Mat InnerSamples::operator[](std::size_t i) const {
    const std::size_t stride = static_cast<std::size_t>(r_ * t_);
    return Eigen::Map<const Eigen::MatrixXcd>(data_.data() + i * stride, r_, t_);
}

Mat InnerSamples::mean() const {
    Mat acc = Mat::Zero(r_, t_);
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) acc += (*this)[i];
    if (n > 0) acc /= static_cast<double>(n);
    return acc;
}

InnerSamples InnerSamples::concat(const InnerSamples& other) const {
    if (other.r_ != r_ || other.t_ != t_) throw std::invalid_argument("InnerSamples: shape mismatch in concat");
    InnerSamples out(r_, t_);
    out.data_ = data_;
    out.data_.insert(out.data_.end(), other.data_.begin(), other.data_.end());
    return out;
}

std::size_t SampleBank::total_draws() const {
    std::size_t n = 0;
    for (const auto& c : cells_) n += c.draws.size();
    return n;
}

std::string SampleBank::serialize() const {
    std::string out;
    auto put = [&out](const void* p, std::size_t bytes) { out.append(static_cast<const char*>(p), bytes); };
    const std::uint64_t header[4] = {seed_, n_outer_, n_inner_, cells_.size()};
    put(header, sizeof header);
    for (const auto& cell : cells_) {
        for (Eigen::Index k = 0; k < cell.h_hat.size(); ++k) put(&cell.h_hat.data()[k], sizeof(cd));
        const auto& raw = cell.draws.raw();
        put(raw.data(), raw.size() * sizeof(cd));
    }
    return out;
}

SampleBank SampleBank::from_draws(InnerSamples draws, const CsitModel& csit, std::uint64_t seed) {
    SampleBank bank;
    bank.seed_ = seed;
    bank.csit_ = csit;
    bank.n_outer_ = 1;
    bank.n_inner_ = draws.size();
    SampleCell cell;
    cell.h_hat = csit.kind() == CsitModel::Kind::NoCsit ? Mat::Zero(draws.rows(), draws.cols()) : draws.mean();
    cell.draws = std::move(draws);
    bank.cells_.push_back(std::move(cell));
    return bank;
}

Rng cell_engine(std::uint64_t seed, std::uint64_t cell) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(cell >> 32), 0x5eedu};
    return Rng(seq);
}

SampleBank build_sample_bank(const ChannelSpec& spec, const FadingModel& model, const CsitModel& csit,
                             std::size_t n_outer, std::size_t n_inner, std::uint64_t seed) {
    if (n_outer < 1 || n_inner < 1) throw ConfigError("sample counts must be at least 1");
    const Dimensions& dims = spec.dims();
    if (spec.field() == Field::Real && !model.is_real())
        throw ConfigError("real-field spec requires iid_real_gaussian fading");
    if (model.kind() == FadingModel::Kind::CorrelatedRayleigh &&
        (model.rx_sqrt().rows() != dims.r || model.tx_sqrt().rows() != dims.t))
        throw ConfigError("correlation matrix size does not match antenna counts");
    if (csit.kind() == CsitModel::Kind::Quantized && !model.is_iid_gaussian())
        throw ConfigError("quantized CSIT supports only i.i.d. Gaussian fading, got " + model.label());

    SampleBank bank;
    bank.seed_ = seed;
    bank.csit_ = csit;

    switch (csit.kind()) {
        case CsitModel::Kind::NoCsit: {
            bank.n_outer_ = 1;
            bank.n_inner_ = n_inner;
            SampleCell cell{Mat::Zero(dims.r, dims.t), InnerSamples(dims.r, dims.t)};
            cell.draws.reserve(n_inner);
            Rng rng = cell_engine(seed, 0);
            for (std::size_t i = 0; i < n_inner; ++i) cell.draws.push_back(sample_H(model, dims, rng));
            bank.cells_.push_back(std::move(cell));
            break;
        }
        case CsitModel::Kind::Perfect: {
            bank.n_outer_ = n_outer;
            bank.n_inner_ = 1;
            bank.cells_.resize(n_outer);
            parallel_for(n_outer, [&](std::size_t c) {
                Rng rng = cell_engine(seed, c);
                SampleCell cell{Mat(), InnerSamples(dims.r, dims.t)};
                cell.h_hat = sample_H(model, dims, rng);
                cell.draws.push_back(cell.h_hat);
                bank.cells_[c] = std::move(cell);
            });
            break;
        }
        case CsitModel::Kind::Quantized: {
            bank.n_outer_ = n_outer;
            bank.n_inner_ = n_inner;
            bank.cells_.resize(n_outer);
            parallel_for(n_outer, [&](std::size_t c) {
                Rng rng = cell_engine(seed, c);
                SampleCell cell{Mat(), InnerSamples(dims.r, dims.t)};
                cell.h_hat = quantize_H(sample_H(model, dims, rng), csit);
                cell.draws.reserve(n_inner);
                for (std::size_t i = 0; i < n_inner; ++i)
                    cell.draws.push_back(sample_H_given_Hhat(cell.h_hat, csit, model, rng));
                bank.cells_[c] = std::move(cell);
            });
            break;
        }
    }
    return bank;
}

}  // namespace fdpc
