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

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fdpc/linalg.hpp"

namespace fdpc {

using Rng = std::mt19937_64;

enum class Field { Real, Complex };

struct Dimensions {
    int t = 1;  ///< transmit antennas
    int r = 1;  ///< receive antennas
    int m = 1;  ///< rank bound of the input covariance, 1 <= m <= t

    void validate() const;
    friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

/// Channel Y = H(X + S) + Z with Sigma_X = T T*, Sigma_S, Sigma_Z and their traces.
/// Immutable once built; use with_factor() to derive a spec with a new T.
class ChannelSpec {
public:
    /// Validates all invariants; Q and N are the traces of sigma_s and sigma_z.
    /// P is the power budget (trace(T T*) may be below it).
    static ChannelSpec create(Field field, const Mat& T, const Mat& sigma_s, const Mat& sigma_z, double P);

    ChannelSpec with_factor(const Mat& T) const;

    const Dimensions& dims() const { return dims_; }
    Field field() const { return field_; }
    const Mat& T() const { return T_; }
    const Mat& sigma_s() const { return sigma_s_; }
    const Mat& sigma_z() const { return sigma_z_; }
    const Mat& sigma_x() const { return sigma_x_; }
    /// T T* + Sigma_S, reused by every per-sample evaluation.
    const Mat& sigma_xs() const { return sigma_xs_; }
    double P() const { return P_; }
    double Q() const { return Q_; }
    double N() const { return N_; }
    double snr() const { return P_ / N_; }
    double logdet_sigma_z() const { return logdet_sigma_z_; }

private:
    ChannelSpec() = default;

    Dimensions dims_;
    Field field_ = Field::Complex;
    Mat T_, sigma_s_, sigma_z_, sigma_x_, sigma_xs_;
    double P_ = 0.0, Q_ = 0.0, N_ = 0.0, logdet_sigma_z_ = 0.0;
};

class FadingModel {
public:
    enum class Kind { IidComplexGaussian, IidRealGaussian, CorrelatedRayleigh, IidUniformComplex };

    static FadingModel iid_complex_gaussian();
    static FadingModel iid_real_gaussian();
    /// H = R_r^{1/2} G R_t^{1/2}; both correlations must be Hermitian p.d.
    static FadingModel correlated_rayleigh(const Mat& rx_correlation, const Mat& tx_correlation);
    /// Entries i.i.d. Unif[0,1] + j Unif[0,1].
    static FadingModel iid_uniform_complex();

    Kind kind() const { return kind_; }
    bool is_iid_gaussian() const { return kind_ == Kind::IidComplexGaussian || kind_ == Kind::IidRealGaussian; }
    bool is_real() const { return kind_ == Kind::IidRealGaussian; }
    const Mat& rx_sqrt() const { return rx_sqrt_; }
    const Mat& tx_sqrt() const { return tx_sqrt_; }
    std::string label() const;

private:
    Kind kind_ = Kind::IidComplexGaussian;
    Mat rx_sqrt_, tx_sqrt_;
};

class CsitModel {
public:
    enum class Kind { Perfect, NoCsit, Quantized };

    static CsitModel perfect();
    static CsitModel none();
    /// Equally spaced 2^bits-level quantizer with the given step, applied per real scalar.
    static CsitModel quantized(int bits, double step);
    /// Quantizer designed for the entry law of `fading`: the standard-normal
    /// MSE-optimal step, scaled by 1/sqrt(2) for complex entries.
    static CsitModel quantized_for(int bits, const FadingModel& fading);

    Kind kind() const { return kind_; }
    int bits() const { return bits_; }
    double step() const { return step_; }
    int levels() const { return 1 << bits_; }
    /// "none", "perfect" or "B=<bits>".
    std::string label() const;

private:
    Kind kind_ = Kind::NoCsit;
    int bits_ = 0;
    double step_ = 0.0;
};

// ---------------------------------------------------------------------------
// Quantizer

/// MSE of the 2^bits-level equally spaced quantizer (midpoint thresholds,
/// unbounded outer bins) for a standard normal source, in closed form.
double quantizer_mse(int bits, double step);

/// Step minimizing quantizer_mse; 1 <= bits <= 6.
double design_uniform_quantizer(int bits);

/// Index of the bin containing x, in [0, 2^bits).
int quantizer_bin(double x, int bits, double step);
double quantizer_level(int bin, int bits, double step);
double quantize_scalar(double x, int bits, double step);

/// Per-entry quantization; complex entries quantize real and imaginary parts independently.
Mat quantize_H(const Mat& H, const CsitModel& csit);

// ---------------------------------------------------------------------------
// Sampling

Mat sample_H(const FadingModel& model, const Dimensions& dims, Rng& rng);

/// Draws H from the prior truncated, entry by entry, to the quantizer bins
/// whose levels equal the entries of h_hat. Only i.i.d. Gaussian fading.
Mat sample_H_given_Hhat(const Mat& h_hat, const CsitModel& csit, const FadingModel& model, Rng& rng);

/// A list of r x t channel draws stored contiguously.
class InnerSamples {
public:
    InnerSamples() = default;
    InnerSamples(int r, int t) : r_(r), t_(t) {}

    void push_back(const Mat& H);
    void reserve(std::size_t n) { data_.reserve(n * static_cast<std::size_t>(r_ * t_)); }
    std::size_t size() const { return r_ * t_ == 0 ? 0 : data_.size() / static_cast<std::size_t>(r_ * t_); }
    bool empty() const { return size() == 0; }
    int rows() const { return r_; }
    int cols() const { return t_; }
    Mat operator[](std::size_t i) const;
    Mat mean() const;
    const std::vector<cd>& raw() const { return data_; }

    /// Concatenation, in order.
    InnerSamples concat(const InnerSamples& other) const;

private:
    int r_ = 0, t_ = 0;
    std::vector<cd> data_;
};

struct SampleCell {
    Mat h_hat;  ///< transmitter-side estimate (zero matrix for NoCsit)
    InnerSamples draws;
};

/// Fixed, seeded fading draws arranged as outer cells (one per H-hat) of
/// inner draws H | H-hat. Shared across all candidate evaluations.
class SampleBank {
public:
    const std::vector<SampleCell>& cells() const { return cells_; }
    std::size_t n_cells() const { return cells_.size(); }
    std::size_t n_outer() const { return n_outer_; }
    std::size_t n_inner() const { return n_inner_; }
    std::uint64_t seed() const { return seed_; }
    const CsitModel& csit() const { return csit_; }
    std::size_t total_draws() const;

    /// Raw bytes of every stored value, in cell order, for reproducibility checks.
    std::string serialize() const;

    /// Single-cell bank wrapping the given draws (used for degenerate or handcrafted banks).
    static SampleBank from_draws(InnerSamples draws, const CsitModel& csit = CsitModel::none(),
                                 std::uint64_t seed = 0);

private:
    friend SampleBank build_sample_bank(const ChannelSpec&, const FadingModel&, const CsitModel&, std::size_t,
                                        std::size_t, std::uint64_t);
    std::vector<SampleCell> cells_;
    std::size_t n_outer_ = 0, n_inner_ = 0;
    std::uint64_t seed_ = 0;
    CsitModel csit_;
};

/// Deterministic in all arguments and independent of thread count: each cell
/// owns an engine seeded from (seed, cell index) and draws sequentially.
/// NoCsit collapses to one cell of n_inner draws; Perfect to n_outer cells of one draw.
SampleBank build_sample_bank(const ChannelSpec& spec, const FadingModel& model, const CsitModel& csit,
                             std::size_t n_outer, std::size_t n_inner, std::uint64_t seed);

/// Engine for one cell of a bank.
Rng cell_engine(std::uint64_t seed, std::uint64_t cell);

}  // namespace fdpc
