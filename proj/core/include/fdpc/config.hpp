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
#include <optional>
#include <string>
#include <string_view>

#include "fdpc/model.hpp"

namespace fdpc {

struct FadingConfig {
    /// iid_complex_gaussian | iid_real_gaussian | correlated_rayleigh | iid_uniform_complex
    std::string variant = "iid_complex_gaussian";
    // correlated_rayleigh: explicit matrix, exponential coefficient rho (R_ij = rho^|i-j|),
    // or a random unit-diagonal correlation from a seed. Exactly one per side.
    std::optional<Mat> rx_correlation, tx_correlation;
    std::optional<double> rx_rho, tx_rho;
    std::optional<std::uint64_t> rx_seed, tx_seed;
};

struct CsitConfig {
    std::string variant = "none";  ///< none | perfect | quantized
    int bits = 0;
    std::optional<double> step;  ///< defaults to the designed MSE-optimal step
};

struct InterferenceConfig {
    /// zero | scaled_identity | random (rank, seed) | matrix. Shapes are trace-normalized, then scaled to Q.
    std::string kind = "scaled_identity";
    int rank = 0;
    std::uint64_t seed = 0;
    Mat matrix;
};

struct InputConfig {
    std::string kind = "scaled_identity";  ///< scaled_identity (m = t) | factor (t x m matrix, scaled to trace P)
    Mat matrix;
};

struct MonteCarloConfig {
    std::size_t n_outer = 200;
    std::size_t n_inner = 20000;
    std::uint64_t seed = 1;
};

/// The JSON experiment description: antenna counts, SNR and interference
/// level, field, fading, CSIT, covariance shapes and sample counts.
struct ExperimentConfig {
    std::string name;
    int t = 2, r = 2, m = 2;
    double snr_db = 10.0;
    double q_over_p = 1.0;
    double n = 1.0;  ///< noise trace N; Sigma_Z = (N / r) I
    Field field = Field::Complex;
    FadingConfig fading;
    CsitConfig csit;
    InterferenceConfig sigma_s;
    InputConfig sigma_x;
    MonteCarloConfig mc;

    Dimensions dims() const { return Dimensions{t, r, m}; }

    /// Spec at this config's SNR, or at an overriding SNR (P = N 10^(snr/10), Q = q_over_p P).
    ChannelSpec channel() const { return channel_at(snr_db); }
    ChannelSpec channel_at(double snr_db) const;
    FadingModel fading_model() const;
    CsitModel csit_model() const;

    /// Unit-trace shape of Sigma_S (zero matrix for kind zero).
    Mat interference_shape() const;
    /// Factor with trace(F F*) = 1.
    Mat input_shape() const;
};

/// Strict parse: unknown fields, wrong types and inconsistent values raise ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON (sorted keys, defaults filled in).
std::string to_json(const ExperimentConfig& config);

/// 64-bit FNV-1a of the canonical JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace fdpc
