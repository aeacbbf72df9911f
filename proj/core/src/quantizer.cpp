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

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/minima.hpp>

#include "fdpc/errors.hpp"
#include "fdpc/model.hpp"

namespace fdpc {
namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double pdf(double x) { return std::isinf(x) ? 0.0 : kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double cdf(double x) { return 0.5 * boost::math::erfc(-x / std::sqrt(2.0)); }
// x * pdf(x), with the limits at +-infinity.
double xpdf(double x) { return std::isinf(x) ? 0.0 : x * pdf(x); }

void check_bits(int bits) {
    if (bits < 1 || bits > 16) throw ConfigError("quantizer bits out of range: " + std::to_string(bits));
}

}  // namespace

int quantizer_bin(double x, int bits, double step) {
    const int L = 1 << bits;
    const double k = std::floor(x / step + 0.5 * L);
    if (!(k >= 0.0)) return 0;  // also catches NaN
    if (k >= L - 1) return L - 1;
    return static_cast<int>(k);
}

double quantizer_level(int bin, int bits, double step) {
    const int L = 1 << bits;
    return (bin - 0.5 * (L - 1)) * step;
}

double quantize_scalar(double x, int bits, double step) {
    return quantizer_level(quantizer_bin(x, bits, step), bits, step);
}

double quantizer_mse(int bits, double step) {
    check_bits(bits);
    const int L = 1 << bits;
    const double inf = std::numeric_limits<double>::infinity();
    double mse = 0.0;
    for (int k = 0; k < L; ++k) {
        const double lo = k == 0 ? -inf : (k - 0.5 * L) * step;
        const double hi = k == L - 1 ? inf : (k - 0.5 * L + 1.0) * step;
        const double y = quantizer_level(k, bits, step);
        const double mass = cdf(hi) - cdf(lo);
        // int_lo^hi (x - y)^2 phi(x) dx
        mse += mass * (1.0 + y * y) + (xpdf(lo) - xpdf(hi)) - 2.0 * y * (pdf(lo) - pdf(hi));
    }
    return mse;
}

double design_uniform_quantizer(int bits) {
    if (bits < 1 || bits > 6) throw ConfigError("quantizer design supports 1 <= B <= 6, got " + std::to_string(bits));
    auto f = [bits](double step) { return quantizer_mse(bits, step); };
    // The optimal step shrinks roughly like 4 / 2^B; [1e-3, 4] brackets every supported B.
    const auto [step, value] = boost::math::tools::brent_find_minima(f, 1e-3, 4.0, 40);
    (void)value;
    return step;
}

}  // namespace fdpc
