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

#include "fdpc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fdpc/errors.hpp"
#include "json.hpp"

namespace fdpc {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!ok.count(it.key())) throw ConfigError("unknown field '" + it.key() + "' in " + where);
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing field '" + std::string(key) + "' in " + where);
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field '" + std::string(key) + "' in " + where + " has the wrong type");
    }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
    return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

std::uint64_t get_seed(const json& obj, const char* key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        throw ConfigError("field '" + std::string(key) + "' in " + where + " must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

Mat parse_matrix(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty() || !v[0].is_array() || v[0].empty())
        throw ConfigError(where + " must be a nonempty array of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    const auto cols = static_cast<Eigen::Index>(v[0].size());
    if (rows > kMaxDim || cols > kMaxDim) throw ConfigError(where + " is too large");
    Mat out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ConfigError(where + " has ragged rows");
        for (Eigen::Index j = 0; j < cols; ++j) {
            const json& e = row[static_cast<std::size_t>(j)];
            if (e.is_number()) {
                out(i, j) = cd(e.get<double>(), 0.0);
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                out(i, j) = cd(e[0].get<double>(), e[1].get<double>());
            } else {
                throw ConfigError(where + " entries must be numbers or [re, im] pairs");
            }
        }
    }
    return out;
}

json matrix_to_json(const Mat& a) {
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

Mat random_gaussian(int rows, int cols, bool real, std::uint64_t seed, std::uint64_t stream) {
    Rng rng = cell_engine(seed, stream);
    std::normal_distribution<double> n01(0.0, 1.0);
    Mat g(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) {
            const double re = n01(rng);
            const double im = real ? 0.0 : n01(rng);
            g(i, j) = cd(re, im);
        }
    return g;
}

Mat exponential_correlation(int n, double rho) {
    Mat c(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(i, j) = std::pow(rho, std::abs(i - j));
    return c;
}

Mat random_correlation(int n, std::uint64_t seed) {
    Mat g = random_gaussian(n, n, false, seed, 0xC022u);
    Mat w = g * g.adjoint();
    RVec d = w.diagonal().real().cwiseSqrt().cwiseInverse();
    return d.asDiagonal() * w * d.asDiagonal();
}

Mat side_correlation(const std::optional<Mat>& explicit_matrix, const std::optional<double>& rho,
                     const std::optional<std::uint64_t>& seed, int n, const char* side) {
    const int given = int(explicit_matrix.has_value()) + int(rho.has_value()) + int(seed.has_value());
    if (given != 1)
        throw ConfigError(std::string("correlated_rayleigh needs exactly one of ") + side + "_correlation, " + side +
                          "_rho, " + side + "_seed");
    if (explicit_matrix) {
        if (explicit_matrix->rows() != n || explicit_matrix->cols() != n)
            throw ConfigError(std::string(side) + "_correlation has the wrong size");
        return *explicit_matrix;
    }
    if (rho) {
        if (!(*rho >= 0.0 && *rho < 1.0)) throw ConfigError(std::string(side) + "_rho must be in [0, 1)");
        return exponential_correlation(n, *rho);
    }
    return random_correlation(n, *seed);
}

}  // namespace

// ---------------------------------------------------------------------------

Mat ExperimentConfig::interference_shape() const {
    const bool real = field == Field::Real;
    if (sigma_s.kind == "zero") return Mat::Zero(t, t);
    if (sigma_s.kind == "scaled_identity") return Mat::Identity(t, t) / static_cast<double>(t);
    if (sigma_s.kind == "random") {
        if (sigma_s.rank < 1 || sigma_s.rank > t) throw ConfigError("sigma_s.rank must be in [1, t]");
        Mat g = random_gaussian(t, sigma_s.rank, real, sigma_s.seed, 0x51u);
        Mat s = g * g.adjoint();
        return s / s.trace().real();
    }
    if (sigma_s.kind == "matrix") {
        if (sigma_s.matrix.rows() != t || sigma_s.matrix.cols() != t) throw ConfigError("sigma_s.matrix must be t x t");
        const double tr = sigma_s.matrix.trace().real();
        if (!(tr > 0.0)) throw ConfigError("sigma_s.matrix must have positive trace");
        return sigma_s.matrix / tr;
    }
    throw ConfigError("unknown sigma_s.kind '" + sigma_s.kind + "'");
}

Mat ExperimentConfig::input_shape() const {
    if (sigma_x.kind == "scaled_identity") {
        if (m != t) throw ConfigError("sigma_x scaled_identity requires m == t");
        return Mat::Identity(t, t) / std::sqrt(static_cast<double>(t));
    }
    if (sigma_x.kind == "factor") {
        if (sigma_x.matrix.rows() != t || sigma_x.matrix.cols() != m)
            throw ConfigError("sigma_x.matrix must be t x m");
        const double tr = (sigma_x.matrix * sigma_x.matrix.adjoint()).trace().real();
        if (!(tr > 0.0)) throw ConfigError("sigma_x.matrix must be nonzero");
        return sigma_x.matrix / std::sqrt(tr);
    }
    throw ConfigError("unknown sigma_x.kind '" + sigma_x.kind + "'");
}

ChannelSpec ExperimentConfig::channel_at(double snr) const {
    dims().validate();
    if (!(n > 0.0)) throw ConfigError("noise trace n must be positive");
    if (!(q_over_p >= 0.0)) throw ConfigError("q_over_p must be nonnegative");
    const double P = n * std::pow(10.0, snr / 10.0);
    const double Q = q_over_p * P;
    Mat T = std::sqrt(P) * input_shape();
    Mat S = Q * interference_shape();
    Mat Z = Mat::Identity(r, r) * (n / r);
    return ChannelSpec::create(field, T, S, Z, P);
}

FadingModel ExperimentConfig::fading_model() const {
    const std::string& v = fading.variant;
    FadingModel model;
    if (v == "iid_complex_gaussian")
        model = FadingModel::iid_complex_gaussian();
    else if (v == "iid_real_gaussian")
        model = FadingModel::iid_real_gaussian();
    else if (v == "iid_uniform_complex")
        model = FadingModel::iid_uniform_complex();
    else if (v == "correlated_rayleigh")
        model = FadingModel::correlated_rayleigh(
            side_correlation(fading.rx_correlation, fading.rx_rho, fading.rx_seed, r, "rx"),
            side_correlation(fading.tx_correlation, fading.tx_rho, fading.tx_seed, t, "tx"));
    else
        throw ConfigError("unknown fading variant '" + v + "'");
    if ((field == Field::Real) != model.is_real())
        throw ConfigError("field '" + std::string(field == Field::Real ? "real" : "complex") +
                          "' is inconsistent with fading '" + v + "'");
    return model;
}

CsitModel ExperimentConfig::csit_model() const {
    if (csit.variant == "none") return CsitModel::none();
    if (csit.variant == "perfect") return CsitModel::perfect();
    if (csit.variant == "quantized") {
        if (csit.bits < 1 || csit.bits > 6) throw ConfigError("csit.bits must be in [1, 6]");
        if (csit.step) return CsitModel::quantized(csit.bits, *csit.step);
        return CsitModel::quantized_for(csit.bits, fading_model());
    }
    throw ConfigError("unknown csit variant '" + csit.variant + "'");
}

// ---------------------------------------------------------------------------

ExperimentConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    reject_unknown(root,
                   {"name", "t", "r", "m", "snr_db", "q_over_p", "n", "field", "fading", "csit", "sigma_s", "sigma_x",
                    "mc"},
                   "config");
    ExperimentConfig c;
    const std::string top = "config";
    c.name = get_or<std::string>(root, "name", "", top);
    c.t = get<int>(root, "t", top);
    c.r = get<int>(root, "r", top);
    c.m = get<int>(root, "m", top);
    c.snr_db = get_or<double>(root, "snr_db", c.snr_db, top);
    c.q_over_p = get_or<double>(root, "q_over_p", c.q_over_p, top);
    c.n = get_or<double>(root, "n", c.n, top);
    const std::string field = get_or<std::string>(root, "field", "complex", top);
    if (field == "real")
        c.field = Field::Real;
    else if (field == "complex")
        c.field = Field::Complex;
    else
        throw ConfigError("field must be \"real\" or \"complex\"");

    if (root.contains("fading")) {
        const json& f = root["fading"];
        reject_unknown(f, {"variant", "rx_correlation", "tx_correlation", "rx_rho", "tx_rho", "rx_seed", "tx_seed"},
                       "fading");
        c.fading.variant = get<std::string>(f, "variant", "fading");
        if (f.contains("rx_correlation")) c.fading.rx_correlation = parse_matrix(f["rx_correlation"], "rx_correlation");
        if (f.contains("tx_correlation")) c.fading.tx_correlation = parse_matrix(f["tx_correlation"], "tx_correlation");
        if (f.contains("rx_rho")) c.fading.rx_rho = get<double>(f, "rx_rho", "fading");
        if (f.contains("tx_rho")) c.fading.tx_rho = get<double>(f, "tx_rho", "fading");
        if (f.contains("rx_seed")) c.fading.rx_seed = get_seed(f, "rx_seed", "fading");
        if (f.contains("tx_seed")) c.fading.tx_seed = get_seed(f, "tx_seed", "fading");
    } else {
        c.fading.variant = c.field == Field::Real ? "iid_real_gaussian" : "iid_complex_gaussian";
    }

    if (root.contains("csit")) {
        const json& s = root["csit"];
        reject_unknown(s, {"variant", "bits", "step"}, "csit");
        c.csit.variant = get<std::string>(s, "variant", "csit");
        c.csit.bits = get_or<int>(s, "bits", 0, "csit");
        if (s.contains("step")) c.csit.step = get<double>(s, "step", "csit");
    }

    if (root.contains("sigma_s")) {
        const json& s = root["sigma_s"];
        reject_unknown(s, {"kind", "rank", "seed", "matrix"}, "sigma_s");
        c.sigma_s.kind = get<std::string>(s, "kind", "sigma_s");
        c.sigma_s.rank = get_or<int>(s, "rank", 0, "sigma_s");
        if (s.contains("seed")) c.sigma_s.seed = get_seed(s, "seed", "sigma_s");
        if (s.contains("matrix")) c.sigma_s.matrix = parse_matrix(s["matrix"], "sigma_s.matrix");
    }

    if (root.contains("sigma_x")) {
        const json& s = root["sigma_x"];
        reject_unknown(s, {"kind", "matrix"}, "sigma_x");
        c.sigma_x.kind = get<std::string>(s, "kind", "sigma_x");
        if (s.contains("matrix")) c.sigma_x.matrix = parse_matrix(s["matrix"], "sigma_x.matrix");
    }

    if (root.contains("mc")) {
        const json& s = root["mc"];
        reject_unknown(s, {"n_outer", "n_inner", "seed"}, "mc");
        c.mc.n_outer = get_or<std::size_t>(s, "n_outer", c.mc.n_outer, "mc");
        c.mc.n_inner = get_or<std::size_t>(s, "n_inner", c.mc.n_inner, "mc");
        if (s.contains("seed")) c.mc.seed = get_seed(s, "seed", "mc");
    }

    // Validate everything derivable now, so execution never starts on a bad config.
    (void)c.channel();
    (void)c.fading_model();
    (void)c.csit_model();
    if (c.mc.n_outer < 1 || c.mc.n_inner < 1) throw ConfigError("mc sample counts must be at least 1");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_json(const ExperimentConfig& c) {
    json root;
    if (!c.name.empty()) root["name"] = c.name;
    root["t"] = c.t;
    root["r"] = c.r;
    root["m"] = c.m;
    root["snr_db"] = c.snr_db;
    root["q_over_p"] = c.q_over_p;
    root["n"] = c.n;
    root["field"] = c.field == Field::Real ? "real" : "complex";

    json f;
    f["variant"] = c.fading.variant;
    if (c.fading.rx_correlation) f["rx_correlation"] = matrix_to_json(*c.fading.rx_correlation);
    if (c.fading.tx_correlation) f["tx_correlation"] = matrix_to_json(*c.fading.tx_correlation);
    if (c.fading.rx_rho) f["rx_rho"] = *c.fading.rx_rho;
    if (c.fading.tx_rho) f["tx_rho"] = *c.fading.tx_rho;
    if (c.fading.rx_seed) f["rx_seed"] = *c.fading.rx_seed;
    if (c.fading.tx_seed) f["tx_seed"] = *c.fading.tx_seed;
    root["fading"] = f;

    json s;
    s["variant"] = c.csit.variant;
    if (c.csit.variant == "quantized") s["bits"] = c.csit.bits;
    if (c.csit.step) s["step"] = *c.csit.step;
    root["csit"] = s;

    json ss;
    ss["kind"] = c.sigma_s.kind;
    if (c.sigma_s.kind == "random") {
        ss["rank"] = c.sigma_s.rank;
        ss["seed"] = c.sigma_s.seed;
    }
    if (c.sigma_s.kind == "matrix") ss["matrix"] = matrix_to_json(c.sigma_s.matrix);
    root["sigma_s"] = ss;

    json sx;
    sx["kind"] = c.sigma_x.kind;
    if (c.sigma_x.kind == "factor") sx["matrix"] = matrix_to_json(c.sigma_x.matrix);
    root["sigma_x"] = sx;

    root["mc"] = {{"n_outer", c.mc.n_outer}, {"n_inner", c.mc.n_inner}, {"seed", c.mc.seed}};
    return root.dump(2);
}

std::string config_hash(const ExperimentConfig& c) {
    const std::string canon = to_json(c);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace fdpc
