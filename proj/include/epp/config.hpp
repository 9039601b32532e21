#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "epp/oracle.hpp"
#include "epp/transform.hpp"

namespace epp {

using Json = nlohmann::json;

// Flat key-value run description (see configs/ for samples).  The transform
// momentum can be given directly (K_re, K_im) or as the energy (E_re, E_im);
// the mixing matrix as a single complex b with a sqrt branch (4 channels), as
// a list of complex rotation angles (canonical plane order), or as raw
// entries.  Exactly one of each group must be present.
struct RunConfig {
    std::vector<double> a;
    Complex momentum{0.0, 0.0};
    int sigma = 1;

    std::optional<Complex> b;
    int branch = 1;
    std::optional<std::vector<Complex>> angles;
    std::optional<Matrix> b_raw;

    double r_min = 1e-3;
    double r_max = 0.0;  // 0: max(40, 30 / Im K)
    int grid_points = 2000;

    std::vector<double> k_values{0.5, 1.0, 2.0, 4.0};
    double oracle_r_min = 1e-3;
    double oracle_step = 2e-3;
    double r_match = 0.0;  // 0: max(20, 25 / Im K)
    double step_tol = 1e-9;
    double tol_eigenphase = 1e-3;
    double tol_unitarity = 1e-5;
    double ksq_sample = 2.0;
    std::string out_dir = ".";

    [[nodiscard]] double resolved_r_max() const {
        return r_max > 0.0 ? r_max : std::max(40.0, 30.0 / momentum.imag());
    }
    [[nodiscard]] double resolved_r_match() const {
        return r_match > 0.0 ? r_match : std::max(20.0, 25.0 / momentum.imag());
    }
    [[nodiscard]] ChannelModel model() const { return ChannelModel(a); }

    [[nodiscard]] TransformSpec spec() const {
        const int n = static_cast<int>(a.size());
        if (b) {
            if (n != 4)
                throw ConfigError("mixing input b parametrizes 2x2 B: needs exactly 4 channels");
            return TransformSpec(momentum, complex_orthogonal_2x2(*b, branch), sigma);
        }
        if (angles) {
            if (n % 2 != 0)
                throw EppNotExistentError("odd channel count: EPP transformation does not exist");
            return TransformSpec(momentum, complex_orthogonal_general(n / 2, *angles), sigma);
        }
        if (b_raw) return TransformSpec(momentum, ComplexOrthogonal(*b_raw), sigma);
        throw ConfigError("no mixing input given (b, angles, or B)");
    }

    [[nodiscard]] RadialGrid grid() const {
        return {oracle_r_min, resolved_r_match(), oracle_step};
    }
};

namespace detail {

inline const Json& require_key(const Json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("config: missing key '" + key + "'");
    return j.at(key);
}

inline double as_number(const Json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("config: key '" + key + "' must be a number");
    return v.get<double>();
}

inline double number_at(const Json& j, const std::string& key) {
    return as_number(require_key(j, key), key);
}

inline std::vector<double> number_list(const Json& j, const std::string& key) {
    const Json& v = require_key(j, key);
    if (!v.is_array()) throw ConfigError("config: key '" + key + "' must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const Json& e : v) out.push_back(as_number(e, key));
    return out;
}

}  // namespace detail

[[nodiscard]] inline RunConfig config_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    static const std::set<std::string> known = {
        "a",          "K_re",          "K_im",         "E_re",        "E_im",
        "b_re",       "b_im",          "branch",       "angles_re",   "angles_im",
        "B_re",       "B_im",          "sigma",        "r_min",       "r_max",
        "grid_points", "k_values",     "oracle_r_min", "oracle_step", "r_match",
        "step_tol",   "tol_eigenphase", "tol_unitarity", "ksq_sample", "out_dir"};
    for (const auto& [key, value] : j.items())
        if (!known.contains(key)) throw ConfigError("config: unknown key '" + key + "'");

    RunConfig c;
    c.a = detail::number_list(j, "a");

    const bool has_k = j.contains("K_re") || j.contains("K_im");
    const bool has_e = j.contains("E_re") || j.contains("E_im");
    if (has_k == has_e)
        throw ConfigError("config: give exactly one of K (K_re, K_im) and E (E_re, E_im)");
    if (has_k) {
        c.momentum = Complex(detail::number_at(j, "K_re"), detail::number_at(j, "K_im"));
    } else {
        const Complex e(detail::number_at(j, "E_re"), detail::number_at(j, "E_im"));
        Complex k = std::sqrt(e);
        if (k.imag() < 0.0) k = -k;
        c.momentum = k;
    }

    const bool has_b = j.contains("b_re") || j.contains("b_im");
    const bool has_angles = j.contains("angles_re") || j.contains("angles_im");
    const bool has_raw = j.contains("B_re") || j.contains("B_im");
    if (static_cast<int>(has_b) + static_cast<int>(has_angles) + static_cast<int>(has_raw) != 1)
        throw ConfigError("config: give exactly one mixing input (b, angles, or B)");
    if (has_b) {
        c.b = Complex(detail::number_at(j, "b_re"), detail::number_at(j, "b_im"));
        if (j.contains("branch")) {
            c.branch = static_cast<int>(detail::number_at(j, "branch"));
            if (c.branch != 1 && c.branch != -1)
                throw ConfigError("config: branch must be +1 or -1");
        }
    } else if (has_angles) {
        const auto re = detail::number_list(j, "angles_re");
        const auto im = detail::number_list(j, "angles_im");
        if (re.size() != im.size())
            throw ConfigError("config: angles_re and angles_im must have equal length");
        std::vector<Complex> th(re.size());
        for (std::size_t i = 0; i < re.size(); ++i) th[i] = Complex(re[i], im[i]);
        c.angles = std::move(th);
    } else {
        const auto re = detail::number_list(j, "B_re");
        const auto im = detail::number_list(j, "B_im");
        if (re.size() != im.size() || re.empty())
            throw ConfigError("config: B_re and B_im must be equal-length and nonempty");
        const auto m = static_cast<Eigen::Index>(std::lround(std::sqrt(double(re.size()))));
        if (static_cast<std::size_t>(m * m) != re.size())
            throw ConfigError("config: B entries must form a square matrix (row-major)");
        Matrix braw(m, m);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index jj = 0; jj < m; ++jj) {
                const std::size_t idx = static_cast<std::size_t>(i * m + jj);
                braw(i, jj) = Complex(re[idx], im[idx]);
            }
        c.b_raw = std::move(braw);
    }

    if (j.contains("sigma")) {
        c.sigma = static_cast<int>(detail::number_at(j, "sigma"));
        if (c.sigma != 1 && c.sigma != -1) throw ConfigError("config: sigma must be +1 or -1");
    }
    if (j.contains("r_min")) c.r_min = detail::number_at(j, "r_min");
    if (j.contains("r_max")) c.r_max = detail::number_at(j, "r_max");
    if (j.contains("grid_points")) c.grid_points = static_cast<int>(detail::number_at(j, "grid_points"));
    if (c.grid_points < 2) throw ConfigError("config: grid_points must be at least 2");
    if (j.contains("k_values")) c.k_values = detail::number_list(j, "k_values");
    if (j.contains("oracle_r_min")) c.oracle_r_min = detail::number_at(j, "oracle_r_min");
    if (j.contains("oracle_step")) c.oracle_step = detail::number_at(j, "oracle_step");
    if (j.contains("r_match")) c.r_match = detail::number_at(j, "r_match");
    if (j.contains("step_tol")) c.step_tol = detail::number_at(j, "step_tol");
    if (j.contains("tol_eigenphase")) c.tol_eigenphase = detail::number_at(j, "tol_eigenphase");
    if (j.contains("tol_unitarity")) c.tol_unitarity = detail::number_at(j, "tol_unitarity");
    if (j.contains("ksq_sample")) c.ksq_sample = detail::number_at(j, "ksq_sample");
    if (j.contains("out_dir")) {
        if (!j.at("out_dir").is_string()) throw ConfigError("config: out_dir must be a string");
        c.out_dir = j.at("out_dir").get<std::string>();
    }
    return c;
}

[[nodiscard]] inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path.string());
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

// Canonical echo: resolved momentum and grid bounds, mixing input as given.
// config_from_json(config_to_json(c)) reproduces c.
[[nodiscard]] inline Json config_to_json(const RunConfig& c) {
    Json j;
    j["a"] = c.a;
    j["K_re"] = c.momentum.real();
    j["K_im"] = c.momentum.imag();
    j["sigma"] = c.sigma;
    if (c.b) {
        j["b_re"] = c.b->real();
        j["b_im"] = c.b->imag();
        j["branch"] = c.branch;
    } else if (c.angles) {
        std::vector<double> re, im;
        for (const Complex& t : *c.angles) {
            re.push_back(t.real());
            im.push_back(t.imag());
        }
        j["angles_re"] = re;
        j["angles_im"] = im;
    } else if (c.b_raw) {
        std::vector<double> re, im;
        for (Eigen::Index i = 0; i < c.b_raw->rows(); ++i)
            for (Eigen::Index jj = 0; jj < c.b_raw->cols(); ++jj) {
                re.push_back((*c.b_raw)(i, jj).real());
                im.push_back((*c.b_raw)(i, jj).imag());
            }
        j["B_re"] = re;
        j["B_im"] = im;
    }
    j["r_min"] = c.r_min;
    j["r_max"] = c.resolved_r_max();
    j["grid_points"] = c.grid_points;
    j["k_values"] = c.k_values;
    j["oracle_r_min"] = c.oracle_r_min;
    j["oracle_step"] = c.oracle_step;
    j["r_match"] = c.resolved_r_match();
    j["step_tol"] = c.step_tol;
    j["tol_eigenphase"] = c.tol_eigenphase;
    j["tol_unitarity"] = c.tol_unitarity;
    j["ksq_sample"] = c.ksq_sample;
    j["out_dir"] = c.out_dir;
    return j;
}

}  // namespace epp
