#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "epp/config.hpp"
#include "epp/oracle.hpp"

// File-producing commands behind the `epp` tool.  Everything is deterministic:
// fixed grids, fixed formatting (%.17g), sorted JSON keys.  Running a command
// twice must produce byte-identical artifacts.

namespace epp {

namespace detail {

inline std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi > lo) || n < 2) throw ContractError("log grid needs 0 < lo < hi, n >= 2");
    std::vector<double> r(static_cast<std::size_t>(n));
    const double step = (std::log(hi) - std::log(lo)) / (n - 1);
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + i * step);
    r.front() = lo;  // exact endpoints, no exp/log round-trip drift
    r.back() = hi;
    return r;
}

inline std::vector<double> linear_grid(double lo, double hi, int n) {
    if (n < 2 || !(hi >= lo)) throw ContractError("linear grid needs hi >= lo, n >= 2");
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        x[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    x.back() = hi;
    return x;
}

inline Json matrix_to_json(const RealMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json matrix_to_json(const Matrix& m) {
    Json j;
    j["re"] = matrix_to_json(RealMatrix(m.real()));
    j["im"] = matrix_to_json(RealMatrix(m.imag()));
    return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw Error("write failed: " + path.string());
}

inline std::filesystem::path ensure_out_dir(const RunConfig& config) {
    std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

struct GridScan {
    std::vector<double> radii;
    std::vector<TransformationSolutionSample> samples;
    double rcond_min = 0.0;
    double v2_imag_max = 0.0;
    double v2_asym_max = 0.0;
    double w_antihermiticity_max = 0.0;
    double w2_tail = 0.0;
};

inline GridScan scan_grid(const ChannelModel& model, const TransformSpec& spec,
                          const RunConfig& config) {
    GridScan scan;
    scan.radii = log_grid(config.r_min, config.resolved_r_max(), config.grid_points);
    scan.samples.reserve(scan.radii.size());
    scan.rcond_min = std::numeric_limits<double>::infinity();
    for (double r : scan.radii) {
        TransformationSolutionSample s = sample(model, spec, r);
        scan.rcond_min = std::min(scan.rcond_min, s.wronskian_rcond);
        scan.v2_imag_max = std::max(scan.v2_imag_max, s.v2_imag_defect);
        scan.v2_asym_max = std::max(scan.v2_asym_max, s.v2_asym_defect);
        const double w_scale = std::max(1.0, max_abs(s.w));
        scan.w_antihermiticity_max =
            std::max(scan.w_antihermiticity_max, max_abs(Matrix(s.w + s.w.adjoint())) / w_scale);
        scan.samples.push_back(std::move(s));
    }
    scan.w2_tail = max_abs(scan.samples.back().w2);
    return scan;
}

}  // namespace detail

// v2_grid.csv: deformed potential on a log grid, upper triangle by row.
// summary.json: asymptotic frame, interior diagnostics, config echo.
inline int cmd_transform(const RunConfig& config, std::ostream& out = std::cout) {
    const ChannelModel model = config.model();
    const TransformSpec spec = config.spec();
    validate_spec(model, spec);
    const auto dir = detail::ensure_out_dir(config);
    const int n = model.size();

    const detail::GridScan scan = detail::scan_grid(model, spec, config);

    std::string csv = "r";
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j)
            csv += ",V" + std::to_string(i) + std::to_string(j);
    csv += "\n";
    for (std::size_t row = 0; row < scan.radii.size(); ++row) {
        csv += detail::g17(scan.radii[row]);
        const RealMatrix& v2 = scan.samples[row].v2;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) csv += "," + detail::g17(v2(i, j));
        csv += "\n";
    }
    detail::write_text(dir / "v2_grid.csv", csv);

    const AsymptoticFrame frame = asymptotic_frame(spec, config.ksq_sample);
    Json summary;
    summary["config"] = config_to_json(config);
    summary["omega"] = detail::matrix_to_json(frame.omega);
    summary["u_infinity"] = {{"ksq", config.ksq_sample},
                             {"matrix", detail::matrix_to_json(frame.u_infinity)}};
    summary["x_diagnostic"] = detail::matrix_to_json(diagnostic_x(model, spec));
    summary["diagnostics"] = {{"wronskian_rcond_min", scan.rcond_min},
                              {"v2_imag_max", scan.v2_imag_max},
                              {"v2_asym_max", scan.v2_asym_max},
                              {"w2_norm_at_r_max", scan.w2_tail}};
    detail::write_text(dir / "summary.json", summary.dump(2) + "\n");

    out << "wrote " << (dir / "v2_grid.csv").string() << " (" << scan.radii.size() << " rows), "
        << (dir / "summary.json").string() << "\n";
    return 0;
}

namespace detail {

struct Invariant {
    std::string name;
    double value = 0.0;
    double tol = 0.0;
    bool lower_bound = false;  // pass means value >= tol instead of <= tol
    [[nodiscard]] bool pass() const { return lower_bound ? value >= tol : value <= tol; }
};

inline Json invariant_to_json(const Invariant& inv) {
    return Json{{"name", inv.name},
                {"value", inv.value},
                {"tol", inv.tol},
                {"pass", inv.pass()}};
}

inline Json record_to_json(const PhaseRecord& rec) {
    Json j;
    j["k"] = rec.k;
    j["reference"] = rec.reference;
    j["closed_form"] = rec.closed_form;
    j["oracle"] = rec.oracle;
    j["closed_vs_reference"] = rec.closed_vs_reference;
    j["oracle_vs_reference"] = rec.oracle_vs_reference;
    j["unitarity_defect"] = rec.unitarity_defect;
    j["asymmetry_defect"] = rec.asymmetry_defect;
    j["step_error"] = rec.step_error;
    j["pass"] = rec.pass;
    return j;
}

}  // namespace detail

// Full verification pass: structural invariants of the transformation plus the
// independent scattering check.  Writes report.json; exit code reflects the
// overall verdict (0 pass, 1 fail).
inline int cmd_verify(const RunConfig& config, std::ostream& out = std::cout) {
    const ChannelModel model = config.model();
    const TransformSpec spec = config.spec();
    validate_spec(model, spec);
    const auto dir = detail::ensure_out_dir(config);

    const detail::GridScan scan = detail::scan_grid(model, spec, config);

    VerifyOptions opt;
    opt.grid = config.grid();
    opt.tol_eigenphase = config.tol_eigenphase;
    opt.tol_unitarity = config.tol_unitarity;
    opt.step_tol = config.step_tol;
    const ScatterReport scatter = verify_epp(model, spec, config.k_values, opt);

    const RealMatrix om = omega(spec);
    const int n = spec.size();
    const RealMatrix id = RealMatrix::Identity(n, n);
    const double e_im = spec.energy().imag();

    std::vector<detail::Invariant> invariants;
    invariants.push_back({"omega_antisymmetry", max_abs(RealMatrix(om + om.transpose())), 1e-10});
    invariants.push_back(
        {"omega_scaled_orthogonality",
         max_abs(RealMatrix(om.transpose() * om / (e_im * e_im) - id)), 1e-10});
    double rs_defect = 0.0;
    for (double k : config.k_values) {
        const RealMatrix rs = rs_matrix(spec, k * k);
        rs_defect = std::max(rs_defect, max_abs(RealMatrix(rs * rs.transpose() - id)));
    }
    invariants.push_back({"rs_orthogonality", rs_defect, 1e-10});
    const AsymptoticFrame frame = asymptotic_frame(spec, config.ksq_sample);
    invariants.push_back({"u_infinity_frame",
                          max_abs(RealMatrix(frame.rs * frame.rs.transpose() - id)), 1e-10});
    invariants.push_back({"wronskian_anti_hermiticity", scan.w_antihermiticity_max, 1e-8});
    invariants.push_back({"wronskian_rcond_min", scan.rcond_min, 1e-10, true});
    invariants.push_back({"v2_imag_max", scan.v2_imag_max, 1e-9});
    invariants.push_back({"v2_asym_max", scan.v2_asym_max, 1e-9});
    invariants.push_back({"w2_tail", scan.w2_tail, 1e-6});
    invariants.push_back({"closed_form_preservation", scatter.max_closed_deviation, 1e-10});

    bool invariants_pass = true;
    Json inv_json = Json::array();
    for (const auto& inv : invariants) {
        invariants_pass = invariants_pass && inv.pass();
        inv_json.push_back(detail::invariant_to_json(inv));
    }

    Json records = Json::array();
    for (const auto& rec : scatter.records) records.push_back(detail::record_to_json(rec));

    const bool overall = invariants_pass && scatter.pass;
    Json report;
    report["config"] = config_to_json(config);
    report["invariants"] = std::move(inv_json);
    report["scattering"] = {{"records", std::move(records)},
                            {"max_oracle_deviation", scatter.max_oracle_deviation},
                            {"max_closed_deviation", scatter.max_closed_deviation},
                            {"max_unitarity_defect", scatter.max_unitarity_defect},
                            {"max_asymmetry_defect", scatter.max_asymmetry_defect},
                            {"pass", scatter.pass}};
    report["pass"] = overall;
    detail::write_text(dir / "report.json", report.dump(2) + "\n");

    for (const auto& inv : invariants)
        out << (inv.pass() ? "ok   " : "FAIL ") << inv.name << " = " << inv.value << "\n";
    for (const auto& rec : scatter.records)
        out << (rec.pass ? "ok   " : "FAIL ") << "k = " << rec.k
            << ": oracle refdev " << rec.oracle_vs_reference << ", unitarity "
            << rec.unitarity_defect << "\n";
    out << (overall ? "PASS" : "FAIL") << " -> " << (dir / "report.json").string() << "\n";
    return overall ? 0 : 1;
}

// rs_columns.csv: mixing frame columns across energy; eigenphases.csv: the
// phase bands before and after the deformation.
inline int cmd_figures(const RunConfig& config, std::ostream& out = std::cout) {
    const ChannelModel model = config.model();
    const TransformSpec spec = config.spec();
    validate_spec(model, spec);
    const auto dir = detail::ensure_out_dir(config);
    const int n = spec.size();
    if (config.k_values.empty()) throw ConfigError("config: k_values must be nonempty");

    double k_lo = config.k_values.front(), k_hi = k_lo;
    for (double k : config.k_values) {
        if (!(k > 0.0)) throw ConfigError("config: k_values must be positive");
        k_lo = std::min(k_lo, k);
        k_hi = std::max(k_hi, k);
    }

    std::string rs_csv = "ksq";
    for (int j = 1; j <= n; ++j)
        for (int i = 1; i <= n; ++i)
            rs_csv += ",R" + std::to_string(j) + "_" + std::to_string(i);
    rs_csv += "\n";
    const int rows = config.k_values.size() == 1 ? 1 : config.grid_points;
    const auto ksq_grid = rows == 1 ? std::vector<double>{k_lo * k_lo}
                                    : detail::linear_grid(k_lo * k_lo, k_hi * k_hi, rows);
    for (double ksq : ksq_grid) {
        const RealMatrix rs = rs_matrix(spec, ksq);
        rs_csv += detail::g17(ksq);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) rs_csv += "," + detail::g17(rs(i, j));
        rs_csv += "\n";
    }
    detail::write_text(dir / "rs_columns.csv", rs_csv);

    std::string ph_csv = "k";
    for (int j = 1; j <= n; ++j) ph_csv += ",delta0_" + std::to_string(j);
    for (int j = 1; j <= n; ++j) ph_csv += ",delta2_" + std::to_string(j);
    ph_csv += "\n";
    const auto k_grid = rows == 1 ? std::vector<double>{k_lo}
                                  : detail::linear_grid(k_lo, k_hi, config.grid_points);
    for (double k : k_grid) {
        const auto d0 = eigenphases_symmetric_unitary(s0_matrix(k, model));
        const auto d2 = eigenphases_symmetric_unitary(s2_matrix(model, spec, k));
        ph_csv += detail::g17(k);
        for (double d : d0) ph_csv += "," + detail::g17(d);
        for (double d : d2) ph_csv += "," + detail::g17(d);
        ph_csv += "\n";
    }
    detail::write_text(dir / "eigenphases.csv", ph_csv);

    out << "wrote " << (dir / "rs_columns.csv").string() << ", "
        << (dir / "eigenphases.csv").string() << "\n";
    return 0;
}

// Uniform error policy for the CLI: domain errors and bad configs exit 2 with
// a one-line message; verdict codes (0/1) pass through untouched.
template <typename Fn>
int run_cli(Fn&& fn, std::ostream& err = std::cerr) {
    try {
        return fn();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace epp
