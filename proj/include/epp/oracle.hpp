#pragma once

#include <functional>
#include <future>
#include <thread>

#include "epp/transform.hpp"

namespace epp {

struct RadialGrid {
    double r_min = 1e-3;
    double r_match = 20.0;
    double step = 2e-3;
};

inline void validate(const RadialGrid& g) {
    if (!(g.r_min > 0.0) || !(g.r_match > g.r_min) || !(g.step > 0.0))
        throw ContractError("radial grid: need 0 < r_min < r_match and step > 0");
    if ((g.r_match - g.r_min) / g.step < 100.0)
        throw ContractError("radial grid: fewer than 100 steps across the range");
}

struct RadialSolution {
    RealMatrix psi, dpsi;
    double r_match = 0.0;
    long steps = 0;
    double max_step_error = 0.0;
};

// RK4 on the matrix system psi'' = (V(r) - k^2) psi, columns seeded regular at
// r_min (psi = 0, psi' = I).  The nominal step is fixed; near the origin a
// deterministic radius-proportional ramp h = min(step, r/32) absorbs the
// 2/r^2 core.  Every step is checked against two half steps; exceeding
// step_tol raises instead of silently degrading.
[[nodiscard]] inline RadialSolution integrate_radial(const std::function<RealMatrix(double)>& v,
                                                     double ksq, const RadialGrid& grid,
                                                     double step_tol = 1e-9) {
    validate(grid);
    if (!std::isfinite(ksq)) throw ContractError("integrate: k^2 must be finite");
    const RealMatrix v_first = v(grid.r_min);
    if (v_first.rows() != v_first.cols() || v_first.size() == 0)
        throw ShapeError("integrate: potential must be square");
    const Eigen::Index n = v_first.rows();

    RealMatrix psi = RealMatrix::Zero(n, n);
    RealMatrix dpsi = RealMatrix::Identity(n, n);

    struct State {
        RealMatrix p, dp;
    };
    auto rk4 = [&](const State& y, const RealMatrix& va, const RealMatrix& vm,
                   const RealMatrix& vb, double h) -> State {
        const RealMatrix k1p = y.dp;
        const RealMatrix k1d = va * y.p - ksq * y.p;
        const RealMatrix p2 = y.p + (0.5 * h) * k1p;
        const RealMatrix k2p = y.dp + (0.5 * h) * k1d;
        const RealMatrix k2d = vm * p2 - ksq * p2;
        const RealMatrix p3 = y.p + (0.5 * h) * k2p;
        const RealMatrix k3p = y.dp + (0.5 * h) * k2d;
        const RealMatrix k3d = vm * p3 - ksq * p3;
        const RealMatrix p4 = y.p + h * k3p;
        const RealMatrix k4p = y.dp + h * k3d;
        const RealMatrix k4d = vb * p4 - ksq * p4;
        return {y.p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
                y.dp + (h / 6.0) * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)};
    };

    RadialSolution out;
    State y{std::move(psi), std::move(dpsi)};
    double r = grid.r_min;
    while (grid.r_match - r > 1e-12 * grid.r_match) {
        const double h = std::min({grid.step, r / 32.0, grid.r_match - r});
        const RealMatrix va = (out.steps == 0) ? v_first : v(r);
        const RealMatrix v14 = v(r + 0.25 * h);
        const RealMatrix vm = v(r + 0.5 * h);
        const RealMatrix v34 = v(r + 0.75 * h);
        const RealMatrix vb = v(r + h);
        const State full = rk4(y, va, vm, vb, h);
        const State half = rk4(rk4(y, va, v14, vm, 0.5 * h), vm, v34, vb, 0.5 * h);
        const double scale =
            std::max({1.0, max_abs(half.p), max_abs(half.dp)});
        const double err =
            std::max(max_abs(RealMatrix(half.p - full.p)), max_abs(RealMatrix(half.dp - full.dp))) /
            (15.0 * scale);
        if (!(err <= step_tol))
            throw AccuracyError("integration step error " + detail::short_double(err) +
                                " above gate " + detail::short_double(step_tol) + " at r = " +
                                detail::short_double(r));
        out.max_step_error = std::max(out.max_step_error, err);
        y = half;
        r += h;
        ++out.steps;
    }
    out.psi = std::move(y.p);
    out.dpsi = std::move(y.dp);
    out.r_match = r;
    if (!out.psi.allFinite() || !out.dpsi.allFinite())
        throw AccuracyError("integration produced non-finite solution");
    return out;
}

struct SMatrixExtraction {
    Matrix s;
    double asymmetry = 0.0;
};

// Match psi = e^{-ikr} A_in - e^{+ikr} A_out at r_match and form
// S = A_out A_in^{-1}.  Only valid where the potential is negligible (the
// caller checks that).  S is symmetrized; the defect is reported, not dropped.
[[nodiscard]] inline SMatrixExtraction extract_s_matrix(const RealMatrix& psi,
                                                        const RealMatrix& dpsi, double k,
                                                        double r_match) {
    if (!(k > 0.0)) throw ContractError("extraction requires k > 0");
    if (psi.rows() != psi.cols() || psi.rows() != dpsi.rows() || psi.cols() != dpsi.cols())
        throw ShapeError("extraction: psi and psi' must be square and matching");
    const Complex I(0.0, 1.0);
    const Complex eikr = std::exp(I * (k * r_match));
    const Matrix p = psi.cast<Complex>();
    const Matrix dp = dpsi.cast<Complex>();
    const Matrix a_in = (eikr / (2.0 * I * k)) * (I * k * p - dp);
    const Matrix a_out = (-1.0 / (eikr * 2.0 * I * k)) * (I * k * p + dp);
    Eigen::PartialPivLU<Matrix> lu(a_in);
    if (!(lu.rcond() >= kSingularRcond))
        throw MatchingError("ingoing amplitude singular at r_match: rcond = " +
                            detail::short_double(lu.rcond()));
    const Matrix s_raw = a_out * lu.inverse();
    SMatrixExtraction out;
    out.asymmetry = max_abs(Matrix(s_raw - s_raw.transpose()));
    out.s = 0.5 * (s_raw + s_raw.transpose());
    return out;
}

struct PhaseRecord {
    double k = 0.0;
    std::vector<double> reference;    // -arctan(k / a_j), sorted
    std::vector<double> closed_form;  // eigen-phases of S2(k)
    std::vector<double> oracle;       // eigen-phases of the integrated S
    double closed_vs_reference = 0.0;
    double oracle_vs_reference = 0.0;
    double unitarity_defect = 0.0;
    double asymmetry_defect = 0.0;
    double step_error = 0.0;
    bool pass = false;
};

struct VerifyOptions {
    RadialGrid grid;
    double tol_eigenphase = 1e-3;
    double tol_unitarity = 1e-5;
    double step_tol = 1e-9;
    bool parallel = true;
};

struct ScatterReport {
    std::vector<PhaseRecord> records;
    double max_oracle_deviation = 0.0;
    double max_closed_deviation = 0.0;
    double max_unitarity_defect = 0.0;
    double max_asymmetry_defect = 0.0;
    bool pass = false;
};

// End-to-end check that the deformation preserves eigen-phases: integrate the
// deformed potential from scratch, extract S, and compare its eigen-phases
// against both the closed-form S2 and the reference -arctan(k / a_j).  The
// integrator never sees the closed-form S2; the two routes share no algebra.
[[nodiscard]] inline ScatterReport verify_epp(const ChannelModel& model,
                                              const TransformSpec& spec,
                                              const std::vector<double>& k_values,
                                              const VerifyOptions& opt = {}) {
    validate_spec(model, spec);
    validate(opt.grid);
    if (k_values.empty()) throw ContractError("verify: no momenta given");
    for (double k : k_values)
        if (!(k > 0.0 && std::isfinite(k))) throw ContractError("verify: momenta must be positive");
    if (opt.grid.r_match * spec.momentum().imag() < 25.0)
        throw ContractError("verify: need r_match * Im K >= 25 so the deformation has died off");

    auto v = [&model, &spec](double r) { return deformed_potential(model, spec, r); };
    const double v_tail = max_abs(v(opt.grid.r_match));
    if (!(v_tail <= 1e-10))
        throw MatchingError("potential not negligible at r_match: " +
                            detail::short_double(v_tail));

    auto run_one = [&](double k) -> PhaseRecord {
        PhaseRecord rec;
        rec.k = k;
        const RadialSolution sol = integrate_radial(v, k * k, opt.grid, opt.step_tol);
        const SMatrixExtraction ext = extract_s_matrix(sol.psi, sol.dpsi, k, sol.r_match);
        const Matrix id = Matrix::Identity(model.size(), model.size());
        rec.unitarity_defect = max_abs(Matrix(ext.s * ext.s.adjoint() - id));
        rec.asymmetry_defect = ext.asymmetry;
        rec.step_error = sol.max_step_error;
        rec.reference.resize(static_cast<std::size_t>(model.size()));
        for (int j = 0; j < model.size(); ++j)
            rec.reference[static_cast<std::size_t>(j)] = -std::atan(k / model.a(j));
        std::sort(rec.reference.begin(), rec.reference.end());
        rec.closed_form = eigenphases_symmetric_unitary(s2_matrix(model, spec, k), 1e-8);
        rec.oracle = eigenphases_symmetric_unitary(ext.s, 1e-4);
        for (std::size_t j = 0; j < rec.reference.size(); ++j) {
            rec.closed_vs_reference =
                std::max(rec.closed_vs_reference, std::abs(rec.closed_form[j] - rec.reference[j]));
            rec.oracle_vs_reference =
                std::max(rec.oracle_vs_reference, std::abs(rec.oracle[j] - rec.reference[j]));
        }
        rec.pass = rec.oracle_vs_reference <= opt.tol_eigenphase &&
                   rec.unitarity_defect <= opt.tol_unitarity && rec.closed_vs_reference <= 1e-10;
        return rec;
    };

    ScatterReport rep;
    rep.records.resize(k_values.size());
    if (opt.parallel && k_values.size() > 1 && std::thread::hardware_concurrency() > 1) {
        std::vector<std::future<PhaseRecord>> futs;
        futs.reserve(k_values.size());
        for (double k : k_values)
            futs.push_back(std::async(std::launch::async, run_one, k));
        for (std::size_t i = 0; i < futs.size(); ++i) rep.records[i] = futs[i].get();
    } else {
        for (std::size_t i = 0; i < k_values.size(); ++i) rep.records[i] = run_one(k_values[i]);
    }

    rep.pass = true;
    for (const PhaseRecord& r : rep.records) {
        rep.max_oracle_deviation = std::max(rep.max_oracle_deviation, r.oracle_vs_reference);
        rep.max_closed_deviation = std::max(rep.max_closed_deviation, r.closed_vs_reference);
        rep.max_unitarity_defect = std::max(rep.max_unitarity_defect, r.unitarity_defect);
        rep.max_asymmetry_defect = std::max(rep.max_asymmetry_defect, r.asymmetry_defect);
        rep.pass = rep.pass && r.pass;
    }
    return rep;
}

}  // namespace epp
