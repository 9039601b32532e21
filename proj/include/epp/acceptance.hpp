#pragma once

#include <chrono>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "epp/oracle.hpp"

// Acceptance gate: ten checks, each printed as a single PASS/FAIL line with
// its measured figure and the tolerance pinned here in code.  The suite exists
// so the whole pipeline can be judged from one screen of output; the unit
// tests cover the same ground at finer grain.

namespace epp::acceptance {

namespace detail {

using epp::detail::short_double;

struct Rng {
    std::mt19937_64 g;
    explicit Rng(std::uint64_t seed) : g(seed) {}
    double uniform() { return static_cast<double>(g() >> 11) * 0x1.0p-53; }
    double in(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

struct Outcome {
    bool pass = false;
    std::string note;
};

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

// The four-channel benchmark deformation used across several criteria.
inline ChannelModel benchmark_model() { return ChannelModel({1.1, 1.5, 2.1, 2.5}); }

inline TransformSpec benchmark_spec(Complex momentum) {
    return TransformSpec(momentum, complex_orthogonal_2x2(Complex(2.5, 1.3), 1), 1);
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> r(static_cast<std::size_t>(n));
    const double step = (std::log(hi) - std::log(lo)) / (n - 1);
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + i * step);
    r.front() = lo;
    r.back() = hi;
    return r;
}

inline std::pair<ChannelModel, TransformSpec> random_case(Rng& rng, int n, int sigma) {
    std::vector<double> a(static_cast<std::size_t>(n));
    for (double& aj : a) aj = rng.in(0.6, 3.0);
    const Complex momentum(rng.in(0.3, 2.0), rng.in(0.4, 2.5));
    const int m = n / 2;
    ComplexOrthogonal mixing = [&] {
        if (m == 1) {
            Matrix b(1, 1);
            b(0, 0) = rng.uniform() < 0.5 ? 1.0 : -1.0;
            return ComplexOrthogonal(b);
        }
        std::vector<Complex> angles(static_cast<std::size_t>(m * (m - 1) / 2));
        for (Complex& t : angles) t = Complex(rng.in(-1.0, 1.0), rng.in(-0.7, 0.7));
        return complex_orthogonal_general(m, angles);
    }();
    return {ChannelModel(a), TransformSpec(momentum, mixing, sigma)};
}

inline std::vector<double> reference_phases(const ChannelModel& model, double k) {
    std::vector<double> ref(static_cast<std::size_t>(model.size()));
    for (int j = 0; j < model.size(); ++j)
        ref[static_cast<std::size_t>(j)] = -std::atan(k / model.a(j));
    std::sort(ref.begin(), ref.end());
    return ref;
}

// --------------------------------------------------------------------------
// 1. The asymptotic frame matrix reproduces its frozen reference values.
inline Outcome criterion_frame_values() {
    const TransformSpec spec = benchmark_spec(Complex(1.5, 1.5));
    const double o1 = 0.936848, o2 = 0.305791, o3 = 0.16973;
    RealMatrix expected(4, 4);
    expected << 0.0, -o1, o2, -o3,
                o1, 0.0, o3, o2,
               -o2, -o3, 0.0, o1,
                o3, -o2, -o1, 0.0;
    const double tol = 5e-6;
    const RealMatrix om = omega(spec) / 4.5;
    const double dev = max_abs(RealMatrix(om - expected));
    return {dev <= tol, "max dev " + fmt(dev) + " (tol " + fmt(tol) + ")"};
}

// 2. Closed-form eigen-phases of the transformed S-matrix equal the reference
//    phases for random ensembles: 20 deformations x 10 momenta each.
inline Outcome criterion_closed_form_preservation() {
    Rng rng(0x00c0ffee5eed01ULL);
    const double tol = 1e-10;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = std::vector<int>{2, 4, 6}[static_cast<std::size_t>(trial % 3)];
        const auto [model, spec] = random_case(rng, n, trial % 2 == 0 ? 1 : -1);
        for (int i = 0; i < 10; ++i) {
            const double k = 10.0 * (1.0 - rng.uniform());
            const auto phases = eigenphases_symmetric_unitary(s2_matrix(model, spec, k));
            const auto ref = reference_phases(model, k);
            for (std::size_t j = 0; j < ref.size(); ++j)
                worst = std::max(worst, std::abs(phases[j] - ref[j]));
        }
    }
    return {worst <= tol, "200 momenta, max phase dev " + fmt(worst) + " (tol " + fmt(tol) + ")"};
}

// 3. An independent radial integration of the deformed potential reproduces
//    the reference eigen-phases and a unitary, symmetric S-matrix.
inline Outcome criterion_independent_integration() {
    const ChannelModel model = benchmark_model();
    const TransformSpec spec = benchmark_spec(Complex(1.5, 1.5));
    VerifyOptions opt;
    opt.grid = RadialGrid{1e-3, 20.0, 2e-3};
    const ScatterReport report = verify_epp(model, spec, {0.5, 1.0, 2.0, 4.0}, opt);
    return {report.pass, "phase dev " + fmt(report.max_oracle_deviation) + " (tol " +
                             fmt(opt.tol_eigenphase) + "), unitarity " +
                             fmt(report.max_unitarity_defect) + " (tol " +
                             fmt(opt.tol_unitarity) + ")"};
}

// 4. Structural invariants over random deformations: orthogonal frame,
//    antisymmetric generator, anti-Hermitian Wronskian, real symmetric V2.
inline Outcome criterion_invariants() {
    Rng rng(0x7a11ba5e0004ULL);
    const double tol_frame = 1e-10, tol_v2 = 1e-9;
    double worst_frame = 0.0, worst_v2 = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = std::vector<int>{2, 4, 6}[static_cast<std::size_t>(trial % 3)];
        const auto [model, spec] = random_case(rng, n, trial % 2 == 0 ? 1 : -1);
        const double ksq = rng.in(0.1, 10.0);
        const double r = rng.in(0.2, 5.0);

        const AsymptoticFrame frame = asymptotic_frame(spec, ksq);
        const RealMatrix id = RealMatrix::Identity(n, n);
        worst_frame =
            std::max(worst_frame, max_abs(RealMatrix(frame.rs * frame.rs.transpose() - id)));
        const double om_scale = std::max(1.0, max_abs(frame.omega));
        worst_frame = std::max(
            worst_frame, max_abs(RealMatrix(frame.omega + frame.omega.transpose())) / om_scale);
        const double e_im = spec.energy().imag();
        worst_frame = std::max(
            worst_frame,
            max_abs(RealMatrix(frame.omega.transpose() * frame.omega / (e_im * e_im) - id)));

        const TransformationSolutionSample s = sample(model, spec, r);
        const double w_scale = std::max(1.0, max_abs(s.w));
        worst_frame = std::max(worst_frame, max_abs(Matrix(s.w + s.w.adjoint())) / w_scale);
        worst_v2 = std::max({worst_v2, s.v2_imag_defect, s.v2_asym_defect});
    }
    const bool pass = worst_frame <= tol_frame && worst_v2 <= tol_v2;
    return {pass, "100 draws, frame dev " + fmt(worst_frame) + " (tol " + fmt(tol_frame) +
                      "), V2 defect " + fmt(worst_v2) + " (tol " + fmt(tol_v2) + ")"};
}

// 5. The equilibrated Wronskian stays well conditioned over the whole radial
//    range for all three benchmark momenta.
inline Outcome criterion_conditioning() {
    const ChannelModel model = benchmark_model();
    const double tol = 1e-10;
    double worst = std::numeric_limits<double>::infinity();
    for (const Complex momentum : {Complex(0.5, 1.5), Complex(1.0, 1.5), Complex(1.5, 1.5)}) {
        const TransformSpec spec = benchmark_spec(momentum);
        for (double r : log_grid(1e-3, 40.0, 2000)) {
            const auto [u, du] = build_u(model, spec, r);
            worst = std::min(worst, wronskian_rcond(u, du));
        }
    }
    return {worst >= tol, "min rcond " + fmt(worst) + " (floor " + fmt(tol) + ")"};
}

// 6. The deformation term W2 has died off at the matching radius.
inline Outcome criterion_tail_decay() {
    const ChannelModel model = benchmark_model();
    const double tol = 1e-6;
    double worst = 0.0;
    for (const Complex momentum : {Complex(0.5, 1.5), Complex(1.0, 1.5), Complex(1.5, 1.5)}) {
        const TransformSpec spec = benchmark_spec(momentum);
        const auto [u, du] = build_u(model, spec, 20.0);
        worst = std::max(worst, max_abs(w2_and_derivative(u, du, momentum).w2));
    }
    return {worst <= tol, "max |W2(20)| " + fmt(worst) + " (tol " + fmt(tol) + ")"};
}

// 7. The intertwiner maps reference solutions to solutions of the deformed
//    equation: residual of the transformed Jost solution under the deformed
//    Hamiltonian, second derivative taken by central differences.
inline Outcome criterion_intertwining() {
    const ChannelModel model = benchmark_model();
    const TransformSpec spec = benchmark_spec(Complex(1.5, 1.5));
    const double k = 1.3, ksq = k * k, h = 1e-4, tol = 1e-6;
    const auto transformed = [&](double r) {
        const DiagonalSolution f = jost_solution_matrix(k, r, model);
        const SolutionPair state = build_u(model, spec, r);
        return apply_L(spec, state, f.value, f.derivative, ksq);
    };
    double worst = 0.0;
    for (double r : {0.5, 1.0, 2.0, 3.0}) {
        const Matrix g = transformed(r);
        const Matrix g2 = (transformed(r + h) - 2.0 * g + transformed(r - h)) / (h * h);
        const Matrix v2 = deformed_potential(model, spec, r).cast<Complex>();
        const double resid = max_abs(Matrix(-g2 + v2 * g - ksq * g));
        worst = std::max(worst, resid / std::max(1.0, max_abs(g)));
    }
    return {worst <= tol, "max rel residual " + fmt(worst) + " (tol " + fmt(tol) + ")"};
}

// 8. The transformation exists exactly for even channel counts: odd counts
//    are rejected with a domain error, even counts construct cleanly.
inline Outcome criterion_parity_gate() {
    for (const int n : {1, 3, 5, 7}) {
        std::vector<double> a(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(j)] = 1.0 + 0.3 * j;
        const ChannelModel model(a);
        const int m = std::max(1, n / 2);
        const TransformSpec spec(
            Complex(1.0, 1.2),
            complex_orthogonal_general(
                m, std::vector<Complex>(static_cast<std::size_t>(m * (m - 1) / 2),
                                        Complex(0.3, 0.1))),
            1);
        try {
            validate_spec(model, spec);
            return {false, "odd count " + std::to_string(n) + " was not rejected"};
        } catch (const EppNotExistentError& e) {
            if (std::string(e.what()).find("odd channel count") == std::string::npos)
                return {false, "odd count " + std::to_string(n) +
                                   " rejected with unexpected message: " + e.what()};
        }
    }
    for (const int n : {2, 4, 6, 8}) {
        std::vector<double> a(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(j)] = 1.0 + 0.3 * j;
        const ChannelModel model(a);
        const int m = n / 2;
        const TransformSpec spec(
            Complex(1.0, 1.2),
            complex_orthogonal_general(
                m, std::vector<Complex>(static_cast<std::size_t>(m * (m - 1) / 2),
                                        Complex(0.3, 0.1))),
            1);
        validate_spec(model, spec);
        const TransformationSolutionSample s = sample(model, spec, 1.0);
        if (!s.w2.allFinite())
            return {false, "even count " + std::to_string(n) + " produced non-finite W2"};
    }
    return {true, "odd counts 1,3,5,7 rejected; even counts 2,4,6,8 construct"};
}

// 9. Growing |Re K| strengthens the induced channel coupling: the peak
//    off-diagonal magnitude of V2 increases strictly across the benchmark
//    momenta.
inline Outcome criterion_coupling_trend() {
    const ChannelModel model = benchmark_model();
    std::vector<double> peaks;
    for (const Complex momentum : {Complex(0.5, 1.5), Complex(1.0, 1.5), Complex(1.5, 1.5)}) {
        const TransformSpec spec = benchmark_spec(momentum);
        double peak = 0.0;
        for (double r : log_grid(1e-3, 40.0, 2000)) {
            const RealMatrix v2 = deformed_potential(model, spec, r);
            for (int i = 0; i < model.size(); ++i)
                for (int j = 0; j < model.size(); ++j)
                    if (i != j) peak = std::max(peak, std::abs(v2(i, j)));
        }
        peaks.push_back(peak);
    }
    const bool pass = peaks[0] < peaks[1] && peaks[1] < peaks[2];
    return {pass, "off-diagonal peaks " + fmt(peaks[0]) + " < " + fmt(peaks[1]) + " < " +
                      fmt(peaks[2]) + (pass ? "" : " -- not strictly increasing")};
}

// 10. In the weak-deformation limit (Im K -> 0) the deformed potential
//     collapses back onto the diagonal reference potential.
inline Outcome criterion_weak_limit() {
    const ChannelModel model = benchmark_model();
    const TransformSpec spec = benchmark_spec(Complex(1.5, 1e-4));
    const double tol = 1e-2;
    double worst = 0.0;
    for (double r : log_grid(1e-3, 40.0, 2000)) {
        const RealMatrix v2 = deformed_potential(model, spec, r);
        const RealMatrix v0 = v0_matrix(r, model);
        worst = std::max(worst, max_abs(RealMatrix(v2 - v0)));
    }
    return {worst <= tol, "max |V2 - V0| " + fmt(worst) + " (tol " + fmt(tol) + ")"};
}

}  // namespace detail

// Runs all criteria, printing one verdict line each; returns the number of
// failures (0 = accepted).
inline int run_acceptance(std::ostream& out) {
    using detail::Outcome;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"frozen asymptotic frame values", detail::criterion_frame_values},
        {"closed-form eigen-phase preservation", detail::criterion_closed_form_preservation},
        {"independent integration reproduces phases", detail::criterion_independent_integration},
        {"frame and reality invariants", detail::criterion_invariants},
        {"wronskian conditioning over radial grid", detail::criterion_conditioning},
        {"deformation tail decay", detail::criterion_tail_decay},
        {"intertwining residual", detail::criterion_intertwining},
        {"even channel-count gate", detail::criterion_parity_gate},
        {"coupling grows with Re K", detail::criterion_coupling_trend},
        {"weak-deformation limit", detail::criterion_weak_limit},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        char line[64];
        std::snprintf(line, sizeof(line), "[%2zu/%zu] %s  %6.2fs  ", i + 1, criteria.size(),
                      outcome.pass ? "PASS" : "FAIL", seconds);
        out << line << criteria[i].first << ": " << outcome.note << "\n";
        if (!outcome.pass) ++failures;
    }
    if (failures == 0)
        out << "acceptance: all " << criteria.size() << " criteria passed\n";
    else
        out << "acceptance: " << failures << " of " << criteria.size() << " criteria FAILED\n";
    return failures;
}

}  // namespace epp::acceptance
