#pragma once

#include <utility>

#include "epp/channel_model.hpp"

namespace epp {

// ============================================================================
// Deformation data
// ============================================================================

// Momentum-space description of the isophase deformation: complex momentum K
// (Im K > 0, Re K != 0, so the pole pair sits off both axes), an M x M complex
// orthogonal mixing matrix B and a sign sigma.  The deformed problem has
// N = 2M channels; odd N admits no such deformation at all.
class TransformSpec {
public:
    TransformSpec(Complex momentum, ComplexOrthogonal mixing, int sigma = 1)
        : k_(momentum), b_(std::move(mixing)), sigma_(sigma) {
        if (!(std::isfinite(k_.real()) && std::isfinite(k_.imag())))
            throw ContractError("transform momentum must be finite");
        if (!(k_.imag() > 0.0)) throw ContractError("transform momentum requires Im K > 0");
        if (k_.real() == 0.0) throw ContractError("transform momentum requires Re K != 0");
        if (sigma_ != 1 && sigma_ != -1) throw ContractError("sigma must be +1 or -1");
    }

    [[nodiscard]] Complex momentum() const { return k_; }
    [[nodiscard]] Complex energy() const { return k_ * k_; }
    [[nodiscard]] const Matrix& mixing() const { return b_.matrix(); }
    [[nodiscard]] int half_size() const { return static_cast<int>(b_.size()); }
    [[nodiscard]] int size() const { return 2 * half_size(); }
    [[nodiscard]] int sigma() const { return sigma_; }

private:
    Complex k_;
    ComplexOrthogonal b_;
    int sigma_;
};

namespace detail {

inline void check_compatible(const ChannelModel& model, const TransformSpec& spec) {
    if (model.size() % 2 != 0)
        throw EppNotExistentError("odd channel count: EPP transformation does not exist");
    if (model.size() != spec.size())
        throw EppNotExistentError("channel count " + std::to_string(model.size()) +
                                  " incompatible with mixing matrix for N = " +
                                  std::to_string(spec.size()));
}

}  // namespace detail

// Existence and consistency gate.  Throws EppNotExistentError for odd or
// mismatched channel counts and DegenerateBError when Re B is singular.
inline void validate_spec(const ChannelModel& model, const TransformSpec& spec) {
    detail::check_compatible(model, spec);
    const RealMatrix g = 2.0 * spec.mixing().real();
    if (!(Eigen::PartialPivLU<RealMatrix>(g).rcond() >= 1e-12))
        throw DegenerateBError("Re B numerically singular: asymptotic frame undefined");
}

// ============================================================================
// Transformation solution
// ============================================================================

struct SolutionPair {
    Matrix u;
    Matrix du;
};

// Factorization solution in the canonical gauge.  Left block columns carry the
// regular solution (vanish like r^2 at the origin), right block columns carry
// Jost solutions at K (decay like e^{-Im K r}); B couples the two channel
// halves through Q = sigma i B.
[[nodiscard]] inline SolutionPair build_u(const ChannelModel& model, const TransformSpec& spec,
                                          double r) {
    detail::check_compatible(model, spec);
    const int n = model.size();
    const int m = spec.half_size();
    const Complex K = spec.momentum();
    const Complex I(0.0, 1.0);
    const Complex q = static_cast<double>(spec.sigma()) * I;
    const Matrix& B = spec.mixing();

    Matrix u = Matrix::Zero(n, n);
    Matrix du = Matrix::Zero(n, n);
    std::vector<ValueDer> reg(static_cast<std::size_t>(n)), jost(static_cast<std::size_t>(n));
    std::vector<Complex> pre(static_cast<std::size_t>(n));  // -2K (K + i a_j): phi0 F0^{-1} prefactor
    for (int j = 0; j < n; ++j) {
        reg[j] = regular_solution(K, r, model.a(j));
        jost[j] = jost_solution(K, r, model.a(j));
        pre[j] = -2.0 * K * (K + I * model.a(j));
    }
    for (int j = 0; j < m; ++j) {
        u(j, j) = pre[j] * reg[j].value;
        du(j, j) = pre[j] * reg[j].derivative;
    }
    for (int i = m; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            u(i, j) = pre[i] * reg[i].value * q * B(i - m, j);
            du(i, j) = pre[i] * reg[i].derivative * q * B(i - m, j);
        }
    for (int i = 0; i < m; ++i)
        for (int j = m; j < n; ++j) {
            u(i, j) = jost[i].value * (-q) * B(j - m, i);
            du(i, j) = jost[i].derivative * (-q) * B(j - m, i);
        }
    for (int j = m; j < n; ++j) {
        u(j, j) = jost[j].value;
        du(j, j) = jost[j].derivative;
    }
    return {std::move(u), std::move(du)};
}

namespace detail {

struct EquilibratedW {
    Matrix uh, duh;  // column-rescaled copies of (u, u')
    Matrix w;        // W[uh, uh*]
    Eigen::PartialPivLU<Matrix> lu;
    double rcond = 0.0;
};

// Per-column power-of-two rescaling.  A constant gauge u -> u diag(1/s_j)
// leaves W2, V2 and L exactly invariant while keeping W[u, u*] well scaled at
// both ends of the radial range (columns grow/decay like e^{+-Im K r}).
[[nodiscard]] inline EquilibratedW equilibrate(const Matrix& u, const Matrix& du) {
    EquilibratedW e;
    e.uh = u;
    e.duh = du;
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        const double m =
            std::max(u.col(j).cwiseAbs().maxCoeff(), du.col(j).cwiseAbs().maxCoeff());
        if (!(m > 0.0) || !std::isfinite(m)) continue;
        const double s = std::ldexp(1.0, -static_cast<int>(std::lround(std::log2(m))));
        e.uh.col(j) *= s;
        e.duh.col(j) *= s;
    }
    e.w = wronskian(e.uh, e.uh.conjugate(), e.duh, e.duh.conjugate());
    e.lu.compute(e.w);
    e.rcond = e.lu.rcond();
    return e;
}

}  // namespace detail

// rcond of W[u, u*] in the equilibrated column gauge; the raw Wronskian's
// conditioning decays like e^{-4 Im K r} purely through column scales.
[[nodiscard]] inline double wronskian_rcond(const Matrix& u, const Matrix& du) {
    return detail::equilibrate(u, du).rcond;
}

struct W2Pair {
    Matrix w2;
    Matrix dw2;
    double wronskian_rcond = 0.0;
};

// W2 = (E - E*) u* W[u,u*]^{-1} u^T and its analytic radial derivative, using
// W[u,u*]' = (E - E*) u^T u*.  No finite differences anywhere.
[[nodiscard]] inline W2Pair w2_and_derivative(const Matrix& u, const Matrix& du, Complex K) {
    if (u.rows() != u.cols() || u.rows() != du.rows() || u.cols() != du.cols())
        throw ShapeError("w2: u and u' must be square and matching");
    const auto e = detail::equilibrate(u, du);
    if (!(e.rcond >= kSingularRcond))
        throw SingularMatrixError("W[u, u*] numerically singular: rcond = " +
                                  detail::short_double(e.rcond));
    const Complex E = K * K;
    const Complex c = E - std::conj(E);
    const Matrix x = e.lu.solve(Matrix(e.uh.transpose()));
    const Matrix y =
        e.lu.solve(Matrix(e.duh.transpose() - c * (e.uh.transpose() * (e.uh.conjugate() * x))));
    W2Pair out;
    out.w2 = c * (e.uh.conjugate() * x);
    out.dw2 = c * (e.duh.conjugate() * x + e.uh.conjugate() * y);
    out.wronskian_rcond = e.rcond;
    return out;
}

struct TransformationSolutionSample {
    double r = 0.0;
    Matrix u, du;
    Matrix w;    // W[u, u*] in the raw gauge
    Matrix w2, dw2;
    RealMatrix v2;
    double wronskian_rcond = 0.0;
    double v2_imag_defect = 0.0;
    double v2_asym_defect = 0.0;
};

// Deformed potential without the bookkeeping of sample(); this is the hot path
// of the scattering oracle.
[[nodiscard]] inline RealMatrix deformed_potential(const ChannelModel& model,
                                                   const TransformSpec& spec, double r) {
    const auto [u, du] = build_u(model, spec, r);
    const W2Pair p = w2_and_derivative(u, du, spec.momentum());
    RealMatrix v = -2.0 * p.dw2.real();
    for (int j = 0; j < model.size(); ++j) v(j, j) += v0(r, model.a(j));
    return RealMatrix(0.5 * (v + v.transpose()));
}

[[nodiscard]] inline TransformationSolutionSample sample(const ChannelModel& model,
                                                         const TransformSpec& spec, double r) {
    TransformationSolutionSample s;
    s.r = r;
    auto [u, du] = build_u(model, spec, r);
    W2Pair p = w2_and_derivative(u, du, spec.momentum());
    s.w = wronskian(u, u.conjugate(), du, du.conjugate());
    const Matrix v2c = v0_matrix(r, model).cast<Complex>() - 2.0 * p.dw2;
    const RealMatrix v2r = v2c.real();
    s.v2 = 0.5 * (v2r + v2r.transpose());
    s.v2_imag_defect = max_abs(Matrix(v2c.imag().cast<Complex>()));
    s.v2_asym_defect = max_abs(RealMatrix(v2r - v2r.transpose()));
    s.u = std::move(u);
    s.du = std::move(du);
    s.w2 = std::move(p.w2);
    s.dw2 = std::move(p.dw2);
    s.wronskian_rcond = p.wronskian_rcond;
    if (!s.v2.allFinite()) throw AccuracyError("deformed potential has non-finite entries");
    return s;
}

// ============================================================================
// Asymptotic frame
// ============================================================================

// Long-range mixer: real, antisymmetric, Omega^T Omega = (2 Re K Im K)^2 I.
// Block form in M x M blocks with G = 2 Re B:
//   Omega = 2 Im(E) [[G^-1 Im B, sigma G^-1], [-sigma G^-T, -(Im B) G^-1]].
[[nodiscard]] inline RealMatrix omega(const TransformSpec& spec) {
    const int m = spec.half_size();
    const int n = 2 * m;
    const RealMatrix g = 2.0 * spec.mixing().real();
    Eigen::PartialPivLU<RealMatrix> lu(g);
    if (!(lu.rcond() >= 1e-12))
        throw DegenerateBError("Re B numerically singular: asymptotic frame undefined");
    const RealMatrix gi = lu.inverse();
    const RealMatrix imb = spec.mixing().imag();
    const double eim = 2.0 * spec.momentum().real() * spec.momentum().imag();
    const double s = static_cast<double>(spec.sigma());
    RealMatrix o(n, n);
    o.topLeftCorner(m, m) = 2.0 * eim * (gi * imb);
    o.topRightCorner(m, m) = (2.0 * eim * s) * gi;
    o.bottomLeftCorner(m, m) = (-2.0 * eim * s) * gi.transpose();
    o.bottomRightCorner(m, m) = -2.0 * eim * (imb * gi);
    return o;
}

[[nodiscard]] inline RealMatrix u_infinity(const TransformSpec& spec, double ksq) {
    const double kr = spec.momentum().real();
    const double ki = spec.momentum().imag();
    RealMatrix u = omega(spec);
    u.diagonal().array() += -ksq + kr * kr - ki * ki;
    return u;
}

// |det| scale of U_inf: U_inf U_inf^T = ((k_r^2 - k_i^2 - k^2)^2 + 4 k_r^2 k_i^2) I,
// strictly positive for every real k^2 since k_r k_i != 0.
[[nodiscard]] inline double frame_normalization(const TransformSpec& spec, double ksq) {
    const double kr = spec.momentum().real();
    const double ki = spec.momentum().imag();
    const double t = -ksq + kr * kr - ki * ki;
    return std::sqrt(t * t + 4.0 * kr * kr * ki * ki);
}

[[nodiscard]] inline RealMatrix rs_matrix(const TransformSpec& spec, double ksq) {
    return RealMatrix(u_infinity(spec, ksq) / frame_normalization(spec, ksq));
}

struct AsymptoticFrame {
    RealMatrix omega;
    RealMatrix u_infinity;
    RealMatrix rs;
    double normalization = 0.0;
};

[[nodiscard]] inline AsymptoticFrame asymptotic_frame(const TransformSpec& spec, double ksq) {
    AsymptoticFrame f;
    f.omega = omega(spec);
    f.u_infinity = u_infinity(spec, ksq);
    f.normalization = frame_normalization(spec, ksq);
    f.rs = f.u_infinity / f.normalization;
    return f;
}

// Transformed S-matrix S2(k) = R_S S0 R_S^T: a real orthogonal congruence of
// the diagonal reference S-matrix, hence the same eigen-phases at every k.
[[nodiscard]] inline Matrix s2_matrix(const ChannelModel& model, const TransformSpec& spec,
                                      double k) {
    detail::check_compatible(model, spec);
    const Matrix r = rs_matrix(spec, k * k).cast<Complex>();
    return r * s0_matrix(k, model) * r.transpose();
}

// ============================================================================
// Intertwiner
// ============================================================================

// L f = (E - k^2) f - (E - E*) u* W[u,u*]^{-1} W[u, f]  for f solving the
// reference equation at k^2.  Algebraically identical to
// (-k^2 + Re E) f + W2 (Re(w) f - f'), w = u' u^{-1}, by symmetry of w, but
// needs no inverse of u: finite through det u = 0 radii and stable at large r
// where W2 and w separately degenerate.
[[nodiscard]] inline Matrix apply_L(const TransformSpec& spec, const SolutionPair& state,
                                    const Matrix& f, const Matrix& df, double ksq) {
    if (f.rows() != state.u.rows() || df.rows() != state.u.rows() || f.cols() != df.cols())
        throw ShapeError("apply_L: operand dimensions disagree");
    const auto e = detail::equilibrate(state.u, state.du);
    if (!(e.rcond >= kSingularRcond))
        throw SingularMatrixError("W[u, u*] numerically singular: rcond = " +
                                  detail::short_double(e.rcond));
    const Complex E = spec.energy();
    const Complex c = E - std::conj(E);
    const Matrix wuf = e.uh.transpose() * df - e.duh.transpose() * f;
    return (E - ksq) * f - c * (e.uh.conjugate() * e.lu.solve(wuf));
}

// ============================================================================
// Factorization bookkeeping
// ============================================================================

// Jost-basis parameter matrix X recovered from the hardwired canonical gauge
// (the free parameter matrix in the solution basis is zero; any other choice
// produces a singular deformed potential).  Diagnostic only: emitted so runs
// can be compared against hand calculations.
[[nodiscard]] inline Matrix diagnostic_x(const ChannelModel& model, const TransformSpec& spec) {
    detail::check_compatible(model, spec);
    const int m = spec.half_size();
    const Complex K = spec.momentum();
    const Complex I(0.0, 1.0);
    Matrix s1 = Matrix::Zero(m, m);
    Matrix s3 = Matrix::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        s1(j, j) = (K + I * model.a(j)) / (I * model.a(j) - K);
        s3(j, j) = (K + I * model.a(m + j)) / (I * model.a(m + j) - K);
    }
    // the off-diagonal block of F0(-K) F0(K)^{-1} vanishes for a diagonal model
    return Matrix(-s1 + spec.mixing().transpose() * s3 * spec.mixing());
}

struct CanonicalFactorization {
    Matrix c;
    Matrix d;
    Matrix x_diagnostic;
};

// Constant matrices (C | D) fixing u between the regular and Jost bases:
// C = [[I, 0], [Q, 0]], D = [[X, -Q^T], [0, I]] with Q = sigma i B.
// D^T C = C^T D holds iff X is symmetric.
[[nodiscard]] inline CanonicalFactorization canonical_factorization(const ChannelModel& model,
                                                                    const TransformSpec& spec) {
    detail::check_compatible(model, spec);
    const int m = spec.half_size();
    const int n = 2 * m;
    const Complex q = static_cast<double>(spec.sigma()) * Complex(0.0, 1.0);
    CanonicalFactorization f;
    f.x_diagnostic = diagnostic_x(model, spec);
    f.c = Matrix::Zero(n, n);
    f.c.topLeftCorner(m, m) = Matrix::Identity(m, m);
    f.c.bottomLeftCorner(m, m) = q * spec.mixing();
    f.d = Matrix::Zero(n, n);
    f.d.topLeftCorner(m, m) = f.x_diagnostic;
    f.d.topRightCorner(m, m) = -q * spec.mixing().transpose();
    f.d.bottomRightCorner(m, m) = Matrix::Identity(m, m);
    return f;
}

}  // namespace epp
