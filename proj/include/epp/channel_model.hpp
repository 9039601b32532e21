#pragma once

#include <cmath>
#include <vector>

#include "epp/matrix.hpp"

namespace epp {

// Uncoupled reference problem: N s-wave channels with equal thresholds and
// v(r) = 2 a_j^2 / sinh^2(a_j r) in channel j.  Everything about it is known
// in closed form (Jost solutions, Jost matrix, S-matrix), which is what makes
// it usable as the seed of the deformation and as the oracle's baseline.
class ChannelModel {
public:
    explicit ChannelModel(std::vector<double> a) : a_(std::move(a)) {
        if (a_.empty()) throw ContractError("channel model: at least one channel required");
        for (double aj : a_)
            if (!(std::isfinite(aj) && aj > 0.0))
                throw ContractError("channel model: parameters a_j must be positive and finite");
    }

    [[nodiscard]] int size() const { return static_cast<int>(a_.size()); }
    [[nodiscard]] double a(int j) const { return a_.at(static_cast<std::size_t>(j)); }
    [[nodiscard]] const std::vector<double>& a_values() const { return a_; }
    [[nodiscard]] static constexpr int angular_momentum() { return 0; }
    [[nodiscard]] static constexpr int strength_index() { return 1; }

private:
    std::vector<double> a_;
};

namespace detail {

[[nodiscard]] inline double coth(double x) {
    if (x < 1e-4) return 1.0 / x + x / 3.0 - x * x * x / 45.0;
    return 1.0 / std::tanh(x);
}

[[nodiscard]] inline double inv_sinh_sq(double x) {
    if (x < 1e-4) return 1.0 / (x * x) - 1.0 / 3.0 + x * x / 15.0;
    const double s = std::sinh(x);
    const double ss = s * s;
    return std::isinf(ss) ? 0.0 : 1.0 / ss;
}

// Even Taylor coefficients of the regular solution: phi0 = k r^2 sum c_m r^{2m},
// c_m polynomial in A = a^2 and q = k^2.  Eight terms hold <=1e-14 relative
// error up to r sqrt(|k|^2 + a^2) = 0.25.
inline void regular_series(double A, Complex q, Complex c[8]) {
    const double A2 = A * A, A3 = A2 * A, A4 = A3 * A, A5 = A4 * A, A6 = A5 * A, A7 = A6 * A;
    const Complex q2 = q * q, q3 = q2 * q, q4 = q3 * q, q5 = q4 * q, q6 = q5 * q, q7 = q6 * q;
    c[0] = Complex(-1.0 / 3.0);
    c[1] = (2.0 * A + 3.0 * q) / 90.0;
    c[2] = -(16.0 * A2 + 12.0 * A * q + 9.0 * q2) / 7560.0;
    c[3] = (48.0 * A3 + 32.0 * A2 * q + 10.0 * A * q2 + 5.0 * q3) / 226800.0;
    c[4] = -(1280.0 * A4 + 832.0 * A3 * q + 224.0 * A2 * q2 + 40.0 * A * q3 + 15.0 * q4) /
           59875200.0;
    c[5] = (353792.0 * A5 + 228608.0 * A4 * q + 59680.0 * A3 * q2 + 8960.0 * A2 * q3 +
            1050.0 * A * q4 + 315.0 * q5) /
           163459296000.0;
    c[6] = -(430080.0 * A6 + 277504.0 * A5 * q + 71936.0 * A4 * q2 + 10432.0 * A3 * q3 +
             1008.0 * A2 * q4 + 84.0 * A * q5 + 21.0 * q6) /
           1961511552000.0;
    c[7] = (7407616.0 * A7 + 4777984.0 * A6 * q + 1236480.0 * A5 * q2 + 177920.0 * A4 * q3 +
            16560.0 * A3 * q4 + 1120.0 * A2 * q5 + 70.0 * A * q6 + 15.0 * q7) /
           333456963840000.0;
}

}  // namespace detail

[[nodiscard]] inline double v0(double r, double a) {
    if (!(r > 0.0)) throw ContractError("potential evaluated at r <= 0");
    return 2.0 * a * a * detail::inv_sinh_sq(a * r);
}

struct ValueDer {
    Complex value;
    Complex derivative;
};

// f0(k, r; a) = e^{ikr} (k + i a coth(ar)) / (k + i a): behaves like e^{ikr}
// at infinity, has a 1/r pole at the origin.
[[nodiscard]] inline ValueDer jost_solution(Complex k, double r, double a) {
    if (!(r > 0.0)) throw ContractError("jost solution evaluated at r <= 0");
    const Complex I(0.0, 1.0);
    const Complex den = k + I * a;
    if (std::abs(den) < 1e-12 * (std::abs(k) + a))
        throw ContractError("jost solution pole: k = -i a");
    const double c = detail::coth(a * r);
    const double s2 = detail::inv_sinh_sq(a * r);
    const Complex eik = std::exp(I * k * r);
    const Complex num = k + I * a * c;
    return {eik * num / den, eik * (I * k * num - I * a * a * s2) / den};
}

// Regular solution phi0 = (k cos(kr) - a coth(ar) sin(kr)) / (k^2 + a^2);
// vanishes like -k r^2 / 3 at the origin.  The difference in the numerator
// cancels catastrophically near r = 0, so a frozen even series takes over
// below r sqrt(|k|^2 + a^2) = 0.25.
[[nodiscard]] inline ValueDer regular_solution(Complex k, double r, double a) {
    if (!(r > 0.0)) throw ContractError("regular solution evaluated at r <= 0");
    const double scale = std::sqrt(std::norm(k) + a * a);
    if (r * scale <= 0.25) {
        Complex c[8];
        detail::regular_series(a * a, k * k, c);
        const Complex r2(r * r);
        Complex s = c[7];
        Complex ds = 16.0 * c[7];
        for (int m = 6; m >= 0; --m) {
            s = s * r2 + c[m];
            ds = ds * r2 + 2.0 * (m + 1) * c[m];
        }
        return {k * (r * r) * s, k * r * ds};
    }
    const double c = detail::coth(a * r);
    const double s2 = detail::inv_sinh_sq(a * r);
    const Complex den = k * k + a * a;
    const Complex ckr = std::cos(k * r);
    const Complex skr = std::sin(k * r);
    return {(k * ckr - a * c * skr) / den,
            (-k * k * skr + a * a * s2 * skr - a * c * k * ckr) / den};
}

// Lift a per-channel scalar into an N x N diagonal matrix.
template <class F>
[[nodiscard]] Matrix assemble_diagonal(const ChannelModel& model, F&& per_channel) {
    const int n = model.size();
    Matrix d = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) d(j, j) = per_channel(model.a(j));
    return d;
}

// Jost matrix F0(k) = diag(i / (k + i a_j)) of the uncoupled problem;
// equals lim_{r->0} f0(k, r) r channelwise.
[[nodiscard]] inline Matrix jost_matrix(Complex k, const ChannelModel& model) {
    const Complex I(0.0, 1.0);
    return assemble_diagonal(model, [&](double a) {
        const Complex den = k + I * a;
        if (std::abs(den) < 1e-12 * (std::abs(k) + a))
            throw ContractError("jost matrix pole: k = -i a");
        return I / den;
    });
}

// S-matrix of the reference problem: diag((a_j - i k) / (a_j + i k)), k > 0.
[[nodiscard]] inline Matrix s0_matrix(double k, const ChannelModel& model) {
    if (!(k > 0.0)) throw ContractError("s0 requires k > 0");
    const Complex I(0.0, 1.0);
    return assemble_diagonal(model,
                             [&](double a) { return (a - I * k) / (a + I * k); });
}

struct DiagonalSolution {
    Matrix value;
    Matrix derivative;
};

[[nodiscard]] inline DiagonalSolution regular_matrix(Complex k, double r,
                                                     const ChannelModel& model) {
    const int n = model.size();
    DiagonalSolution d{Matrix::Zero(n, n), Matrix::Zero(n, n)};
    for (int j = 0; j < n; ++j) {
        const ValueDer vd = regular_solution(k, r, model.a(j));
        d.value(j, j) = vd.value;
        d.derivative(j, j) = vd.derivative;
    }
    return d;
}

[[nodiscard]] inline DiagonalSolution jost_solution_matrix(Complex k, double r,
                                                           const ChannelModel& model) {
    const int n = model.size();
    DiagonalSolution d{Matrix::Zero(n, n), Matrix::Zero(n, n)};
    for (int j = 0; j < n; ++j) {
        const ValueDer vd = jost_solution(k, r, model.a(j));
        d.value(j, j) = vd.value;
        d.derivative(j, j) = vd.derivative;
    }
    return d;
}

[[nodiscard]] inline RealMatrix v0_matrix(double r, const ChannelModel& model) {
    const int n = model.size();
    RealMatrix v = RealMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) v(j, j) = v0(r, model.a(j));
    return v;
}

}  // namespace epp
