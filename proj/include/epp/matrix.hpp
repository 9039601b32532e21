#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "epp/errors.hpp"

namespace epp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

[[nodiscard]] inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

[[nodiscard]] inline double max_abs(const RealMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

namespace detail {

[[nodiscard]] inline std::string short_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

}  // namespace detail

// Matrix Wronskian W[u, v](r) = u^T v' - u'^T v of two solution matrices
// sampled at the same radius.
[[nodiscard]] inline Matrix wronskian(const Matrix& u, const Matrix& v, const Matrix& du,
                                      const Matrix& dv) {
    if (u.rows() != v.rows() || u.rows() != du.rows() || u.rows() != dv.rows() ||
        u.cols() != du.cols() || v.cols() != dv.cols())
        throw ShapeError("wronskian: operand dimensions disagree");
    return u.transpose() * dv - du.transpose() * v;
}

// Reciprocal condition number estimate (1-norm, via LU).
[[nodiscard]] inline double rcond_estimate(const Matrix& m) {
    if (m.rows() != m.cols() || m.size() == 0) throw ShapeError("rcond: matrix must be square");
    return Eigen::PartialPivLU<Matrix>(m).rcond();
}

// Below this reciprocal condition number an inverse is refused.
inline constexpr double kSingularRcond = 1e-13;

[[nodiscard]] inline Matrix invert_checked(const Matrix& m, const char* what = "matrix",
                                           double rcond_floor = kSingularRcond) {
    if (m.rows() != m.cols() || m.size() == 0)
        throw ShapeError(std::string("invert: ") + what + " must be square");
    Eigen::PartialPivLU<Matrix> lu(m);
    const double rc = lu.rcond();
    if (!(rc >= rcond_floor))
        throw SingularMatrixError(std::string(what) + " numerically singular: rcond = " +
                                  detail::short_double(rc));
    return lu.inverse();
}

// M x M matrix with B^T B = B B^T = I over the complex field.  Construction
// validates the defining relations; downstream code relies on them.
class ComplexOrthogonal {
public:
    explicit ComplexOrthogonal(Matrix b, double tol = 1e-12) : b_(std::move(b)) {
        if (b_.rows() != b_.cols() || b_.size() == 0)
            throw ShapeError("B must be square and nonempty");
        if (!b_.allFinite()) throw ContractError("B not complex-orthogonal: non-finite entries");
        const Matrix id = Matrix::Identity(b_.rows(), b_.cols());
        const double left = max_abs(Matrix(b_.transpose() * b_ - id));
        const double right = max_abs(Matrix(b_ * b_.transpose() - id));
        const double defect = std::max(left, right);
        if (!(defect <= tol))
            throw ContractError("B not complex-orthogonal: defect " +
                                detail::short_double(defect));
    }

    [[nodiscard]] const Matrix& matrix() const { return b_; }
    [[nodiscard]] Eigen::Index size() const { return b_.rows(); }

private:
    Matrix b_;
};

// Rotation-like 2x2 member [[b, s], [-s, b]], s = branch * sqrt(1 - b^2)
// (principal square root).  Both branches are complex-orthogonal.
[[nodiscard]] inline ComplexOrthogonal complex_orthogonal_2x2(Complex b, int branch = 1) {
    if (branch != 1 && branch != -1) throw ContractError("branch must be +1 or -1");
    const Complex s = static_cast<double>(branch) * std::sqrt(Complex(1.0) - b * b);
    Matrix m(2, 2);
    m << b, s, -s, b;
    return ComplexOrthogonal(std::move(m));
}

[[nodiscard]] inline std::vector<std::pair<int, int>> canonical_planes(int m) {
    std::vector<std::pair<int, int>> p;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) p.emplace_back(i, j);
    return p;
}

// Product of planar rotations with complex angles; spans the identity
// component of the complex orthogonal group when given all m(m-1)/2 planes.
[[nodiscard]] inline ComplexOrthogonal complex_orthogonal_general(
    int m, const std::vector<Complex>& angles, const std::vector<std::pair<int, int>>& planes) {
    if (m < 1) throw ContractError("orthogonal builder: size must be positive");
    if (angles.size() != planes.size())
        throw ContractError("orthogonal builder: one angle per plane required");
    Matrix g = Matrix::Identity(m, m);
    for (std::size_t i = 0; i < planes.size(); ++i) {
        const auto [p, q] = planes[i];
        if (p < 0 || q < 0 || p >= m || q >= m || p == q)
            throw ContractError("orthogonal builder: invalid rotation plane");
        const Complex c = std::cos(angles[i]);
        const Complex s = std::sin(angles[i]);
        Matrix r = Matrix::Identity(m, m);
        r(p, p) = c;
        r(q, q) = c;
        r(p, q) = s;
        r(q, p) = -s;
        g = g * r;
    }
    return ComplexOrthogonal(std::move(g));
}

[[nodiscard]] inline ComplexOrthogonal complex_orthogonal_general(
    int m, const std::vector<Complex>& angles) {
    const auto planes = canonical_planes(m);
    if (angles.size() != planes.size())
        throw ContractError("orthogonal builder: expected " + std::to_string(planes.size()) +
                            " angles for size " + std::to_string(m));
    return complex_orthogonal_general(m, angles, planes);
}

// Eigen-phases of a unitary symmetric S: half-arguments of its eigenvalues,
// folded into (-pi/2, pi/2] and sorted ascending.  The contract (unitarity and
// symmetry within tol) is checked before any value is returned.
[[nodiscard]] inline std::vector<double> eigenphases_symmetric_unitary(const Matrix& s,
                                                                       double tol = 1e-10) {
    if (s.rows() != s.cols() || s.size() == 0) throw ShapeError("eigenphases: S must be square");
    const Eigen::Index n = s.rows();
    const Matrix id = Matrix::Identity(n, n);
    const double unit = max_abs(Matrix(s * s.adjoint() - id));
    if (!(unit <= tol))
        throw ContractError("eigenphases: S not unitary, defect " + detail::short_double(unit));
    const double sym = max_abs(Matrix(s - s.transpose()));
    if (!(sym <= tol))
        throw ContractError("eigenphases: S not symmetric, defect " + detail::short_double(sym));

    Eigen::ComplexEigenSolver<Matrix> es(s, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw AccuracyError("eigenphases: eigensolver failed");
    std::vector<double> phases(static_cast<std::size_t>(n));
    constexpr double half_pi = std::numbers::pi / 2.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double d = 0.5 * std::arg(es.eigenvalues()[i]);
        if (d <= -half_pi) d += std::numbers::pi;
        if (d > half_pi) d -= std::numbers::pi;
        phases[static_cast<std::size_t>(i)] = d;
    }
    std::sort(phases.begin(), phases.end());
    return phases;
}

}  // namespace epp
