#include <catch2/catch_amalgamated.hpp>

#include "epp/channel_model.hpp"

using namespace epp;

namespace {

// Residual of the channel equation psi'' = (v0 - k^2) psi.  The second
// derivative is a Richardson-extrapolated central difference; the plain
// O(h^2) stencil is not accurate enough near the 2/r^2 core.
template <typename Solver>
double equation_residual(Solver&& solve, Complex k, double r, double a) {
    const auto second = [&](double h) {
        return (solve(k, r + h, a).value - 2.0 * solve(k, r, a).value +
                solve(k, r - h, a).value) /
               (h * h);
    };
    const double h = 1e-3;
    const Complex extrapolated = (4.0 * second(h / 2.0) - second(h)) / 3.0;
    const Complex f0 = solve(k, r, a).value;
    const Complex resid = extrapolated - (v0(r, a) - k * k) * f0;
    return std::abs(resid) / std::max(1.0, std::abs(f0));
}

template <typename Solver>
double derivative_residual(Solver&& solve, Complex k, double r, double a) {
    const auto first = [&](double h) {
        return (solve(k, r + h, a).value - solve(k, r - h, a).value) / (2.0 * h);
    };
    const double h = 1e-3;
    const Complex extrapolated = (4.0 * first(h / 2.0) - first(h)) / 3.0;
    return std::abs(extrapolated - solve(k, r, a).derivative);
}

}  // namespace

TEST_CASE("channel model validates its parameters", "[model]") {
    REQUIRE_THROWS_AS(ChannelModel({}), ContractError);
    REQUIRE_THROWS_AS(ChannelModel({1.0, 0.0}), ContractError);
    REQUIRE_THROWS_AS(ChannelModel({-2.0}), ContractError);
    REQUIRE_THROWS_AS(ChannelModel({1.0, std::numeric_limits<double>::infinity()}),
                      ContractError);

    const ChannelModel model({1.1, 2.5});
    CHECK(model.size() == 2);
    CHECK(model.a(0) == 1.1);
    CHECK(model.a(1) == 2.5);
    CHECK(model.a_values() == std::vector<double>{1.1, 2.5});
    CHECK(ChannelModel::angular_momentum() == 0);
    CHECK(ChannelModel::strength_index() == 1);
}

TEST_CASE("reference potential values", "[model]") {
    CHECK(v0(1.0, 1.0) == Catch::Approx(2.0 / std::pow(std::sinh(1.0), 2)).epsilon(1e-14));
    CHECK(v0(0.5, 2.0) == Catch::Approx(8.0 / std::pow(std::sinh(1.0), 2)).epsilon(1e-14));
    REQUIRE_THROWS_AS(v0(0.0, 1.0), ContractError);
    REQUIRE_THROWS_AS(v0(-1.0, 1.0), ContractError);

    const ChannelModel model({1.0, 2.0});
    const RealMatrix v = v0_matrix(0.7, model);
    CHECK(v(0, 0) == Catch::Approx(v0(0.7, 1.0)));
    CHECK(v(1, 1) == Catch::Approx(v0(0.7, 2.0)));
    CHECK(v(0, 1) == 0.0);
    CHECK(v(1, 0) == 0.0);
}

TEST_CASE("jost solution solves the channel equation", "[model]") {
    const auto solve = [](Complex k, double r, double a) { return jost_solution(k, r, a); };
    for (const Complex k : {Complex(1.1, 0.0), Complex(0.8, 0.6)})
        for (const double r : {0.4, 0.9, 2.0}) {
            CAPTURE(k.real(), k.imag(), r);
            CHECK(equation_residual(solve, k, r, 1.0) < 1e-7);
            CHECK(derivative_residual(solve, k, r, 1.0) < 1e-7);
        }
    REQUIRE_THROWS_AS(jost_solution(Complex(1.0, 0.0), -0.5, 1.0), ContractError);
    // pole of the normalization at k = -i a
    REQUIRE_THROWS_AS(jost_solution(Complex(0.0, -1.4), 1.0, 1.4), ContractError);
}

TEST_CASE("jost solution tends to a plane wave", "[model]") {
    const Complex I(0.0, 1.0);
    const Complex k(1.3, 0.0);
    const ValueDer f = jost_solution(k, 30.0, 1.0);
    CHECK(std::abs(f.value * std::exp(-I * k * 30.0) - 1.0) < 1e-12);
    CHECK(std::abs(f.derivative * std::exp(-I * k * 30.0) - I * k) < 1e-12);
}

TEST_CASE("regular solution solves the channel equation across the series joint", "[model]") {
    const auto solve = [](Complex k, double r, double a) { return regular_solution(k, r, a); };
    // radii straddle the series/direct switch for both momenta
    for (const Complex k : {Complex(1.1, 0.0), Complex(1.5, 1.5)})
        for (const double r : {0.05, 0.12, 0.2, 0.9, 2.5}) {
            CAPTURE(k.real(), k.imag(), r);
            CHECK(equation_residual(solve, k, r, 1.1) < 1e-7);
            CHECK(derivative_residual(solve, k, r, 1.1) < 1e-7);
        }
    REQUIRE_THROWS_AS(regular_solution(Complex(1.0, 0.0), 0.0, 1.0), ContractError);
}

TEST_CASE("regular solution boundary behavior at the origin", "[model]") {
    const Complex k(1.3, 0.2);
    const double r = 1e-6;
    const ValueDer phi = regular_solution(k, r, 0.9);
    CHECK(std::abs(phi.value / (k * r * r) + 1.0 / 3.0) < 1e-9);
    CHECK(std::abs(phi.derivative / (2.0 * k * r) + 1.0 / 3.0) < 1e-9);
}

TEST_CASE("connection identity between the solution bases", "[model]") {
    // phi(k) = (2i)^-1 [ f(-k, r) F(k) - f(k, r) F(-k) ], all matrices diagonal
    const ChannelModel model({1.1, 1.7});
    const Complex I(0.0, 1.0);
    const Complex k(0.9, 0.3);
    for (const double r : {0.6, 1.8}) {
        const Matrix lhs = 2.0 * I * regular_matrix(k, r, model).value;
        const Matrix rhs = jost_solution_matrix(-k, r, model).value * jost_matrix(k, model) -
                           jost_solution_matrix(k, r, model).value * jost_matrix(-k, model);
        CAPTURE(r);
        CHECK(max_abs(Matrix(lhs - rhs)) < 1e-10);
    }
}

TEST_CASE("wronskian of regular and jost solutions equals k times the jost matrix", "[model]") {
    const ChannelModel model({1.1, 1.5});
    const Complex k(1.5, 1.5);
    const Matrix expected = k * jost_matrix(k, model);
    for (const double r : {0.05, 0.3, 1.1, 2.9}) {
        const DiagonalSolution phi = regular_matrix(k, r, model);
        const DiagonalSolution f = jost_solution_matrix(k, r, model);
        const Matrix w = wronskian(phi.value, f.value, phi.derivative, f.derivative);
        CAPTURE(r);
        CHECK(max_abs(Matrix(w - expected)) < 1e-10);
    }
}

TEST_CASE("free S-matrix is diagonal with the reference phases", "[model]") {
    const ChannelModel model({1.1, 2.5});
    const double k = 1.7;
    const Complex I(0.0, 1.0);
    const Matrix s = s0_matrix(k, model);
    CHECK(std::abs(s(0, 0) - (1.1 - I * k) / (1.1 + I * k)) < 1e-15);
    CHECK(std::abs(s(1, 1) - (2.5 - I * k) / (2.5 + I * k)) < 1e-15);
    CHECK(std::abs(s(0, 1)) == 0.0);
    CHECK(std::abs(std::abs(s(0, 0)) - 1.0) < 1e-15);

    const auto phases = eigenphases_symmetric_unitary(s);
    std::vector<double> ref = {-std::atan(k / 1.1), -std::atan(k / 2.5)};
    std::sort(ref.begin(), ref.end());
    CHECK(std::abs(phases[0] - ref[0]) < 1e-12);
    CHECK(std::abs(phases[1] - ref[1]) < 1e-12);

    REQUIRE_THROWS_AS(s0_matrix(0.0, model), ContractError);
    REQUIRE_THROWS_AS(s0_matrix(-1.0, model), ContractError);
}

TEST_CASE("hyperbolic helpers stay accurate through their series joints", "[model]") {
    for (const double x : {5e-5, 2e-4, 0.1}) {
        CAPTURE(x);
        CHECK(std::abs(detail::coth(x) * std::tanh(x) - 1.0) < 1e-13);
        CHECK(std::abs(detail::inv_sinh_sq(x) * std::pow(std::sinh(x), 2) - 1.0) < 1e-13);
    }
    CHECK(detail::coth(800.0) == 1.0);
    CHECK(detail::inv_sinh_sq(800.0) == 0.0);
}
