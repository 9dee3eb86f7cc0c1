#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "embjet/ck.hpp"
#include "test_util.hpp"

using namespace embjet;

namespace {

mpq_class inv_factorial(int m) {
    mpz_class f = 1;
    for (int k = 2; k <= m; ++k) f *= k;
    return mpq_class(1) / mpq_class(f);
}

} // namespace

TEST_CASE("first order: d/dx2 u = u reproduces the exponential coefficients") {
    FirstOrderProblem p;
    p.nvars = 2;
    p.unknowns = 1;
    p.order = 8;
    p.initial = {Jet::constant(1, 8, Scalar::rational(1))};
    p.rhs = [](const std::vector<Jet>& f) { return f; };
    auto u = solve_first_order(p);
    REQUIRE(u.size() == 1);
    for (int m = 0; m <= 8; ++m) {
        MultiIndex mi(2);
        mi[1] = m;
        CHECK(u[0].coeff(mi) == Scalar::rational(inv_factorial(m)));
    }
}

TEST_CASE("first order: transport d/dx2 u = d/dx1 u with u0 = x1^2") {
    int K = 6;
    FirstOrderProblem p;
    p.nvars = 2;
    p.unknowns = 1;
    p.order = K;
    Jet x1d = Jet::variable(0, 1, K, Mode::exact);
    p.initial = {x1d * x1d};
    p.rhs = [](const std::vector<Jet>& f) {
        return std::vector<Jet>{differentiate(f[0], 0).with_order(f[0].order())};
    };
    auto u = solve_first_order(p);
    Jet x1 = Jet::variable(0, 2, K, Mode::exact);
    Jet x2 = Jet::variable(1, 2, K, Mode::exact);
    CHECK(u[0] == ((x1 + x2) * (x1 + x2)).with_order(K));
}

TEST_CASE("first order: zero right-hand side keeps the data constant in x_n") {
    std::mt19937 rng(3);
    int K = 5;
    Jet data = testutil::random_rational_jet(rng, 2, K);
    FirstOrderProblem p;
    p.nvars = 3;
    p.unknowns = 1;
    p.order = K;
    p.initial = {data};
    p.rhs = [K](const std::vector<Jet>& f) {
        return std::vector<Jet>{Jet(f[0].nvars(), K, f[0].mode())};
    };
    auto u = solve_first_order(p);
    CHECK(u[0] == prolong(data, 3, K));
}

TEST_CASE("second order: d2/dx2^2 u = -u with cosine data") {
    int K = 8;
    SecondOrderProblem p;
    p.nvars = 2;
    p.dim = 1;
    p.order = K;
    p.u0 = {Jet::constant(1, K, Scalar::rational(1))};
    p.u1 = {Jet(1, K, Mode::exact)};
    p.matrix = [K](const std::vector<Jet>& u) {
        return JetMatrix(1, 1, Jet::constant(u[0].nvars(), K, Scalar::rational(1)));
    };
    p.rhs = [](const std::vector<Jet>& u) { return std::vector<Jet>{-u[0]}; };
    auto u = solve_second_order(p);
    REQUIRE(u.size() == 1);
    for (int m = 0; m <= K; ++m) {
        MultiIndex mi(2);
        mi[1] = m;
        Scalar expect = Scalar::rational(0);
        if (m % 2 == 0) {
            mpq_class c = inv_factorial(m);
            if (m % 4 == 2) c = -c;
            expect = Scalar::rational(c);
        }
        CHECK(u[0].coeff(mi) == expect);
    }
}

TEST_CASE("second order: wave-type system recovers (x1 + x2)^3 from its data") {
    // u(x1,x2) = (x1+x2)^3 solves u_{22} = u_{11} with u0 = x1^3, u1 = 3 x1^2.
    int K = 6;
    SecondOrderProblem p;
    p.nvars = 2;
    p.dim = 1;
    p.order = K;
    Jet x1d = Jet::variable(0, 1, K, Mode::exact);
    p.u0 = {x1d * x1d * x1d};
    p.u1 = {(x1d * x1d).scale(Scalar::rational(3)).with_order(K)};
    p.matrix = [K](const std::vector<Jet>& u) {
        return JetMatrix(1, 1, Jet::constant(u[0].nvars(), K, Scalar::rational(1)));
    };
    p.rhs = [](const std::vector<Jet>& u) {
        Jet uxx = differentiate(differentiate(u[0], 0), 0);
        return std::vector<Jet>{uxx.with_order(u[0].order())};
    };
    auto u = solve_second_order(p);
    Jet s = Jet::variable(0, 2, K, Mode::exact) + Jet::variable(1, 2, K, Mode::exact);
    CHECK(u[0] == (s * s * s).with_order(K));
}

TEST_CASE("second order: characteristic data matrix is rejected with context") {
    SecondOrderProblem p;
    p.nvars = 2;
    p.dim = 1;
    p.order = 4;
    p.u0 = {Jet(1, 4, Mode::exact)};
    p.u1 = {Jet(1, 4, Mode::exact)};
    p.matrix = [](const std::vector<Jet>& u) {
        // vanishing constant term makes the problem characteristic at 0
        return JetMatrix(1, 1, Jet::variable(0, u[0].nvars(), u[0].order(), Mode::exact));
    };
    p.rhs = [](const std::vector<Jet>& u) { return std::vector<Jet>{u[0]}; };
    CHECK_THROWS_AS(solve_second_order(p), CharacteristicError);
}

TEST_CASE("solutions are stable under raising the truncation order") {
    auto solve_at = [](int K) {
        SecondOrderProblem p;
        p.nvars = 2;
        p.dim = 2;
        p.order = K;
        Jet x1d = Jet::variable(0, 1, K, Mode::exact);
        p.u0 = {x1d, x1d * x1d};
        p.u1 = {Jet::constant(1, K, Scalar::rational(1)), x1d};
        p.matrix = [K](const std::vector<Jet>& u) {
            JetMatrix m = JetMatrix::identity(2, 2, K, Mode::exact);
            m.at(0, 1) = u[0].truncated(K);
            return m;
        };
        p.rhs = [K](const std::vector<Jet>& u) {
            return std::vector<Jet>{(u[0] * u[1]).truncated(K), differentiate(u[0], 0).with_order(K)};
        };
        return solve_second_order(p);
    };
    auto lo = solve_at(4);
    auto hi = solve_at(7);
    for (int i = 0; i < 2; ++i) CHECK(hi[i].truncated(4) == lo[i]);
}

TEST_CASE("prolong raises data to n variables with a monomial factor") {
    Jet x1d = Jet::variable(0, 1, 4, Mode::exact);
    Jet r = prolong(x1d * x1d, 2, 4, 1);
    Jet x1 = Jet::variable(0, 2, 4, Mode::exact);
    Jet x2 = Jet::variable(1, 2, 4, Mode::exact);
    CHECK(r == (x1 * x1 * x2).with_order(4));
}
