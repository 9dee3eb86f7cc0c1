#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "embjet/verify.hpp"
#include "test_util.hpp"

using namespace embjet;

namespace {

Jet var(int i, int nvars, int K) { return Jet::variable(i, nvars, K, Mode::exact); }
Jet cst(long num, long den, int nvars, int K) {
    return Jet::constant(nvars, K, Scalar::rational(num, den));
}
Jet zero(int nvars, int K) { return Jet(nvars, K, Mode::exact); }

MetricJet flat(int n, int K) {
    MetricJet g;
    g.n = n;
    g.g = JetMatrix::identity(n, n, K, Mode::exact);
    return g;
}

} // namespace

TEST_CASE("first_order_residual: the trivial plane embedding is exact") {
    int K = 5;
    EmbeddingJet u;
    u.ambient = 3;
    u.comp = {var(0, 2, K), var(1, 2, K), zero(2, K)};
    auto rep = first_order_residual(u, flat(2, K));
    CHECK(rep.pass);
    CHECK(rep.max_abs() == 0.0);
    CHECK(rep.tolerance == 0.0);
}

TEST_CASE("first_order_residual: a bent sheet fails with residual 4 xn^2 in I.1") {
    int K = 5;
    Jet xn = var(1, 2, K);
    EmbeddingJet u;
    u.ambient = 3;
    u.comp = {var(0, 2, K), xn, xn * xn};
    auto rep = first_order_residual(u, flat(2, K));
    CHECK(!rep.pass);
    REQUIRE(rep.entries[0].name == "I.1");
    Jet expect = (xn * xn).truncated(K - 1).scale(Scalar::rational(4));
    CHECK(rep.entries[0].residual == expect);
    for (size_t i = 1; i < rep.entries.size(); ++i)
        CHECK(rep.entries[i].residual.is_zero());
}

TEST_CASE("equivalence_check mirrors the first-order residual") {
    int K = 4;
    EmbeddingJet u;
    u.ambient = 3;
    u.comp = {var(0, 2, K), var(1, 2, K), zero(2, K)};
    auto rep = equivalence_check(u, flat(2, K));
    CHECK(rep.pass);
    CHECK(rep.entries[0].name == "equiv I.1");
}

TEST_CASE("rank_certificate: identity passes, duplicated column fails") {
    auto id = JetMatrix::identity(3, 2, 3, Mode::exact);
    auto ok = rank_certificate(id);
    CHECK(ok.nonsingular);
    CHECK(ok.det_constant == Scalar::rational(1));

    JetMatrix dup = id;
    for (int i = 0; i < 3; ++i) dup.at(i, 2) = dup.at(i, 1);
    auto bad = rank_certificate(dup);
    CHECK(!bad.nonsingular);
    CHECK(bad.det.is_zero());
}

TEST_CASE("constraint_residual flags a tangency violation in (C2)") {
    // flat one-dimensional hypersurface data for the n=2 step, h = 0
    int P = 6;
    JetMatrix gbar(1, 1, cst(1, 1, 1, P + 1));
    JetMatrix h(1, 1, zero(1, P));
    Jet gnn0 = cst(1, 1, 1, P + 1);
    CauchyData data =
        build_nonsingular_data(gbar, h, gnn0, P, Scalar::rational(1, 2));
    auto good = constraint_residual(data, gbar, h, gnn0);
    CHECK(good.pass);

    CauchyData bad = data;
    bad.u1[0] += var(0, 1, bad.u1[0].order());
    auto rep = constraint_residual(bad, gbar, h, gnn0);
    CHECK(!rep.pass);
    bool c2_hit = false;
    for (auto& e : rep.entries)
        if (e.name.rfind("C2", 0) == 0 && !e.residual.is_zero()) c2_hit = true;
    CHECK(c2_hit);
}
