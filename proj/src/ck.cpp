#include "embjet/ck.hpp"

namespace embjet {

Jet prolong(const Jet& data, int nvars, int order, int power) {
    if (data.nvars() != nvars - 1)
        throw ContextError("prolong: data must live in one fewer variable");
    Jet lifted = lift(data, nvars).truncated(order);
    if (power > 0) lifted = mul_monomial(lifted.truncated(order - power), nvars - 1, power);
    return lifted.with_order(order);
}

std::vector<Jet> solve_first_order(const FirstOrderProblem& p) {
    int n = p.nvars, K = p.order;
    if (static_cast<int>(p.initial.size()) != p.unknowns)
        throw ContextError("solve_first_order: initial data count mismatch");
    std::vector<Jet> f;
    f.reserve(p.unknowns);
    for (auto& d : p.initial) f.push_back(prolong(d.truncated(K), n, K));

    Mode mode = f.empty() ? Mode::exact : f[0].mode();
    for (int m = 0; m + 1 <= K; ++m) {
        std::vector<Jet> phi;
        try {
            phi = p.rhs(f);
        } catch (Error& e) {
            throw Error(std::string(e.what()) + " (first-order recursion at order " +
                        std::to_string(m) + ")");
        }
        Scalar inv = mode == Mode::exact ? Scalar::rational(1, m + 1)
                                         : Scalar::real(1.0 / (m + 1));
        for (int i = 0; i < p.unknowns; ++i) {
            Jet cm = coeff_in_var(phi[i].truncated(K), n - 1, m);
            f[i] += mul_monomial(cm.truncated(K - m - 1), n - 1, m + 1)
                        .with_order(K)
                        .scale(inv);
        }
    }
    return f;
}

std::vector<Jet> solve_second_order(const SecondOrderProblem& p) {
    int n = p.nvars, K = p.order, D = p.dim;
    if (static_cast<int>(p.u0.size()) != D || static_cast<int>(p.u1.size()) != D)
        throw ContextError("solve_second_order: data dimension mismatch");
    std::vector<Jet> u;
    u.reserve(D);
    for (int i = 0; i < D; ++i)
        u.push_back(prolong(p.u0[i].truncated(K), n, K) +
                    prolong(p.u1[i].truncated(K - 1), n, K, 1));

    Mode mode = u.empty() ? Mode::exact : u[0].mode();
    for (int m = 0; m + 2 <= K; ++m) {
        JetMatrix M = p.matrix(u);
        std::vector<Jet> R = p.rhs(u);
        std::vector<Jet> acc = jet_linear_solve(M, R);   // = d2u/dx_n^2
        Scalar inv = mode == Mode::exact
                         ? Scalar::rational(1, static_cast<long>(m + 1) * (m + 2))
                         : Scalar::real(1.0 / ((m + 1.0) * (m + 2.0)));
        for (int i = 0; i < D; ++i) {
            Jet cm = coeff_in_var(acc[i].truncated(K), n - 1, m);
            u[i] += mul_monomial(cm.truncated(K - m - 2), n - 1, m + 2)
                        .with_order(K)
                        .scale(inv);
        }
    }
    return u;
}

} // namespace embjet
