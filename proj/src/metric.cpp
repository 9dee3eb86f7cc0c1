#include "embjet/metric.hpp"

#include <cmath>

namespace embjet {

bool MetricJet::is_symmetric() const {
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!(g.at(i, j) == g.at(j, i))) return false;
    return true;
}

bool MetricJet::is_normal_form() const {
    for (int j = 0; j + 1 < n; ++j)
        if (!g.at(j, n - 1).is_zero()) return false;
    return true;
}

std::vector<std::vector<Scalar>> MetricJet::tangential_constant() const {
    std::vector<std::vector<Scalar>> a(n - 1, std::vector<Scalar>(n - 1, Scalar::zero(mode())));
    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j) a[i][j] = g.at(i, j).constant_term();
    return a;
}

MetricJet make_metric(int n, const std::vector<std::vector<Jet>>& entries) {
    if (static_cast<int>(entries.size()) != n)
        throw ContextError("metric entry rows mismatch");
    MetricJet m;
    m.n = n;
    m.g = JetMatrix(n, n, entries[0][0]);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.g.at(i, j) = entries[i][j];
    if (!m.is_symmetric()) throw ContextError("metric must be symmetric");
    return m;
}

bool positive_definite_constant(const std::vector<std::vector<Scalar>>& a, Mode mode) {
    int n = static_cast<int>(a.size());
    for (int k = 1; k <= n; ++k) {
        std::vector<std::vector<Scalar>> sub(k, std::vector<Scalar>(k, Scalar::zero(mode)));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) sub[i][j] = a[i][j];
        ScalarLU lu(sub, mode);
        if (lu.singular() || lu.det().is_negative() || lu.det().is_zero()) return false;
    }
    return true;
}

AdmissibilityResult check_admissible(const MetricJet& g, int l) {
    AdmissibilityResult res;
    int n = g.n;
    int K = g.order();
    Mode mode = g.mode();
    if (l < 1) res.violations.push_back("l must be a positive integer");
    if (!g.is_normal_form())
        res.violations.push_back("metric has cross terms; apply normal_form_transform first");

    // singular factor |x'|^2 + x_n^{2l}
    Jet divisor(n, K, mode);
    for (int j = 0; j + 1 < n; ++j) {
        MultiIndex mi(n);
        mi[j] = 2;
        divisor.set_coeff(mi, Scalar::one(mode));
    }
    {
        MultiIndex mi(n);
        mi[n - 1] = 2 * l;
        divisor.set_coeff(mi, Scalar::one(mode));
    }

    Jet F0;
    bool divisible = true;
    try {
        F0 = divide_exact(g.at(n - 1, n - 1), divisor);
    } catch (DivisionError&) {
        divisible = false;
        res.violations.push_back("g_nn is not divisible by |x'|^2 + x_n^{2l}");
    }
    if (divisible) {
        Scalar f00 = F0.constant_term();
        bool pos = mode == Mode::exact ? (!f00.is_zero() && !f00.is_negative())
                                       : f00.to_double() > 0.0;
        if (!pos) res.violations.push_back("F0(0) <= 0");
    }
    if (!positive_definite_constant(g.tangential_constant(), mode))
        res.violations.push_back("tangential block (g_jk)(0) is not positive definite");

    // h_jk = -1/2 d/dx_n g_jk on x_n = 0 must be O(|x'|^2)
    JetMatrix h(n - 1, n - 1, Jet(n - 1, std::max(K - 1, 0), mode));
    Scalar neg_half = mode == Mode::exact ? Scalar::rational(-1, 2) : Scalar::real(-0.5);
    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j) {
            Jet hij = drop_last_var(restrict_var(differentiate(g.at(i, j), n - 1), n - 1))
                          .scale(neg_half);
            h.at(i, j) = hij;
            for (auto& [mi, c] : hij.terms())
                if (mi.total_degree() < 2) {
                    res.violations.push_back(
                        "d/dx_n g_" + std::to_string(i + 1) + std::to_string(j + 1) +
                        "(x',0) has terms of degree < 2");
                    break;
                }
        }
    if (!res.violations.empty()) return res;

    AdmissibleMetric adm;
    adm.metric = g;
    adm.l = l;
    adm.F0 = F0;
    adm.F = drop_last_var(restrict_var(lift(F0, n), n - 1));
    adm.gbar = JetMatrix(n - 1, n - 1, Jet(n - 1, K, mode));
    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j)
            adm.gbar.at(i, j) = drop_last_var(restrict_var(g.at(i, j), n - 1));
    adm.h = h;
    res.metric = adm;
    return res;
}

PositivityReport positivity_certificate(const MetricJet& g, double box, int samples) {
    int n = g.n;
    PositivityReport rep;
    rep.b_zero_at_origin = true;
    for (int j = 0; j + 1 < n; ++j)
        if (!g.at(j, n - 1).constant_term().is_zero()) rep.b_zero_at_origin = false;

    JetMatrix gp(n - 1, n - 1, g.at(0, 0));
    std::vector<Jet> b;
    for (int i = 0; i + 1 < n; ++i) {
        for (int j = 0; j + 1 < n; ++j) gp.at(i, j) = g.at(i, j);
        b.push_back(g.at(i, n - 1));
    }
    std::vector<Jet> frak_b = jet_linear_solve(gp, b);   // g' frak_b = b
    Jet gap(n, g.order(), g.mode());
    for (int i = 0; i + 1 < n; ++i) gap += b[i] * frak_b[i];
    gap -= g.at(n - 1, n - 1);

    Jet gap_f = to_float(gap);
    rep.max_gap = -1e300;
    std::vector<double> pt(n, 0.0);
    std::vector<int> idx(n, 0);
    auto rec = [&](auto&& self, int v) -> void {
        if (v == n) {
            bool origin = true;
            for (double c : pt)
                if (c != 0.0) origin = false;
            if (origin) return;
            rep.max_gap = std::max(rep.max_gap, gap_f.eval_double(pt));
            return;
        }
        for (int k = 0; k < samples; ++k) {
            pt[v] = -box + 2.0 * box * k / (samples - 1);
            self(self, v + 1);
        }
    };
    rec(rec, 0);
    rep.inequality_holds = rep.b_zero_at_origin && rep.max_gap < 0.0;
    return rep;
}

MetricJet pullback(const MetricJet& g, const std::vector<Jet>& phi) {
    int n = g.n;
    if (static_cast<int>(phi.size()) != n)
        throw ContextError("pullback: diffeomorphism component count mismatch");
    int nv = phi[0].nvars();
    int K = g.order() - 1;
    Mode mode = g.mode();
    // metric coefficients composed with phi
    JetMatrix gc(n, n, Jet(nv, K, mode));
    for (int a = 0; a < n; ++a)
        for (int bb = 0; bb < n; ++bb)
            gc.at(a, bb) = compose(g.at(a, bb).truncated(K), phi);
    // Jacobian
    JetMatrix J(n, nv, Jet(nv, K, mode));
    for (int a = 0; a < n; ++a)
        for (int v = 0; v < nv; ++v) J.at(a, v) = differentiate(phi[a], v);

    MetricJet out;
    out.n = nv;
    out.g = JetMatrix(nv, nv, Jet(nv, K, mode));
    for (int a = 0; a < nv; ++a)
        for (int bq = 0; bq < nv; ++bq) {
            Jet s(nv, K, mode);
            for (int mu = 0; mu < n; ++mu)
                for (int nu = 0; nu < n; ++nu)
                    s += gc.at(mu, nu) * J.at(mu, a) * J.at(nu, bq);
            out.g.at(a, bq) = s;
        }
    return out;
}

NormalFormResult normal_form_transform(const MetricJet& g, Scalar eps, int retry_budget) {
    int n = g.n;
    int K = g.order();
    Mode mode = g.mode();
    if (mode == Mode::floating && eps.mode() == Mode::exact) eps = eps.to_float();
    for (int j = 0; j + 1 < n; ++j)
        if (!g.at(j, n - 1).constant_term().is_zero())
            throw Error("normal_form_transform requires b_j(0) = 0");
    auto gp0 = g.tangential_constant();
    ScalarLU lu0(gp0, mode);
    if (lu0.singular())
        throw Error("tangential block singular at the origin");

    std::string last_error;
    for (int attempt = 0; attempt <= retry_budget; ++attempt, eps = eps * (mode == Mode::exact ? Scalar::rational(1, 2) : Scalar::real(0.5))) {
        // linear seed f~_k = eps (g'(0)^{-1})_{kl} x_l   (A = eps * Id)
        std::vector<std::vector<Scalar>> ginv(n - 1, std::vector<Scalar>(n - 1, Scalar::zero(mode)));
        for (int l = 0; l + 1 < n; ++l) {
            std::vector<Scalar> e(n - 1, Scalar::zero(mode));
            e[l] = Scalar::one(mode);
            auto col = lu0.solve(e);
            for (int k = 0; k + 1 < n; ++k) ginv[k][l] = col[k];
        }
        std::vector<Jet> seed;
        for (int k = 0; k + 1 < n; ++k) {
            Jet s(n - 1, K, mode);
            for (int l = 0; l + 1 < n; ++l)
                s += Jet::variable(l, n - 1, K, mode).scale(ginv[k][l] * eps);
            seed.push_back(s);
        }

        FirstOrderProblem prob;
        prob.nvars = n;
        prob.unknowns = n - 1;
        prob.order = K;
        prob.initial = seed;
        prob.rhs = [&g, n, K, mode](const std::vector<Jet>& f) {
            // substitute x = (xb' + f(xb), xb_n) into the metric coefficients
            std::vector<Jet> inners;
            for (int j = 0; j + 1 < n; ++j)
                inners.push_back(Jet::variable(j, n, K, mode) + f[j]);
            inners.push_back(Jet::variable(n - 1, n, K, mode));
            std::vector<Jet> bphi;
            JetMatrix gphi(n - 1, n - 1, Jet(n, K, mode));
            for (int j = 0; j + 1 < n; ++j) {
                bphi.push_back(compose(g.at(j, n - 1), inners));
                for (int k = 0; k + 1 < n; ++k)
                    gphi.at(j, k) = compose(g.at(j, k), inners);
            }
            // cross terms of the pullback vanish iff
            //   (g_lk + d_l f_j g_jk) d/dx_n f_k = -(b_l + d_l f_j b_j)
            JetMatrix M(n - 1, n - 1, Jet(n, K, mode));
            std::vector<Jet> rhs;
            for (int l = 0; l + 1 < n; ++l) {
                Jet r = -bphi[l];
                for (int k = 0; k + 1 < n; ++k) {
                    Jet m = gphi.at(l, k);
                    for (int j = 0; j + 1 < n; ++j)
                        m += differentiate(f[j], l) * gphi.at(j, k);
                    M.at(l, k) = m;
                }
                for (int j = 0; j + 1 < n; ++j)
                    r -= differentiate(f[j], l) * bphi[j];
                rhs.push_back(r);
            }
            return jet_linear_solve(M, rhs);
        };

        std::vector<Jet> f;
        try {
            f = solve_first_order(prob);
        } catch (Error& e) {
            last_error = e.what();
            continue;   // retry with smaller eps
        }

        std::vector<Jet> phi;
        for (int j = 0; j + 1 < n; ++j)
            phi.push_back(Jet::variable(j, n, K, mode) + f[j]);
        phi.push_back(Jet::variable(n - 1, n, K, mode));
        MetricJet transformed = pullback(g, phi);

        NormalFormResult out;
        out.diffeo = f;
        out.normal = transformed;
        out.eps_used = eps;
        for (int j = 0; j + 1 < n; ++j)
            out.max_cross_coeff =
                std::max(out.max_cross_coeff, transformed.at(j, n - 1).max_abs_coeff());
        return out;
    }
    throw Error("normal_form_transform: retry budget exhausted (" + last_error + ")");
}

} // namespace embjet
