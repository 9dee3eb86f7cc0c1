#include "embjet/embedding.hpp"

#include <algorithm>

namespace embjet {

int EmbeddingJet::order() const {
    int o = comp.empty() ? 0 : comp[0].order();
    for (auto& c : comp) o = std::min(o, c.order());
    return o;
}

namespace {

Scalar half(Mode mode, int sign = 1) {
    return mode == Mode::exact ? Scalar::rational(sign, 2) : Scalar::real(sign * 0.5);
}

// index pairs (j, k) with j <= k, the row order used everywhere below
std::vector<std::pair<int, int>> upper_pairs(int m) {
    std::vector<std::pair<int, int>> p;
    for (int j = 0; j < m; ++j)
        for (int k = j; k < m; ++k) p.push_back({j, k});
    return p;
}

// Second-order system (II.1)-(II.3) in row order {d_k u, d_n u, d_kl u},
// optionally augmented by n-2 rows e_a . d_nn u = 0 (a = 2..n-1).
SecondOrderProblem make_system(const MetricJet& g, const std::vector<Jet>& u0,
                               const std::vector<Jet>& u1, int ambient,
                               int e_offset, int extra_rows, int K) {
    int n = g.n;
    int m = n - 1;
    Mode mode = g.mode();
    auto pairs = upper_pairs(m);
    if (static_cast<int>(m + 1 + pairs.size()) + extra_rows != ambient)
        throw ContextError("make_system: equation count does not match ambient dimension");

    SecondOrderProblem p;
    p.nvars = n;
    p.dim = ambient;
    p.order = K;
    p.u0 = u0;
    p.u1 = u1;
    Jet gnn = g.at(n - 1, n - 1);
    p.matrix = [n, m, ambient, e_offset, extra_rows, pairs, mode, K](const std::vector<Jet>& u) {
        JetMatrix M(ambient, ambient, Jet(n, K, mode));
        int r = 0;
        for (int k = 0; k < m; ++k, ++r)
            for (int c = 0; c < ambient; ++c) M.at(r, c) = differentiate(u[c], k);
        for (int c = 0; c < ambient; ++c) M.at(r, c) = differentiate(u[c], n - 1);
        ++r;
        for (auto& [j, k] : pairs) {
            for (int c = 0; c < ambient; ++c)
                M.at(r, c) = differentiate(differentiate(u[c], j), k);
            ++r;
        }
        for (int a = 2; a <= extra_rows + 1; ++a, ++r)
            M.at(r, e_offset + a - 1) = Jet::constant(n, K, Scalar::one(mode));
        return M;
    };
    p.rhs = [g, gnn, n, m, ambient, extra_rows, pairs, mode, K](const std::vector<Jet>& u) {
        std::vector<Jet> R;
        R.reserve(ambient);
        for (int k = 0; k < m; ++k)
            R.push_back(differentiate(g.at(k, n - 1), n - 1) -
                        differentiate(gnn, k).scale(half(mode)));
        R.push_back(differentiate(gnn, n - 1).scale(half(mode)));
        for (auto& [j, k] : pairs) {
            Jet s(n, K - 2 >= 0 ? K - 2 : 0, mode);
            for (int c = 0; c < ambient; ++c)
                s += differentiate(differentiate(u[c], j), n - 1) *
                     differentiate(differentiate(u[c], k), n - 1);
            s += (differentiate(differentiate(g.at(k, n - 1), j), n - 1) +
                  differentiate(differentiate(g.at(j, n - 1), k), n - 1) -
                  differentiate(differentiate(g.at(j, k), n - 1), n - 1))
                     .scale(half(mode));
            s -= differentiate(differentiate(gnn, j), k).scale(half(mode));
            R.push_back(s);
        }
        for (int a = 0; a < extra_rows; ++a) R.push_back(Jet(n, K, mode));
        return R;
    };
    return p;
}

// Hypersurface data of g at x_n = 0, as jets in n-1 vars:
// gbar_jk = g_jk, h_jk = Gamma_{jk,n} = (d_j g_kn + d_k g_jn - d_n g_jk)/2,
// bbar_j = g_jn, gnn0 = g_nn
void hypersurface_restrictions(const MetricJet& g, JetMatrix& gbar, JetMatrix& h,
                               std::vector<Jet>& bbar, Jet& gnn0) {
    int n = g.n, m = n - 1;
    Mode mode = g.mode();
    auto rest = [&](const Jet& a) { return drop_last_var(restrict_var(a, n - 1)); };
    gbar = JetMatrix(m, m, Jet(m, g.order(), mode));
    h = JetMatrix(m, m, Jet(m, g.order() - 1, mode));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            gbar.at(i, j) = rest(g.at(i, j));
            h.at(i, j) = rest(differentiate(g.at(j, n - 1), i) +
                              differentiate(g.at(i, n - 1), j) -
                              differentiate(g.at(i, j), n - 1))
                             .scale(half(mode));
        }
    bbar.clear();
    for (int j = 0; j < m; ++j) bbar.push_back(rest(g.at(j, n - 1)));
    gnn0 = rest(g.at(n - 1, n - 1));
}

} // namespace

EmbeddingJet embed_cartan_janet(const MetricJet& g, int K) {
    int n = g.n;
    Mode mode = g.mode();
    if (g.order() < K + n - 1)
        throw ContextError("embed_cartan_janet: metric order must be at least K + n - 1");
    EmbeddingJet out;
    if (n == 1) {
        out.ambient = 1;
        out.comp = {antiderivative(sqrt_jet(g.at(0, 0)), 0).truncated(K)};
        return out;
    }
    JetMatrix gbar, h;
    std::vector<Jet> bbar;
    Jet gnn0;
    hypersurface_restrictions(g, gbar, h, bbar, gnn0);
    int P = g.order() - (n - 1);   // data order; keeps the recursion feasible
    CauchyData data = build_nonsingular_data(gbar, h, gnn0, P,
                                             half(mode), bbar);
    SecondOrderProblem prob =
        make_system(g, data.u0, data.u1, data.ambient, data.ambient, 0, K);
    out.ambient = data.ambient;
    out.comp = solve_second_order(prob);
    return out;
}

CauchyData build_nonsingular_data(const JetMatrix& gbar, const JetMatrix& h,
                                  const Jet& gnn0, int order, Scalar mu,
                                  const std::vector<Jet>& bbar,
                                  int retry_budget) {
    int m = gbar.rows();
    int n = m + 1;
    Mode mode = gbar.mode();
    int N = n * (n + 1) / 2;
    int Np = n * (n - 1) / 2;   // ambient of the lower-dimensional embedding
    auto pairs = upper_pairs(m);
    Scalar two = mode == Mode::exact ? Scalar::rational(2) : Scalar::real(2.0);

    std::string last_error;
    for (int attempt = 0; attempt <= retry_budget; ++attempt, mu = mu / two) {
        // quadratics completing the second-derivative frame:
        // Q_a = x_a x_m (a < m), Q_m = x_m^2 / 2
        std::vector<Jet> Q;
        for (int a = 0; a + 1 < m; ++a)
            Q.push_back(Jet::variable(a, m, order + 1, mode) *
                        Jet::variable(m - 1, m, order + 1, mode));
        Q.push_back((Jet::variable(m - 1, m, order + 1, mode) *
                     Jet::variable(m - 1, m, order + 1, mode))
                        .scale(half(mode)));

        MetricJet ghat;
        ghat.n = m;
        ghat.g = JetMatrix(m, m, gbar.at(0, 0));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                Jet corr(m, gbar.at(i, j).order(), mode);
                for (auto& q : Q) corr += differentiate(q, i) * differentiate(q, j);
                ghat.g.at(i, j) = gbar.at(i, j) - corr.scale(mu * mu).with_order(gbar.at(i, j).order());
            }

        EmbeddingJet v;
        try {
            v = embed_cartan_janet(ghat, order + 1);
        } catch (CharacteristicError& e) {
            last_error = e.what();
            continue;
        }

        std::vector<Jet> u0;
        u0.reserve(N);
        for (auto& c : v.comp) u0.push_back(c.truncated(order + 1));
        for (auto& q : Q) u0.push_back(q.scale(mu).with_order(order + 1));
        u0.push_back(Jet(m, order + 1, mode));
        if (static_cast<int>(u0.size()) != N)
            throw ContextError("build_nonsingular_data: ambient bookkeeping is off");

        // u1 from the constraints: tangency (8), normal curvature (10),
        // last coordinate pinned to 0 so the norm condition (7) closes it
        JetMatrix M(N, N, Jet(m, order, mode));
        std::vector<Jet> rhs;
        int r = 0;
        for (int j = 0; j < m; ++j, ++r) {
            for (int c = 0; c < N; ++c) M.at(r, c) = differentiate(u0[c], j);
            rhs.push_back(bbar.empty() ? Jet(m, order, mode)
                                       : bbar[j].truncated(order));
        }
        for (auto& [j, k] : pairs) {
            for (int c = 0; c < N; ++c)
                M.at(r, c) = differentiate(differentiate(u0[c], j), k);
            rhs.push_back(h.at(j, k));
            ++r;
        }
        M.at(r, N - 1) = Jet::constant(m, order, Scalar::one(mode));
        rhs.push_back(Jet(m, order, mode));

        std::vector<Jet> p;
        try {
            p = jet_linear_solve(M, rhs);
        } catch (CharacteristicError& e) {
            last_error = e.what();
            continue;
        }

        Jet norm2(m, p[0].order(), mode);
        for (auto& c : p) norm2 += c * c;
        Jet rad = gnn0.truncated(norm2.order()) - norm2;
        Scalar rad0 = rad.constant_term();
        if (rad0.is_zero() || rad0.is_negative()) {
            last_error = "norm condition (7) unsatisfiable at the base point";
            continue;
        }
        Jet phi = sqrt_jet(rad);

        CauchyData out;
        out.n = n;
        out.ambient = N;
        out.u0 = u0;
        out.u1 = p;
        out.u1[N - 1] += phi;
        out.scale_used = mu;
        out.singular = false;
        out.e_offset = N;   // no appended factor for nonsingular data
        return out;
    }
    throw Error("build_nonsingular_data: retry budget exhausted (" + last_error + ")");
}

CauchyData build_singular_data(const AdmissibleMetric& adm, Scalar eps, int K,
                               int retry_budget) {
    int n = adm.metric.n;
    int m = n - 1;
    Mode mode = adm.metric.mode();
    int N = n * (n + 1) / 2;
    int D = N + n - 2;
    int Km = adm.gbar.min_order();
    int Wv = Km - (m - 1);       // order of the hypersurface embedding v
    if (Wv - 4 < K)
        throw ContextError("build_singular_data: metric order too low for the requested K");
    auto pairs = upper_pairs(m);
    Scalar two = mode == Mode::exact ? Scalar::rational(2) : Scalar::real(2.0);
    Scalar one = Scalar::one(mode);

    std::string last_error;
    for (int attempt = 0; attempt <= retry_budget; ++attempt, eps = eps / two) {
        // V_a = eps^5 sin(x_m / eps^4) sin(x_a / eps^2),  V_m = -eps^5 cos(x_m / eps^4)
        Scalar e2 = eps * eps, e4 = e2 * e2, e5 = e4 * eps;
        std::vector<Jet> V;
        Jet sin_fast = sin_jet(one / e4, m - 1, m, Km);
        for (int a = 0; a + 1 < m; ++a)
            V.push_back((sin_fast * sin_jet(one / e2, a, m, Km)).scale(e5));
        V.push_back(cos_jet(one / e4, m - 1, m, Km).scale(-e5));

        MetricJet ghat;
        ghat.n = m;
        ghat.g = JetMatrix(m, m, adm.gbar.at(0, 0));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                Jet corr(m, Km, mode);
                for (auto& vv : V) corr += differentiate(vv, i) * differentiate(vv, j);
                ghat.g.at(i, j) = adm.gbar.at(i, j) - corr.with_order(Km);
            }
        std::vector<std::vector<Scalar>> gh0(m, std::vector<Scalar>(m, Scalar::zero(mode)));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) gh0[i][j] = ghat.g.at(i, j).constant_term();
        if (!positive_definite_constant(gh0, mode)) {
            last_error = "perturbed hypersurface metric not positive definite at 0";
            continue;
        }

        EmbeddingJet v;
        try {
            v = embed_cartan_janet(ghat, Wv);
        } catch (CharacteristicError& e) {
            last_error = e.what();
            continue;
        }

        // w = (v, V) in E^{N-1}; u0 = (w, 0) in E^{N+n-2}
        std::vector<Jet> w;
        for (auto& c : v.comp) w.push_back(c.truncated(Wv));
        for (auto& vv : V) w.push_back(vv.truncated(Wv));
        int Nw = static_cast<int>(w.size());
        if (Nw != N - 1) throw ContextError("build_singular_data: ambient bookkeeping is off");

        // N solved exactly from the square system {d_j w, d_jk w} with
        // rhs (0, h_jk); uniqueness is the frame independence of section 4
        JetMatrix M(Nw, Nw, Jet(m, Wv - 1, mode));
        std::vector<Jet> rhs;
        int r = 0;
        for (int j = 0; j < m; ++j, ++r) {
            for (int c = 0; c < Nw; ++c) M.at(r, c) = differentiate(w[c], j);
            rhs.push_back(Jet(m, Wv - 1, mode));
        }
        for (auto& [j, k] : pairs) {
            for (int c = 0; c < Nw; ++c)
                M.at(r, c) = differentiate(differentiate(w[c], j), k);
            rhs.push_back(adm.h.at(j, k).truncated(Wv - 2));
            ++r;
        }
        std::vector<Jet> Nvec;
        try {
            Nvec = jet_linear_solve(M, rhs);
        } catch (CharacteristicError& e) {
            last_error = e.what();
            continue;
        }

        Jet norm2(m, Nvec[0].order(), mode);
        for (auto& c : Nvec) norm2 += c * c;
        Jet xnorm2(m, norm2.order(), mode);
        for (int j = 0; j < m; ++j) {
            MultiIndex mi(m);
            mi[j] = 2;
            xnorm2.set_coeff(mi, one);
        }
        Jet ratio = norm2.is_zero() ? Jet(m, norm2.order() - 2, mode)
                                    : divide_exact(norm2, xnorm2);

        Jet radic = adm.F.truncated(ratio.order()) - ratio;
        Scalar rad0 = radic.constant_term();
        if (rad0.is_zero() || rad0.is_negative()) {
            last_error = "radicand of G not positive at the origin";
            continue;
        }
        Jet G = sqrt_jet(radic);

        std::vector<Jet> u0 = w, u1 = Nvec;
        for (int j = 0; j < m; ++j) {
            u0.push_back(Jet(m, Wv, mode));
            u1.push_back((Jet::variable(j, m, G.order() + 1, mode) * G.with_order(G.order() + 1))
                             .truncated(G.order()));
        }

        // Delta: determinant of {d_j u0, u1, d_jk u0, e_a (2 <= a <= n-1)}
        int Kd = G.order();
        JetMatrix fr(D, D, Jet(m, Kd, mode));
        int col = 0;
        for (int j = 0; j < m; ++j, ++col)
            for (int c = 0; c < D; ++c) fr.at(c, col) = differentiate(u0[c], j).truncated(Kd);
        for (int c = 0; c < D; ++c) fr.at(c, col) = u1[c].truncated(Kd);
        ++col;
        for (auto& [j, k] : pairs) {
            for (int c = 0; c < D; ++c)
                fr.at(c, col) = differentiate(differentiate(u0[c], j), k).truncated(Kd);
            ++col;
        }
        for (int a = 2; a <= m; ++a, ++col)
            fr.at(N - 1 + a - 1, col) = Jet::constant(m, Kd, one);
        Jet Delta = jet_det(fr);

        Jet x1 = Jet::variable(0, m, Delta.order(), mode);
        Jet Delta0;
        try {
            Delta0 = divide_exact(Delta, x1);
        } catch (DivisionError& e) {
            last_error = std::string("Delta not divisible by x1: ") + e.what();
            continue;
        }
        if (Delta0.constant_term().is_zero()) {
            last_error = "Delta0 vanishes at the origin";
            continue;
        }

        CauchyData out;
        out.n = n;
        out.ambient = D;
        out.u0 = u0;
        out.u1 = u1;
        out.scale_used = eps;
        out.singular = true;
        out.e_offset = N - 1;
        out.Delta = Delta;
        out.Delta0 = Delta0;
        return out;
    }
    throw Error("build_singular_data: retry budget exhausted (" + last_error + ")");
}

SecondOrderProblem augmented_system(const MetricJet& g, const CauchyData& data,
                                    int K) {
    int extra = data.singular ? g.n - 2 : 0;
    return make_system(g, data.u0, data.u1, data.ambient, data.e_offset, extra, K);
}

FrameData frame_of(const CauchyData& data) {
    FrameData f;
    f.n = data.n;
    f.ambient = data.ambient;
    f.e_offset = data.e_offset;
    return f;
}

std::vector<PointSolve> solve_at_base_points(
    const AdmissibleMetric& g, const CauchyData& data,
    const std::vector<std::vector<double>>& points, int K) {
    int n = g.metric.n;
    int m = n - 1;
    std::vector<PointSolve> out;
    out.reserve(points.size());

    MetricJet gf;
    gf.n = n;
    gf.g = JetMatrix(n, n, to_float(g.metric.at(0, 0)));
    for (const auto& pt : points) {
        if (static_cast<int>(pt.size()) != m)
            throw ContextError("solve_at_base_points: point dimension mismatch");
        std::vector<Scalar> shift, shift_full;
        for (double c : pt) shift.push_back(Scalar::real(c));
        shift_full = shift;
        shift_full.push_back(Scalar::real(0.0));

        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                gf.g.at(i, j) = recenter(to_float(g.metric.at(i, j)), shift_full);

        CauchyData local;
        local.n = data.n;
        local.ambient = data.ambient;
        local.singular = data.singular;
        local.e_offset = data.e_offset;
        local.scale_used = data.scale_used.mode() == Mode::exact
                               ? data.scale_used.to_float()
                               : data.scale_used;
        for (auto& c : data.u0) local.u0.push_back(recenter(to_float(c), shift));
        for (auto& c : data.u1) local.u1.push_back(recenter(to_float(c), shift));

        SecondOrderProblem prob = augmented_system(gf, local, K);
        PointSolve ps;
        ps.point = pt;
        ps.u.ambient = data.ambient;
        ps.u.comp = solve_second_order(prob);

        // first-order residual magnitude for the report
        auto dot = [&](int a, int b) {
            Jet s(n, K - 1, Mode::floating);
            for (auto& c : ps.u.comp) s += differentiate(c, a) * differentiate(c, b);
            return s;
        };
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) {
                Jet res = dot(a, b) - gf.at(a, b).truncated(K - 1);
                ps.max_residual = std::max(ps.max_residual, res.max_abs_coeff());
            }
        out.push_back(std::move(ps));
    }
    return out;
}

} // namespace embjet
