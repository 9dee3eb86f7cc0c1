#include "embjet/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace embjet {

namespace {

// --- small dense double linear algebra -------------------------------------

double det_lu(std::vector<std::vector<double>> a) {
    int d = static_cast<int>(a.size());
    double det = 1.0;
    for (int c = 0; c < d; ++c) {
        int piv = c;
        for (int r = c + 1; r < d; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        if (a[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (int r = c + 1; r < d; ++r) {
            double f = a[r][c] / a[c][c];
            for (int k = c; k < d; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

// adj(A)_{rc} = (-1)^{r+c} det(minor of A with row c and column r removed)
std::vector<std::vector<double>> adjugate(const std::vector<std::vector<double>>& a) {
    int d = static_cast<int>(a.size());
    std::vector<std::vector<double>> adj(d, std::vector<double>(d, 0.0));
    if (d == 1) {
        adj[0][0] = 1.0;
        return adj;
    }
    std::vector<std::vector<double>> minor(d - 1, std::vector<double>(d - 1));
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            int mr = 0;
            for (int i = 0; i < d; ++i) {
                if (i == c) continue;
                int mc = 0;
                for (int j = 0; j < d; ++j) {
                    if (j == r) continue;
                    minor[mr][mc++] = a[i][j];
                }
                ++mr;
            }
            adj[r][c] = ((r + c) % 2 == 0 ? 1.0 : -1.0) * det_lu(minor);
        }
    return adj;
}

// --- compiled numeric form of a symbol --------------------------------------

struct Poly {
    std::vector<std::pair<MultiIndex, double>> terms;
    double eval(const std::vector<double>& x) const {
        double acc = 0.0;
        for (auto& [mi, c] : terms) {
            double t = c;
            for (int i = 0; i < mi.nvars(); ++i)
                for (int k = 0; k < mi[i]; ++k) t *= x[i];
            acc += t;
        }
        return acc;
    }
};

Poly compile_jet(const Jet& a) {
    Poly p;
    for (auto& [mi, c] : a.terms()) p.terms.push_back({mi, c.to_double()});
    return p;
}

struct CompiledSymbol {
    int n = 0, dim = 1;
    struct CTerm {
        MultiIndex pexp;
        Poly c;
        std::vector<Poly> dc;   // x-gradient of the coefficient
    };
    std::vector<std::vector<std::vector<CTerm>>> e;

    explicit CompiledSymbol(const PrincipalSymbol& s) : n(s.n), dim(s.dim) {
        e.resize(dim);
        for (int r = 0; r < dim; ++r) {
            e[r].resize(dim);
            for (int c = 0; c < dim; ++c)
                for (auto& t : s.entries[r][c]) {
                    CTerm ct;
                    ct.pexp = t.pexp;
                    ct.c = compile_jet(t.coeff);
                    for (int i = 0; i < n; ++i)
                        ct.dc.push_back(compile_jet(differentiate(t.coeff, i)));
                    e[r][c].push_back(std::move(ct));
                }
        }
    }

    static double pmon(const MultiIndex& a, const std::vector<double>& p) {
        double t = 1.0;
        for (int i = 0; i < a.nvars(); ++i)
            for (int k = 0; k < a[i]; ++k) t *= p[i];
        return t;
    }
    // derivative of p^a in direction i
    static double pmon_d(const MultiIndex& a, const std::vector<double>& p, int i) {
        if (a[i] == 0) return 0.0;
        MultiIndex b = a;
        b[i] -= 1;
        return a[i] * pmon(b, p);
    }

    std::vector<std::vector<double>> matrix(const std::vector<double>& x,
                                            const std::vector<double>& p) const {
        std::vector<std::vector<double>> A(dim, std::vector<double>(dim, 0.0));
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c)
                for (auto& t : e[r][c]) A[r][c] += t.c.eval(x) * pmon(t.pexp, p);
        return A;
    }

    double eval(const std::vector<double>& x, const std::vector<double>& p) const {
        return det_lu(matrix(x, p));
    }

    void gradients(const std::vector<double>& x, const std::vector<double>& p,
                   std::vector<double>& gx, std::vector<double>& gp) const {
        auto adj = adjugate(matrix(x, p));
        gx.assign(n, 0.0);
        gp.assign(n, 0.0);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) {
                // tr(adj(A) dA) = sum_{r,c} dA_{rc} adj_{cr}
                double w = adj[c][r];
                if (w == 0.0) continue;
                for (auto& t : e[r][c]) {
                    double pm = pmon(t.pexp, p);
                    for (int i = 0; i < n; ++i) {
                        gx[i] += w * t.dc[i].eval(x) * pm;
                        gp[i] += w * t.c.eval(x) * pmon_d(t.pexp, p, i);
                    }
                }
            }
    }
};

Jet jet_pow(const Jet& a, int k, int nvars, int order, Mode mode) {
    Jet r = Jet::constant(nvars, order, Scalar::one(mode));
    for (int i = 0; i < k; ++i) r = r * a;
    return r;
}

std::vector<double> surface_gradient(const Jet& s, const std::vector<double>& x) {
    std::vector<double> g;
    for (int i = 0; i < s.nvars(); ++i) g.push_back(differentiate(s, i).eval_double(x));
    return g;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return s;
}

} // namespace

Mode PrincipalSymbol::mode() const {
    for (auto& row : entries)
        for (auto& cell : row)
            if (!cell.empty()) return cell[0].coeff.mode();
    return Mode::exact;
}

PrincipalSymbol PrincipalSymbol::scalar_symbol(const Jet& gxp, int n) {
    if (gxp.nvars() != 2 * n)
        throw ContextError("scalar_symbol: expected a jet in 2n variables (x, p)");
    Mode mode = gxp.mode();
    PrincipalSymbol sym;
    sym.kind = Kind::scalar;
    sym.n = n;
    sym.dim = 1;
    std::map<MultiIndex, Jet> by_p;
    int deg = -1;
    for (auto& [mi, c] : gxp.terms()) {
        MultiIndex xe(n), pe(n);
        for (int i = 0; i < n; ++i) {
            xe[i] = mi[i];
            pe[i] = mi[n + i];
        }
        int pd = pe.total_degree();
        if (deg < 0) deg = pd;
        if (pd != deg)
            throw ContextError("scalar_symbol: principal part must be p-homogeneous");
        auto it = by_p.find(pe);
        if (it == by_p.end())
            it = by_p.emplace(pe, Jet(n, gxp.order(), mode)).first;
        Jet& cj = it->second;
        Scalar acc = cj.coeff(xe) + c;
        cj.set_coeff(xe, acc);
    }
    sym.m = std::max(deg, 0);
    sym.entries.assign(1, std::vector<std::vector<Term>>(1));
    for (auto& [pe, cj] : by_p) sym.entries[0][0].push_back({pe, cj});
    return sym;
}

PrincipalSymbol PrincipalSymbol::system_symbol(const CauchyData& data) {
    int n = data.n;
    int m = n - 1;
    Mode mode = data.u0.empty() ? Mode::exact : data.u0[0].mode();
    int D = data.ambient;
    int u1o = data.u1[0].order();
    for (auto& c : data.u1) u1o = std::min(u1o, c.order());
    int Ko = std::min(data.u0[0].order() - 2, u1o - 1);
    Scalar one = Scalar::one(mode);

    // first-order prolongation u = u0 + x_n u1 as jets in n variables
    auto pro = [&](const Jet& a, const Jet& b) {
        return lift(a, n).with_order(Ko) +
               mul_monomial(lift(b, n).with_order(Ko - 1), n - 1, 1);
    };
    MultiIndex pn3(n);
    pn3[n - 1] = 3;

    PrincipalSymbol sym;
    sym.kind = Kind::system;
    sym.n = n;
    sym.dim = D;
    sym.m = 3 * D;
    sym.entries.assign(D, std::vector<std::vector<Term>>(D));
    int r = 0;
    for (int k = 0; k < m; ++k, ++r)
        for (int c = 0; c < D; ++c)
            sym.entries[r][c].push_back(
                {pn3, pro(differentiate(data.u0[c], k), differentiate(data.u1[c], k))});
    for (int c = 0; c < D; ++c)
        sym.entries[r][c].push_back({pn3, lift(data.u1[c], n).with_order(Ko)});
    ++r;
    for (int j = 0; j < m; ++j)
        for (int k = j; k < m; ++k, ++r)
            for (int c = 0; c < D; ++c) {
                std::map<MultiIndex, Jet> acc;
                acc[pn3] = pro(differentiate(differentiate(data.u0[c], j), k),
                               differentiate(differentiate(data.u1[c], j), k));
                // quasilinearization of d_jn u . d_kn u contributes
                // -(d_k u1 p_j + d_j u1 p_k) p_n^2 on the background
                MultiIndex pj(n), pk(n);
                pj[j] = 1;
                pj[n - 1] = 2;
                pk[k] = 1;
                pk[n - 1] = 2;
                Jet dk = -lift(differentiate(data.u1[c], k), n).with_order(Ko);
                Jet dj = -lift(differentiate(data.u1[c], j), n).with_order(Ko);
                auto add = [&](const MultiIndex& pe, const Jet& cj) {
                    auto it = acc.find(pe);
                    if (it == acc.end())
                        acc.emplace(pe, cj);
                    else
                        it->second += cj;
                };
                add(pj, dk);
                add(pk, dj);
                for (auto& [pe, cj] : acc)
                    if (!cj.is_zero()) sym.entries[r][c].push_back({pe, cj});
            }
    for (int a = 2; r < D; ++a, ++r)
        sym.entries[r][data.e_offset + a - 1].push_back(
            {pn3, Jet::constant(n, Ko, one)});
    return sym;
}

Jet PrincipalSymbol::det_on_jets(const std::vector<Jet>& pjets) const {
    if (static_cast<int>(pjets.size()) != n)
        throw ContextError("det_on_jets: expected n conormal jets");
    int nv = pjets[0].nvars();
    int ord = pjets[0].order();
    Mode md = pjets[0].mode();
    JetMatrix A(dim, dim, Jet(nv, ord, md));
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) {
            Jet acc(nv, ord, md);
            for (auto& t : entries[r][c]) {
                Jet e = lift(t.coeff, nv).with_order(ord);
                for (int i = 0; i < n; ++i)
                    if (t.pexp[i] > 0) e = e * jet_pow(pjets[i], t.pexp[i], nv, ord, md);
                acc += e;
            }
            A.at(r, c) = acc;
        }
    return jet_det(A);
}

Jet PrincipalSymbol::restricted_det(const Jet& s) const {
    if (s.nvars() != n)
        throw ContextError("restricted_det: surface function has wrong dimension");
    std::vector<Jet> pjets;
    for (int i = 0; i < n; ++i) pjets.push_back(differentiate(s, i));
    return det_on_jets(pjets);
}

double PrincipalSymbol::eval(const std::vector<double>& x,
                             const std::vector<double>& p) const {
    return CompiledSymbol(*this).eval(x, p);
}

std::vector<double> PrincipalSymbol::grad_x(const std::vector<double>& x,
                                            const std::vector<double>& p) const {
    std::vector<double> gx, gp;
    CompiledSymbol(*this).gradients(x, p, gx, gp);
    return gx;
}

std::vector<double> PrincipalSymbol::grad_p(const std::vector<double>& x,
                                            const std::vector<double>& p) const {
    std::vector<double> gx, gp;
    CompiledSymbol(*this).gradients(x, p, gx, gp);
    return gp;
}

CharClassification is_characteristic(const PrincipalSymbol& sym,
                                     const std::vector<Scalar>& x, const Jet& s) {
    Jet astar = sym.restricted_det(s);
    CharClassification out;
    bool exact = sym.mode() == Mode::exact && s.mode() == Mode::exact;
    for (auto& c : x) exact = exact && c.mode() == Mode::exact;
    if (exact) {
        out.value = astar.eval(x);
        out.tolerance = 0.0;
        out.characteristic = out.value.is_zero();
    } else {
        std::vector<double> xd;
        for (auto& c : x) xd.push_back(c.to_double());
        out.value = Scalar::real(astar.eval_double(xd));
        out.tolerance = 1e-12;
        out.characteristic = out.value.abs() <= out.tolerance;
    }
    return out;
}

NonexCertificate is_nonexceptional(const PrincipalSymbol& sym,
                                   const std::vector<Scalar>& x, const Jet& s) {
    int n = sym.n;
    Mode mode = sym.mode();
    Jet astar = sym.restricted_det(s);
    // exact tangential frame Y_i = ds_q e_i - ds_i e_q at the pivot q
    std::vector<Scalar> ds;
    for (int i = 0; i < n; ++i) ds.push_back(differentiate(s, i).eval(x));
    int q = 0;
    for (int i = 1; i < n; ++i)
        if (ds[i].abs() > ds[q].abs()) q = i;
    if (ds[q].is_zero())
        throw ContextError("is_nonexceptional: surface gradient vanishes at x");
    std::vector<Scalar> grad;
    for (int i = 0; i < n; ++i) grad.push_back(differentiate(astar, i).eval(x));

    NonexCertificate cert;
    cert.value = Scalar::zero(mode == Mode::exact && x[0].mode() == Mode::exact
                                  ? Mode::exact
                                  : x[0].mode());
    double tol = mode == Mode::exact ? 0.0 : 1e-12;
    int basis = 0;
    for (int i = 0; i < n; ++i) {
        if (i == q) continue;
        Scalar d = ds[q] * grad[i] - ds[i] * grad[q];
        if (d.abs() > tol) {
            cert.nonexceptional = true;
            cert.witness = basis;
            cert.value = d;
            std::vector<Scalar> Y(n, Scalar::zero(d.mode()));
            Y[i] = ds[q];
            Y[q] = -ds[i];
            cert.witness_direction = Y;
            return cert;
        }
        ++basis;
    }
    cert.inconclusive = true;
    return cert;
}

CharStrip hamilton_flow(const PrincipalSymbol& sym, const std::vector<double>& y,
                        const Jet& s, double t0, double t1, double h,
                        double drift_tol, int halve_budget) {
    if (static_cast<int>(y.size()) != sym.n)
        throw ContextError("hamilton_flow: base point dimension mismatch");
    int n = sym.n;
    CompiledSymbol C(sym);
    std::vector<double> p0 = surface_gradient(s, y);
    double g0 = C.eval(y, p0);
    double xi0 = s.eval_double(y);

    std::vector<double> gx, gp;
    C.gradients(y, p0, gx, gp);
    if (norm2(gp) <= 1e-24) {
        CharStrip strip;
        strip.t = {t0};
        strip.x = {y};
        strip.p = {p0};
        strip.xi = {xi0};
        strip.drift = {0.0};
        strip.g0 = g0;
        strip.h = h;
        strip.zero_velocity = true;
        return strip;
    }

    auto deriv = [&](const std::vector<double>& x, const std::vector<double>& p,
                     std::vector<double>& dx, std::vector<double>& dp, double& dxi) {
        C.gradients(x, p, dx, dp);
        std::swap(dx, dp);                 // dx/dt = d_p g
        for (double& c : dp) c = -c;       // dp/dt = -d_x g
        dxi = -C.eval(x, p);
        for (int i = 0; i < n; ++i) dxi += p[i] * dx[i];
    };

    for (int attempt = 0; attempt <= halve_budget; ++attempt, h /= 2) {
        CharStrip strip;
        strip.g0 = g0;
        strip.h = h;
        std::vector<double> x = y, p = p0;
        double xi = xi0, t = t0;
        auto record = [&]() {
            strip.t.push_back(t);
            strip.x.push_back(x);
            strip.p.push_back(p);
            strip.xi.push_back(xi);
            double d = C.eval(x, p) - g0;
            strip.drift.push_back(d);
            strip.max_drift = std::max(strip.max_drift, std::fabs(d));
        };
        record();
        std::vector<double> k1x, k1p, k2x, k2p, k3x, k3p, k4x, k4p, xs(n), ps(n);
        double k1xi, k2xi, k3xi, k4xi;
        while (t < t1 - 1e-15) {
            double step = std::min(h, t1 - t);
            deriv(x, p, k1x, k1p, k1xi);
            for (int i = 0; i < n; ++i) {
                xs[i] = x[i] + 0.5 * step * k1x[i];
                ps[i] = p[i] + 0.5 * step * k1p[i];
            }
            deriv(xs, ps, k2x, k2p, k2xi);
            for (int i = 0; i < n; ++i) {
                xs[i] = x[i] + 0.5 * step * k2x[i];
                ps[i] = p[i] + 0.5 * step * k2p[i];
            }
            deriv(xs, ps, k3x, k3p, k3xi);
            for (int i = 0; i < n; ++i) {
                xs[i] = x[i] + step * k3x[i];
                ps[i] = p[i] + step * k3p[i];
            }
            deriv(xs, ps, k4x, k4p, k4xi);
            for (int i = 0; i < n; ++i) {
                x[i] += step / 6.0 * (k1x[i] + 2 * k2x[i] + 2 * k3x[i] + k4x[i]);
                p[i] += step / 6.0 * (k1p[i] + 2 * k2p[i] + 2 * k3p[i] + k4p[i]);
            }
            xi += step / 6.0 * (k1xi + 2 * k2xi + 2 * k3xi + k4xi);
            t += step;
            record();
        }
        if (strip.max_drift <= drift_tol) return strip;
    }
    throw Error("hamilton_flow: Hamiltonian drift exceeds tolerance after step halving");
}

UniformizationMap solve_hj_series(const PrincipalSymbol& sym, const Jet& s, int K) {
    if (sym.m < 1)
        throw ContextError("solve_hj_series: symbol must have p-degree at least 1");
    int n = sym.n;
    if (s.nvars() != n)
        throw ContextError("solve_hj_series: surface function has wrong dimension");
    FirstOrderProblem prob;
    prob.nvars = n + 1;       // (x_1..x_n, t), t resolved by the CK recursion
    prob.unknowns = 1;
    prob.order = K;
    prob.initial = {s.truncated(K)};
    prob.rhs = [sym, n](const std::vector<Jet>& f) {
        std::vector<Jet> pjets;
        for (int i = 0; i < n; ++i) pjets.push_back(differentiate(f[0], i));
        return std::vector<Jet>{-sym.det_on_jets(pjets)};
    };
    UniformizationMap map;
    map.n = n;
    map.s = s;
    map.xi = solve_first_order(prob)[0];
    map.dxi_dt = differentiate(map.xi, n);
    return map;
}

UniformizeValue uniformize_eval(const UniformizationMap& map, double t,
                                const std::vector<double>& x, double ztol) {
    if (static_cast<int>(x.size()) != map.n)
        throw ContextError("uniformize_eval: point dimension mismatch");
    double r = std::fabs(t);
    for (double c : x) r = std::max(r, std::fabs(c));
    if (r > map.trust_radius)
        throw ContextError("uniformize_eval: point outside the trust region");
    std::vector<double> pt = x;
    pt.push_back(t);
    UniformizeValue v;
    v.xi = map.xi.eval_double(pt);
    v.dxi_dt = map.dxi_dt.eval_double(pt);
    v.on_Z = std::fabs(v.dxi_dt) <= ztol;
    return v;
}

ConoidSample conoid_sample(const PrincipalSymbol& sym,
                           const std::vector<double>& vertex, const Jet& s,
                           int rays, double t0, double t1, double h,
                           double spread) {
    int n = sym.n;
    CompiledSymbol C(sym);
    std::vector<double> pv = surface_gradient(s, vertex);
    double scale = 1.0;
    for (double c : pv) scale = std::max(scale, std::fabs(c));
    if (std::fabs(C.eval(vertex, pv)) > 1e-8 * scale)
        throw ContextError("conoid_sample: vertex is not a characteristic point");

    ConoidSample out;
    out.strips.push_back(hamilton_flow(sym, vertex, s, t0, t1, h));
    out.exceptional = out.strips[0].zero_velocity;

    // orthonormal tangential directions at the vertex (all coordinate
    // directions when the surface gradient vanishes there)
    std::vector<std::vector<double>> basis;
    double dsn = norm2(pv);
    for (int i = 0; i < n && static_cast<int>(basis.size()) < n - (dsn > 1e-24); ++i) {
        std::vector<double> b(n, 0.0);
        b[i] = 1.0;
        if (dsn > 1e-24) {
            double proj = pv[i] / dsn;
            for (int j = 0; j < n; ++j) b[j] -= proj * pv[j];
        }
        for (auto& e : basis) {
            double proj = 0.0;
            for (int j = 0; j < n; ++j) proj += b[j] * e[j];
            for (int j = 0; j < n; ++j) b[j] -= proj * e[j];
        }
        double len = std::sqrt(norm2(b));
        if (len < 1e-10) continue;
        for (double& c : b) c /= len;
        basis.push_back(b);
    }
    int nb = static_cast<int>(basis.size());

    for (int k = 0; k < rays && nb > 0; ++k) {
        double sign = (k % (2 * nb)) < nb ? 1.0 : -1.0;
        double mag = spread * (1.0 + k / (2 * nb));
        const auto& dir = basis[k % nb];
        std::vector<double> y = vertex;
        for (int j = 0; j < n; ++j) y[j] += sign * mag * dir[j];

        if (sym.kind == PrincipalSymbol::Kind::system) {
            // Newton-project y back onto the characteristic locus A_* = 0
            bool on_locus = false;
            for (int it = 0; it < 25; ++it) {
                std::vector<double> py = surface_gradient(s, y);
                double val = C.eval(y, py);
                if (std::fabs(val) <= 1e-10 * scale) {
                    on_locus = true;
                    break;
                }
                std::vector<double> gx, gp;
                C.gradients(y, py, gx, gp);
                std::vector<double> grad = gx;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        grad[i] += gp[j] * differentiate(differentiate(s, j), i)
                                               .eval_double(y);
                double g2 = norm2(grad);
                if (g2 <= 1e-24) break;
                for (int i = 0; i < n; ++i) y[i] -= val * grad[i] / g2;
            }
            if (!on_locus) continue;
        }
        // like a failed projection, a ray whose flow cannot hold the drift
        // budget at this symbol's scale is skipped rather than fatal
        try {
            out.strips.push_back(hamilton_flow(sym, y, s, t0, t1, h));
        } catch (const Error&) {
            continue;
        }
    }
    return out;
}

void write_strips_csv(std::ostream& os, const std::vector<CharStrip>& strips) {
    if (strips.empty()) return;
    int n = static_cast<int>(strips[0].x[0].size());
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",x" << i;
    for (int i = 1; i <= n; ++i) os << ",p" << i;
    os << ",xi,g_drift\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    for (auto& strip : strips)
        for (size_t k = 0; k < strip.t.size(); ++k) {
            put(strip.t[k]);
            for (double c : strip.x[k]) {
                os << ',';
                put(c);
            }
            for (double c : strip.p[k]) {
                os << ',';
                put(c);
            }
            os << ',';
            put(strip.xi[k]);
            os << ',';
            put(strip.drift[k]);
            os << '\n';
        }
}

} // namespace embjet
