#include "embjet/verify.hpp"

#include <algorithm>

namespace embjet {

namespace {

double input_scale(const std::vector<Jet>& jets) {
    double s = 1.0;
    for (auto& j : jets) s = std::max(s, j.max_abs_coeff());
    return s;
}

void finalize(ResidualReport& rep, Mode mode, double scale) {
    rep.tolerance = mode == Mode::exact ? 0.0 : 1e-9 * scale;
    rep.pass = true;
    rep.order_checked = rep.entries.empty() ? 0 : rep.entries[0].residual.order();
    for (auto& e : rep.entries) {
        e.max_abs = e.residual.max_abs_coeff();
        rep.order_checked = std::min(rep.order_checked, e.residual.order());
        if (e.max_abs > rep.tolerance) rep.pass = false;
    }
}

} // namespace

double ResidualReport::max_abs() const {
    double m = 0.0;
    for (auto& e : entries) m = std::max(m, e.max_abs);
    return m;
}

ResidualReport first_order_residual(const EmbeddingJet& u, const MetricJet& g) {
    int n = g.n;
    Mode mode = g.mode();
    int Kr = u.order() - 1;
    auto dot = [&](int a, int b) {
        Jet s(n, Kr, mode);
        for (auto& c : u.comp) s += differentiate(c, a) * differentiate(c, b);
        return s;
    };
    ResidualReport rep;
    rep.entries.push_back(
        {"I.1", dot(n - 1, n - 1) - g.at(n - 1, n - 1).truncated(Kr), 0.0});
    for (int k = 0; k + 1 < n; ++k)
        rep.entries.push_back({"I.2[" + std::to_string(k + 1) + "]",
                               dot(k, n - 1) - g.at(k, n - 1).truncated(Kr), 0.0});
    for (int k = 0; k + 1 < n; ++k)
        for (int l = k; l + 1 < n; ++l)
            rep.entries.push_back(
                {"I.3[" + std::to_string(k + 1) + std::to_string(l + 1) + "]",
                 dot(k, l) - g.at(k, l).truncated(Kr), 0.0});
    double scale = input_scale(u.comp);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, g.at(i, j).max_abs_coeff());
    finalize(rep, mode, scale);
    return rep;
}

ResidualReport constraint_residual(const CauchyData& data, const JetMatrix& gbar,
                                   const JetMatrix& h, const Jet& gnn_data) {
    int m = gbar.rows();
    Mode mode = gbar.mode();
    int Kr = 0;
    for (auto& c : data.u1) Kr = std::max(Kr, c.order());
    auto dotv = [&](const std::vector<Jet>& a, const std::vector<Jet>& b, int K) {
        Jet s(m, K, mode);
        for (size_t c = 0; c < a.size(); ++c) s += a[c] * b[c];
        return s;
    };
    std::vector<std::vector<Jet>> du(m);
    for (int j = 0; j < m; ++j)
        for (auto& c : data.u0) du[j].push_back(differentiate(c, j));

    ResidualReport rep;
    {
        Jet lhs = dotv(data.u1, data.u1, Kr);
        rep.entries.push_back({"C1", lhs - gnn_data.truncated(lhs.order()), 0.0});
    }
    for (int j = 0; j < m; ++j) {
        Jet lhs = dotv(du[j], data.u1, Kr);
        rep.entries.push_back({"C2[" + std::to_string(j + 1) + "]", lhs, 0.0});
    }
    for (int j = 0; j < m; ++j)
        for (int k = j; k < m; ++k) {
            Jet lhs = dotv(du[j], du[k], data.u0[0].order() - 1);
            rep.entries.push_back(
                {"C3[" + std::to_string(j + 1) + std::to_string(k + 1) + "]",
                 lhs - gbar.at(j, k).truncated(lhs.order()), 0.0});
        }
    for (int j = 0; j < m; ++j)
        for (int k = j; k < m; ++k) {
            std::vector<Jet> ddu;
            for (auto& c : data.u0) ddu.push_back(differentiate(differentiate(c, j), k));
            Jet lhs = dotv(ddu, data.u1, Kr);
            rep.entries.push_back(
                {"C4[" + std::to_string(j + 1) + std::to_string(k + 1) + "]",
                 lhs - h.at(j, k).truncated(lhs.order()), 0.0});
        }
    double scale = std::max(input_scale(data.u0), input_scale(data.u1));
    finalize(rep, mode, scale);
    return rep;
}

ResidualReport constraint_residual(const CauchyData& data, const AdmissibleMetric& g) {
    int m = g.metric.n - 1;
    Mode mode = g.metric.mode();
    // (C1) right-hand side |x'|^2 F
    Jet xnorm2(m, g.F.order() + 2, mode);
    for (int j = 0; j < m; ++j) {
        MultiIndex mi(m);
        mi[j] = 2;
        xnorm2.set_coeff(mi, Scalar::one(mode));
    }
    Jet gnn_data = xnorm2 * g.F.with_order(g.F.order() + 2);
    return constraint_residual(data, g.gbar, g.h, gnn_data);
}

ResidualReport equivalence_check(const EmbeddingJet& u, const MetricJet& g) {
    ResidualReport rep = first_order_residual(u, g);
    for (auto& e : rep.entries) e.name = "equiv " + e.name;
    return rep;
}

RankCertificate rank_certificate(const JetMatrix& frame) {
    RankCertificate cert;
    cert.det = jet_det(frame);
    cert.det_constant = cert.det.constant_term();
    cert.nonsingular = frame.mode() == Mode::exact
                           ? !cert.det_constant.is_zero()
                           : cert.det_constant.abs() > 1e-12;
    return cert;
}

} // namespace embjet
