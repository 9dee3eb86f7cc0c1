#ifndef EMBJET_EMBEDDING_HPP
#define EMBJET_EMBEDDING_HPP

#include "embjet/metric.hpp"

namespace embjet {

// Map u: U -> E^ambient given componentwise as jets sharing one context.
struct EmbeddingJet {
    int ambient = 0;
    std::vector<Jet> comp;

    int nvars() const { return comp.empty() ? 0 : comp[0].nvars(); }
    int order() const;
    Mode mode() const { return comp.empty() ? Mode::exact : comp[0].mode(); }
};

// Cauchy data (u0, u1) on the hypersurface x_n = 0, as jets in n-1 variables.
// For singular data the determinant Delta and its factor Delta0 certify the
// non-exceptional characteristic point at the origin.
struct CauchyData {
    int n = 0;            // dimension of the metric the data serves
    int ambient = 0;
    std::vector<Jet> u0, u1;
    Scalar scale_used;    // mu (nonsingular) or eps (singular)
    bool singular = false;
    int e_offset = 0;     // ambient index of the appended E^{n-1} factor
    Jet Delta, Delta0;    // singular data only
};

// The appended orthonormal factor used by the augmented system.
struct FrameData {
    int n = 0;
    int ambient = 0;
    int e_offset = 0;     // e_j hits ambient coordinate e_offset + j - 1
};

// Cartan-Janet induction: isometric embedding of a nonsingular analytic
// metric into E^{n(n+1)/2}.  Requires g.order() >= K + n - 1 so the data
// constraints hold at the orders the residual checks need.
EmbeddingJet embed_cartan_janet(const MetricJet& g, int K);

// Data for one induction step: gbar, h, bbar, gnn0 are jets in m = n-1
// variables (the restrictions of g_jk, Gamma_{jk,n}, g_jn and g_nn to
// x_n = 0; bbar may be empty for a metric with no cross terms).  u0 is
// (v, mu*Q, 0) with v an embedding of gbar - mu^2 dQ.dQ; u1 is solved from
// the constraints (8), (10) plus the norm condition (7).
CauchyData build_nonsingular_data(const JetMatrix& gbar, const JetMatrix& h,
                                  const Jet& gnn0, int order, Scalar mu,
                                  const std::vector<Jet>& bbar = {},
                                  int retry_budget = 8);

// The section-4 construction for an admissible singular metric: u0 = (w, 0)
// with w = (v, V), u1 = N + sum_j x_j G e_j, plus Delta = x1 * Delta0.
CauchyData build_singular_data(const AdmissibleMetric& g, Scalar eps, int K,
                               int retry_budget = 8);

// The (N+n-2)-dimensional augmented second-order system (II.1)-(II.3) plus
// e_a . d_nn u = 0 with the given Cauchy data.
SecondOrderProblem augmented_system(const MetricJet& g, const CauchyData& data,
                                    int K);

FrameData frame_of(const CauchyData& data);

struct PointSolve {
    std::vector<double> point;   // base point x' on the hypersurface
    EmbeddingJet u;
    double max_residual = 0.0;
};

// Float-mode solves of the augmented system recentered at nonzero base
// points; the characteristic error propagates at points with Delta ~ 0.
std::vector<PointSolve> solve_at_base_points(
    const AdmissibleMetric& g, const CauchyData& data,
    const std::vector<std::vector<double>>& points, int K);

} // namespace embjet

#endif
