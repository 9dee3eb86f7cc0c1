#ifndef EMBJET_METRIC_HPP
#define EMBJET_METRIC_HPP

#include <optional>
#include <string>
#include <vector>

#include "embjet/ck.hpp"
#include "embjet/jet_matrix.hpp"

namespace embjet {

// Symmetric metric tensor as an n x n matrix of jets in n variables.
struct MetricJet {
    int n = 0;
    JetMatrix g;   // n x n, symmetric

    int order() const { return g.min_order(); }
    Mode mode() const { return g.mode(); }
    const Jet& at(int i, int j) const { return g.at(i, j); }

    bool is_symmetric() const;
    // true when all cross terms g_{jn}, j < n, vanish identically
    bool is_normal_form() const;
    // constant term of the tangential block (g_jk), k,l < n
    std::vector<std::vector<Scalar>> tangential_constant() const;
};

MetricJet make_metric(int n, const std::vector<std::vector<Jet>>& entries);

// Normal-form metric with g_nn = (|x'|^2 + x_n^{2l}) F0 and tame normal
// derivative of the tangential block.
struct AdmissibleMetric {
    MetricJet metric;
    int l = 1;
    Jet F0;                     // n variables
    Jet F;                      // F0 restricted to x_n = 0, in n-1 variables
    JetMatrix gbar;             // tangential block on x_n = 0, n-1 variables
    JetMatrix h;                // -1/2 d/dx_n g_jk on x_n = 0, n-1 variables
};

struct AdmissibilityResult {
    std::optional<AdmissibleMetric> metric;
    std::vector<std::string> violations;
    bool ok() const { return metric.has_value(); }
};

AdmissibilityResult check_admissible(const MetricJet& g, int l);

// Grid certificate for |b|^2_{g'} < g_nn (the positivity step that forces
// the cross terms to vanish at the origin).
struct PositivityReport {
    bool b_zero_at_origin = false;
    double max_gap = 0.0;          // max over the grid of |b|^2_{g'} - g_nn
    bool inequality_holds = false; // max_gap < 0 away from the origin
};

PositivityReport positivity_certificate(const MetricJet& g,
                                        double box = 0.25, int samples = 9);

struct NormalFormResult {
    std::vector<Jet> diffeo;   // f_j, j < n, jets in n variables
    MetricJet normal;          // pullback metric, order K-1
    Scalar eps_used;
    double max_cross_coeff = 0.0;
};

// Prop-style cross-term removal: solves the first-order system for the
// shear functions f_j and pulls the metric back, retrying with smaller eps
// when the data matrix degenerates.
NormalFormResult normal_form_transform(const MetricJet& g, Scalar eps,
                                       int retry_budget = 8);

// Pullback phi^* g by a jet diffeomorphism given componentwise
// (phi must have zero constant terms; chain-rule expansion, order K-1).
MetricJet pullback(const MetricJet& g, const std::vector<Jet>& phi);

// Positive definiteness of a constant symmetric matrix via leading minors.
bool positive_definite_constant(const std::vector<std::vector<Scalar>>& a, Mode mode);

} // namespace embjet

#endif
