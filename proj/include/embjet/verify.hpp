#ifndef EMBJET_VERIFY_HPP
#define EMBJET_VERIFY_HPP

#include "embjet/embedding.hpp"

namespace embjet {

struct ResidualEntry {
    std::string name;
    Jet residual;
    double max_abs = 0.0;
};

// Left-minus-right of a family of equations, checked coefficientwise.
// Exact mode passes only when every coefficient is the zero rational;
// float mode uses 1e-9 scaled by the largest input coefficient.
struct ResidualReport {
    std::vector<ResidualEntry> entries;
    int order_checked = 0;
    double tolerance = 0.0;
    bool pass = false;

    double max_abs() const;
};

// Residuals of the first-order embedding system (I.1)-(I.3).
ResidualReport first_order_residual(const EmbeddingJet& u, const MetricJet& g);

// Residuals of the data constraints: (7)-(10) for nonsingular data against
// (gbar, h, gnn0), which read (C1)-(C4) in the singular normalization.
ResidualReport constraint_residual(const CauchyData& data, const JetMatrix& gbar,
                                   const JetMatrix& h, const Jet& gnn_data);

// Constraint residuals for singular data straight from the admissible metric:
// gnn_data = |x'|^2 F per (C1).
ResidualReport constraint_residual(const CauchyData& data, const AdmissibleMetric& g);

// The computational content of the first-to-second-order equivalence:
// a second-order solution with constrained data must satisfy (I.1)-(I.3)
// to order K-1.  Identical computation to first_order_residual, separate
// entry names for reporting.
ResidualReport equivalence_check(const EmbeddingJet& u, const MetricJet& g);

struct RankCertificate {
    Scalar det_constant;   // determinant at the base point
    bool nonsingular = false;
    Jet det;               // full determinant jet
};

// Determinant of a square frame of column vectors (given as a JetMatrix
// whose columns are the frame members).
RankCertificate rank_certificate(const JetMatrix& frame);

} // namespace embjet

#endif
