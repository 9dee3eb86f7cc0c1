#ifndef EMBJET_CHARACTERISTICS_HPP
#define EMBJET_CHARACTERISTICS_HPP

#include <iosfwd>

#include "embjet/embedding.hpp"

namespace embjet {

// Principal symbol: a D x D matrix A(x,p) of p-homogeneous polynomials with
// analytic x-coefficients.  Scalar Hamiltonians are the D = 1 case; the
// Hamiltonian proper is always A_*(x,p) = det A(x,p).
struct PrincipalSymbol {
    enum class Kind { scalar, system };
    struct Term {
        MultiIndex pexp;   // exponent of the p-monomial
        Jet coeff;         // jet in the n base variables
    };

    Kind kind = Kind::scalar;
    int n = 0;      // base dimension (number of x and of p variables)
    int dim = 1;    // matrix size D
    int m = 0;      // p-homogeneity degree of det A
    std::vector<std::vector<std::vector<Term>>> entries;   // [row][col][terms]

    Mode mode() const;

    // Split a jet in 2n variables (x_1..x_n, p_1..p_n); every monomial must
    // have the same total p-degree (p-homogeneous principal part).
    static PrincipalSymbol scalar_symbol(const Jet& gxp, int n);

    // Choquet-Bruhat matrix of the once-differentiated (quasilinearized)
    // augmented embedding system, evaluated on the first-order prolongation
    // u0 + x_n u1 of the Cauchy data:
    //   A_rc = Row_rc p_n^3 - (d_k u1_c p_j + d_j u1_c p_k) p_n^2
    // on the second-derivative rows, Row_rc p_n^3 elsewhere, so that on S
    // det A(x', e_n) is exactly the data determinant Delta(x').
    static PrincipalSymbol system_symbol(const CauchyData& data);

    // det A with p substituted by jets (x variables are the first n of the
    // jets' context); used for exact restriction to a surface conormal and
    // for the Hamilton-Jacobi series.
    Jet det_on_jets(const std::vector<Jet>& pjets) const;
    // A_*(x) = det A(x, d s(x)) as a jet in n variables.
    Jet restricted_det(const Jet& s) const;

    // numeric evaluation of the Hamiltonian and its gradients (adjugate
    // identity d det = tr(adj(A) dA))
    double eval(const std::vector<double>& x, const std::vector<double>& p) const;
    std::vector<double> grad_x(const std::vector<double>& x,
                               const std::vector<double>& p) const;
    std::vector<double> grad_p(const std::vector<double>& x,
                               const std::vector<double>& p) const;
};

struct CharClassification {
    bool characteristic = false;
    Scalar value;          // A_*(x, d s(x))
    double tolerance = 0;  // 0 exact, 1e-12 float
};

CharClassification is_characteristic(const PrincipalSymbol& sym,
                                     const std::vector<Scalar>& x, const Jet& s);

// Sufficient non-exceptionality test: some derivative of A_* along T_xS is
// nonzero.  All tangential derivatives zero is reported as inconclusive
// (possibly exceptional), never as a definite classification.
struct NonexCertificate {
    bool nonexceptional = false;
    bool inconclusive = false;
    int witness = -1;      // index of the tangential basis direction
    std::vector<Scalar> witness_direction;
    Scalar value;          // derivative of A_* along the witness
};

NonexCertificate is_nonexceptional(const PrincipalSymbol& sym,
                                   const std::vector<Scalar>& x, const Jet& s);

// One bicharacteristic strip: samples of the Hamilton ODEs
//   dx/dt = d_p g, dp/dt = -d_x g, dxi/dt = p . d_p g - g
// from (y, d s(y)), integrated with the classical fixed-step RK4 scheme.
struct CharStrip {
    std::vector<double> t;
    std::vector<std::vector<double>> x, p;
    std::vector<double> xi;
    std::vector<double> drift;     // g(x(t),p(t)) - g0 per sample
    double g0 = 0.0;
    double h = 0.0;
    double max_drift = 0.0;
    bool zero_velocity = false;    // d_p g = 0 at the start: single-point strip
};

CharStrip hamilton_flow(const PrincipalSymbol& sym, const std::vector<double>& y,
                        const Jet& s, double t0, double t1, double h,
                        double drift_tol = 1e-8, int halve_budget = 6);

// xi(t,x) solving d_t xi + g(x, d_x xi) = 0, xi(0,x) = s(x), as a jet in
// n+1 variables with t LAST; f(t,x) = (xi(t,x), x) is the uniformizing map
// and Z_xi = {d_t xi = 0} its critical locus.
struct UniformizationMap {
    int n = 0;
    Jet s;
    Jet xi;          // jet in (x_1..x_n, t)
    Jet dxi_dt;
    double trust_radius = 1.0;
};

UniformizationMap solve_hj_series(const PrincipalSymbol& sym, const Jet& s, int K);

struct UniformizeValue {
    double xi = 0.0;
    double dxi_dt = 0.0;
    bool on_Z = false;
};

UniformizeValue uniformize_eval(const UniformizationMap& map, double t,
                                const std::vector<double>& x, double ztol = 1e-9);

// Conoid through a characteristic vertex: the strip from the vertex plus
// strips from nearby surface points (Newton-projected back onto the
// characteristic locus for system symbols).  A zero-velocity vertex strip
// raises the possibly-exceptional flag.
struct ConoidSample {
    std::vector<CharStrip> strips;
    bool exceptional = false;
};

ConoidSample conoid_sample(const PrincipalSymbol& sym,
                           const std::vector<double>& vertex, const Jet& s,
                           int rays, double t0, double t1, double h = 1e-3,
                           double spread = 0.05);

// CSV rows `t,x1..xn,p1..pn,xi,g_drift` for every sample of every strip.
void write_strips_csv(std::ostream& os, const std::vector<CharStrip>& strips);

} // namespace embjet

#endif
