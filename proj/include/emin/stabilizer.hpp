#ifndef EMIN_STABILIZER_HPP
#define EMIN_STABILIZER_HPP

#include <string>
#include <vector>

#include "emin/czd.hpp"
#include "emin/efunctional.hpp"
#include "emin/grid.hpp"
#include "emin/singular.hpp"
#include "emin/wavelet.hpp"

namespace emin {

/// Additive split of ||Tf - Tu||_1 used in the stability estimate:
///   off_dilate    tail of the projected bad part outside the dilated union,
///   witness       |Tf - v| over the dilated union (v a near-minimizer of Tf),
///   holder_direct |Tu - v| over the dilated union,
///   holder_bound  the product bound ||Tu - v||_p * measure^(1/p') that
///                 dominates holder_direct.
struct TermBreakdown {
    double off_dilate = 0.0;
    double witness = 0.0;
    double holder_direct = 0.0;
    double holder_bound = 0.0;
};

struct StabilizationReport {
    Signal u;          // the stabilized near-minimizer
    Signal h;          // input near-minimizer
    Signal witness_v;  // near-minimizer for Tf
    double s = 0.0;
    double p = 0.0;
    double t = 0.0;    // CZ threshold from t^(p-1) ||f-h||_1 = s^p
    double e_f = 0.0;  // E(s, f)
    double e_Tf = 0.0; // E(s, Tf)
    double norm_f_minus_h = 0.0;
    double r1 = 0.0;   // ||u||_p / s
    double r2 = 0.0;   // ||f-u||_1 / E(s,f)
    double r3 = 0.0;   // ||Tf-Tu||_1 / (E(s,f) + E(s,Tf))
    TermBreakdown terms;
    double dilation = 0.0;
    double measure_sum = 0.0;   // sum of |I| over selected intervals
    int n_selected = 0;
    int saturated = 0;
    bool degenerate = false;    // ||f-h|| = 0: u = h, guarded ratios
    std::vector<std::string> warnings;
};

/// t with t^(p-1) * r1norm = s^p. r1norm = 0 means the minimizer is already
/// exact; callers must handle that case before solving for t.
double t_parameter(double s, double p, double r1norm);

/// u = h + good part of the CZ split of (f - h) at threshold t, for the
/// couple (L1, L^p) and a wavelet coefficient projection T.
StabilizationReport stabilize_unweighted(const Signal& f, double s, double p,
                                         const ProjectionSpec& T, const WaveletBasis& basis,
                                         double dilation = 30.0, double slack = 1.0);

/// Weighted variant: couple (L1(w), L^p(v)), good part from the weighted
/// decomposition with a = (w^p/v)^(1/(p-1)), dilated cubes 2Q.
StabilizationReport stabilize_weighted(const Signal& f, double s, double p,
                                       const SingularOperator& T, const Weight& w,
                                       const Weight& v, double dilation = 2.0,
                                       double slack = 1.0);

enum class ApproxMode {
    Plain,              // f_k from the stabilization at s_k
    RestrictedSupport,  // T = projection onto the nonzero coefficients of f; returns T f_k
};

struct ApproxStep {
    double s = 0.0;
    Signal fk;           // f_k, or T f_k in RestrictedSupport mode
    double err_f = 0.0;  // ||f_k - f||_1 (|| Tf_k - Tf ||_1 of the mode's T in RestrictedSupport)
    double err_T = 0.0;  // ||T f_k - T f||_1
};

/// Approximating sequence along an increasing list of radii. Both error
/// metrics trend to zero; once s >= ||f||_p the sequence reaches f exactly.
std::vector<ApproxStep> approx_sequence(const Signal& f, const ProjectionSpec& T,
                                        const WaveletBasis& basis, std::vector<double> s_list,
                                        double p, ApproxMode mode = ApproxMode::Plain);

/// Detail-index set of the (numerically) nonzero wavelet coefficients of f.
ProjectionSpec nonzero_projection_spec(const Signal& f, const WaveletBasis& basis,
                                       double tol = 1e-12);

}  // namespace emin

#endif  // EMIN_STABILIZER_HPP
