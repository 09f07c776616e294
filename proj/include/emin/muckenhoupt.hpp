#ifndef EMIN_MUCKENHOUPT_HPP
#define EMIN_MUCKENHOUPT_HPP

#include <vector>

#include "emin/grid.hpp"

namespace emin {

/// A_p characteristic with its refinement trace: trace[d] is the same
/// characteristic evaluated on the weight coarsened to a depth-d grid
/// (block averages), so growth across depths flags a class failure that a
/// single finite-grid value cannot.
struct WeightReport {
    double characteristic = 1.0;
    double p = 1.0;
    int depth = 0;
    std::vector<double> trace;  // trace[d], d = 0..J; trace[J] == characteristic
};

/// |midpoint - center|^beta on the grid cells. The center must not hit a cell
/// midpoint (dyadic centers never do).
Weight power_weight(double beta, double center, const Grid& grid);

/// sup over intervals of <w>_I <w^(-1/(p-1))>_I^(p-1) for p > 1, or
/// <w>_I / min_I w for p = 1. Intervals are dyadic, plus the half-shifted
/// dyadic family when include_shifted is set (each shifted interval is the
/// union of two adjacent dyadic intervals one scale finer).
WeightReport ap_characteristic(const Weight& w, double p, bool include_shifted = false);

/// sup over dyadic I of w(2I)/w(I), the 2-dilate clipped to the root interval.
double doubling_constant(const Weight& w);

struct WeightTriple {
    Weight w;
    Weight v;
    Weight a;  // (w^p / v)^(1/(p-1)) pointwise
    WeightReport w_report;  // A_1
    WeightReport v_report;  // A_p
    WeightReport a_report;  // A_q proxy at q = max(p, 2)
};

/// Power-weight test triple for the weighted stabilization setting, centered
/// at the midpoint of the root interval.
WeightTriple theorem3_weight_triple(double w_beta, double v_beta, double p, const Grid& grid);

}  // namespace emin

#endif  // EMIN_MUCKENHOUPT_HPP
