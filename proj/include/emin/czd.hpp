#ifndef EMIN_CZD_HPP
#define EMIN_CZD_HPP

#include <stdexcept>
#include <vector>

#include "emin/grid.hpp"
#include "emin/wavelet.hpp"

namespace emin {

/// The stopping time needs the root average of |f| to sit at or below the
/// threshold; on a bounded domain that is a genuine precondition, not a
/// recoverable state.
struct ThresholdBelowRootAverage : std::invalid_argument {
    ThresholdBelowRootAverage() : std::invalid_argument("threshold below root average") {}
};

/// Result of the dyadic stopping time at threshold lambda: the maximal
/// selected intervals S (pairwise disjoint, in position order) and the quiet
/// set F = root minus their union.
struct CZStop {
    double lambda = 0.0;
    std::vector<DyadicInterval> selected;
    CellMask quiet_mask;     // 1 on F
    double measure_sum = 0;  // sum of |I| over selected
    int saturated_count = 0; // selected single cells (scale J), which cannot subdivide

    bool in_quiet_set(std::int64_t cell) const { return quiet_mask[static_cast<std::size_t>(cell)] != 0; }
};

/// Select the maximal dyadic intervals where the average of |f| exceeds lambda.
/// Requires the root average <= lambda. Every selected interval has average in
/// (lambda, 2*lambda]; |f| <= lambda on the complement.
CZStop cz_stop(const Signal& f, double lambda);

/// Wavelet-based good/bad split: good = f*chi_F + sum over S of P_r(f*chi_I);
/// the bad remainder splits into mean-free pieces Q_r(f*chi_I) localized at
/// the selected intervals.
struct WaveletCZ {
    CZStop stop;
    Signal good;
    /// Bad content aggregated per scale: (r, Q_r(f*chi_{union of selected I at scale r})).
    /// Summing these blocks gives f - good exactly; per-interval pieces are
    /// available through bad_part().
    std::vector<std::pair<int, Signal>> bad_by_scale;

    Signal bad_total() const;
};

WaveletCZ wavelet_good_part(const Signal& f, double lambda, const WaveletBasis& basis);

/// Q_r(f*chi_I) for a single selected interval (r = I.r).
Signal bad_part(const Signal& f, const WaveletBasis& basis, const DyadicInterval& I);

/// Image of the bad part under a coefficient projection, composed at
/// coefficient level (mask to scales >= r, then to the kept index set A, then
/// synthesize). Exact zeros survive off the selected set for Haar.
Signal project_bad_total(const Signal& f, const WaveletCZ& cz, const WaveletBasis& basis,
                         const ProjectionSpec& spec);

/// Weighted decomposition of G in L1(w), driven by the a-weighted averages of
/// g = G*(w/a). Good part spreads each cube's integral of G along b = a/w.
struct WeightedCZ {
    double lambda = 0.0;
    std::vector<DyadicInterval> cubes;
    Signal good;
    CellMask quiet_mask;
    double measure_sum = 0.0;
    int saturated_count = 0;
    /// Max over selected cubes of a(parent)/a(cube): the factor by which a
    /// selected average can overshoot lambda on dyadic halving.
    double selection_constant = 1.0;
};

WeightedCZ weighted_cz(const Signal& G, double lambda, const Weight& w, const Weight& a);

}  // namespace emin

#endif  // EMIN_CZD_HPP
