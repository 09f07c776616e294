#ifndef EMIN_EFUNCTIONAL_HPP
#define EMIN_EFUNCTIONAL_HPP

#include <optional>

#include "emin/grid.hpp"

namespace emin {

/// The couple (L1(w), L^p(v)); omitted weights default to 1.
struct CoupleSpec {
    double p = 2.0;
    std::optional<Weight> w;  // L1 side
    std::optional<Weight> v;  // Lp side

    static CoupleSpec unweighted(double p) { return CoupleSpec{p, std::nullopt, std::nullopt}; }
    static CoupleSpec weighted(double p, Weight w, Weight v) {
        return CoupleSpec{p, std::move(w), std::move(v)};
    }

    double l1_norm(const Signal& f) const { return lp_norm(f, 1.0, w ? &*w : nullptr); }
    double lp_ball_norm(const Signal& f) const { return lp_norm(f, p, v ? &*v : nullptr); }

    /// Truncation density b = (w/v)^(1/(p-1)); 1 when both weights are absent.
    std::vector<double> truncation_density(const Grid& grid) const;
};

/// A minimizer of ||f-g||_{L1(w)} over the ball ||g||_{Lp(v)} <= s, together
/// with the truncation level that produced it.
struct EMinimizer {
    Signal g;
    double level_scale = 0.0;  // c in g = sign(f)*min(|f|, c*b); infinity means g = f
    double e_value = 0.0;      // ||f - g||_{L1(w)}
};

/// Exact distance minimizer by pointwise truncation at level c*b(x), with c
/// found by bisection so the ball constraint is active. Per-cell minimization
/// of |f-g|*w + mu*|g|^p*v truncates exactly at a level proportional to b, so
/// the truncation family contains the optimum.
EMinimizer truncate_to_ball(const Signal& f, double s, const CoupleSpec& couple);

/// E(s, f) = distance in L1(w) from f to the radius-s ball of Lp(v).
double e_functional(const Signal& f, double s, const CoupleSpec& couple);

/// slack = 1 returns the exact minimizer. slack > 1 deliberately degrades it:
/// the result h still satisfies ||h|| <= s and ||f-h||_1 <= slack * E(s,f),
/// which is all the stabilization constructions assume about h.
EMinimizer near_minimizer(const Signal& f, double s, const CoupleSpec& couple, double slack = 1.0);

}  // namespace emin

#endif  // EMIN_EFUNCTIONAL_HPP
