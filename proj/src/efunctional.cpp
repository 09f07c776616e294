#include "emin/efunctional.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace emin {

std::vector<double> CoupleSpec::truncation_density(const Grid& grid) const {
    std::vector<double> b(static_cast<std::size_t>(grid.cells()), 1.0);
    if (!w && !v) return b;
    const double e = 1.0 / (p - 1.0);
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double wi = w ? w->values[i] : 1.0;
        const double vi = v ? v->values[i] : 1.0;
        b[i] = std::pow(wi / vi, e);
    }
    return b;
}

namespace {

void validate_couple(const Signal& f, const CoupleSpec& couple) {
    if (!(couple.p > 1.0) || !std::isfinite(couple.p))
        throw std::invalid_argument("p must be finite and > 1");
    if (couple.w) require_same_grid(f.grid, couple.w->grid);
    if (couple.v) require_same_grid(f.grid, couple.v->grid);
}

Signal truncate_at(const Signal& f, const std::vector<double>& b, double c) {
    Signal g = f;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        const double cap = c * b[i];
        if (g.values[i] > cap)
            g.values[i] = cap;
        else if (g.values[i] < -cap)
            g.values[i] = -cap;
    }
    return g;
}

}  // namespace

EMinimizer truncate_to_ball(const Signal& f, double s, const CoupleSpec& couple) {
    validate_couple(f, couple);
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("s must be non-negative");

    EMinimizer out;
    if (couple.lp_ball_norm(f) <= s) {
        out.g = f;
        out.level_scale = std::numeric_limits<double>::infinity();
        out.e_value = 0.0;
        return out;
    }

    const std::vector<double> b = couple.truncation_density(f.grid);
    const std::size_t n = b.size();
    const double cw = f.grid.cell_width();
    std::vector<double> absf(n), vcw(n);
    double hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        absf[i] = std::abs(f.values[i]);
        vcw[i] = (couple.v ? couple.v->values[i] : 1.0) * cw;
        hi = std::max(hi, absf[i] / b[i]);
    }
    const double p = couple.p;
    const double target = std::pow(s, p);
    const bool p_is_two = (p == 2.0);
    auto ball_pth_power = [&](double c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = std::min(absf[i], c * b[i]);
            acc += (p_is_two ? t * t : std::pow(t, p)) * vcw[i];
        }
        return acc;
    };
    double lo = 0.0;
    // The truncated norm is continuous and nondecreasing in c, 0 at c = 0 and
    // above s at c = hi (the full f). Keep the feasible endpoint in lo.
    for (int iter = 0; iter < 200 && hi - lo > 1e-12 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (ball_pth_power(mid) <= target)
            lo = mid;
        else
            hi = mid;
    }
    out.level_scale = lo;
    out.g = truncate_at(f, b, lo);
    out.e_value = couple.l1_norm(f - out.g);
    return out;
}

double e_functional(const Signal& f, double s, const CoupleSpec& couple) {
    return truncate_to_ball(f, s, couple).e_value;
}

EMinimizer near_minimizer(const Signal& f, double s, const CoupleSpec& couple, double slack) {
    if (!(slack >= 1.0)) throw std::invalid_argument("slack must be >= 1");
    EMinimizer exact = truncate_to_ball(f, s, couple);
    if (slack == 1.0 || exact.e_value == 0.0) return exact;

    // Bisection on the radius: the smallest s' whose exact distance still
    // fits under slack * E(s) gives the crudest admissible h.
    const double budget = slack * exact.e_value;
    double lo = 0.0, hi = s;  // E(hi) = exact.e_value <= budget
    if (couple.l1_norm(f) <= budget) {
        lo = hi = 0.0;  // even h = 0 is admissible
    }
    for (int iter = 0; iter < 100 && hi - lo > 1e-10 * s; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (e_functional(f, mid, couple) <= budget)
            hi = mid;
        else
            lo = mid;
    }
    return truncate_to_ball(f, hi, couple);
}

}  // namespace emin
