#ifndef EMIN_ORACLE_EFUNCTIONAL_HPP
#define EMIN_ORACLE_EFUNCTIONAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "emin/efunctional.hpp"
#include "emin/grid.hpp"

namespace emin::test {

/// Exhaustive minimum of ||f-g||_{L1(w)} over the quantized ball
/// ||g||_{Lp(v)} <= s, independent of the solver. Cell i ranges over
/// g_i = sign(f_i) * q * |f_i|/(levels-1), q = 0..levels-1: clamping any g
/// toward f pointwise lowers both the cost and the ball norm, so the
/// restricted quantized search brackets the continuous optimum to within one
/// quantization step of cost.
///
/// Meet-in-the-middle over the two cell halves keeps 33^8 combinations
/// tractable: the second half becomes a budget-sorted prefix-min table.
inline double brute_force_e_value(const Signal& f, double s, const CoupleSpec& couple,
                                  int levels) {
    const std::int64_t n = f.size();
    const double cw = f.grid.cell_width();
    const double p = couple.p;
    std::vector<double> absf(static_cast<std::size_t>(n)), wcw(absf.size()), vcw(absf.size());
    for (std::int64_t i = 0; i < n; ++i) {
        absf[static_cast<std::size_t>(i)] = std::abs(f[i]);
        wcw[static_cast<std::size_t>(i)] = (couple.w ? couple.w->values[i] : 1.0) * cw;
        vcw[static_cast<std::size_t>(i)] = (couple.v ? couple.v->values[i] : 1.0) * cw;
    }
    const double target = std::pow(s, p);
    const std::int64_t nA = n / 2, nB = n - nA;

    struct Entry {
        double budget;
        double cost;
    };
    auto enumerate = [&](std::int64_t first, std::int64_t count) {
        std::vector<Entry> out;
        std::vector<int> q(static_cast<std::size_t>(count), 0);
        std::size_t total = 1;
        for (std::int64_t i = 0; i < count; ++i) total *= static_cast<std::size_t>(levels);
        out.reserve(total);
        for (;;) {
            double budget = 0.0, cost = 0.0;
            for (std::int64_t i = 0; i < count; ++i) {
                const std::size_t cell = static_cast<std::size_t>(first + i);
                const double gi =
                    absf[cell] * q[static_cast<std::size_t>(i)] / (levels - 1);
                budget += std::pow(gi, p) * vcw[cell];
                cost += (absf[cell] - gi) * wcw[cell];
            }
            out.push_back({budget, cost});
            std::int64_t d = 0;
            while (d < count && ++q[static_cast<std::size_t>(d)] == levels) {
                q[static_cast<std::size_t>(d)] = 0;
                ++d;
            }
            if (d == count) break;
        }
        return out;
    };

    std::vector<Entry> B = enumerate(nA, nB);
    std::sort(B.begin(), B.end(),
              [](const Entry& a, const Entry& b) { return a.budget < b.budget; });
    for (std::size_t i = 1; i < B.size(); ++i) B[i].cost = std::min(B[i].cost, B[i - 1].cost);

    const std::vector<Entry> A = enumerate(0, nA);
    double best = std::numeric_limits<double>::infinity();
    for (const Entry& ea : A) {
        const double rem = target - ea.budget;
        if (rem < 0.0) continue;
        // rightmost B budget <= rem
        std::size_t lo = 0, hi = B.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (B[mid].budget <= rem)
                lo = mid + 1;
            else
                hi = mid;
        }
        if (lo == 0) continue;
        best = std::min(best, ea.cost + B[lo - 1].cost);
    }
    return best;
}

}  // namespace emin::test

#endif
