#include "emin/muckenhoupt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emin {

Weight power_weight(double beta, double center, const Grid& grid) {
    std::vector<double> v(static_cast<std::size_t>(grid.cells()));
    for (std::int64_t i = 0; i < grid.cells(); ++i) {
        const double d = std::abs(grid.cell_midpoint(i) - center);
        if (d == 0.0) throw std::invalid_argument("weight center collides with a cell midpoint");
        v[static_cast<std::size_t>(i)] = std::pow(d, beta);
    }
    return Weight(grid, std::move(v));
}

namespace {

// Characteristic of a weight given by per-cell values (one depth level).
double ap_sup(const std::vector<double>& w, double p, bool include_shifted) {
    const std::size_t n = w.size();
    // Per-scale aggregates built bottom-up: sums of w, sums of w^(-1/(p-1))
    // (p > 1) or running minima (p = 1).
    std::vector<double> sw(w), dual(n);
    const bool p1 = (p == 1.0);
    for (std::size_t i = 0; i < n; ++i)
        dual[i] = p1 ? w[i] : std::pow(w[i], -1.0 / (p - 1.0));

    double sup = 0.0;
    std::size_t count = n;
    auto eval = [&](double sum_w, double sum_dual_or_min, double cells) {
        const double avg_w = sum_w / cells;
        if (p1) return avg_w / sum_dual_or_min;  // second argument is min
        const double avg_dual = sum_dual_or_min / cells;
        return avg_w * std::pow(avg_dual, p - 1.0);
    };
    while (true) {
        const double cells_per = static_cast<double>(n) / static_cast<double>(count);
        for (std::size_t i = 0; i < count; ++i) sup = std::max(sup, eval(sw[i], dual[i], cells_per));
        if (include_shifted) {
            // Half-shifted interval of size 2 blocks = adjacent pair (j, j+1)
            // with j odd, straddling the boundary between two dyadic parents.
            for (std::size_t j = 1; j + 1 < count; j += 2) {
                const double s = sw[j] + sw[j + 1];
                const double d = p1 ? std::min(dual[j], dual[j + 1]) : dual[j] + dual[j + 1];
                sup = std::max(sup, eval(s, d, 2.0 * cells_per));
            }
        }
        if (count == 1) break;
        for (std::size_t i = 0; i < count / 2; ++i) {
            sw[i] = sw[2 * i] + sw[2 * i + 1];
            dual[i] = p1 ? std::min(dual[2 * i], dual[2 * i + 1]) : dual[2 * i] + dual[2 * i + 1];
        }
        count /= 2;
        sw.resize(count);
        dual.resize(count);
    }
    return sup;
}

std::vector<double> coarsen(const std::vector<double>& w, int levels) {
    std::vector<double> out = w;
    for (int l = 0; l < levels; ++l) {
        std::vector<double> next(out.size() / 2);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = 0.5 * (out[2 * i] + out[2 * i + 1]);
        out = std::move(next);
    }
    return out;
}

}  // namespace

WeightReport ap_characteristic(const Weight& w, double p, bool include_shifted) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must be finite and >= 1");
    WeightReport rep;
    rep.p = p;
    rep.depth = w.grid.J;
    rep.trace.resize(static_cast<std::size_t>(w.grid.J) + 1);
    for (int d = 0; d <= w.grid.J; ++d) {
        const std::vector<double> wd = coarsen(w.values, w.grid.J - d);
        rep.trace[static_cast<std::size_t>(d)] = ap_sup(wd, p, include_shifted);
    }
    rep.characteristic = rep.trace.back();
    return rep;
}

double doubling_constant(const Weight& w) {
    const int J = w.grid.J;
    std::vector<double> prefix(w.values.size() + 1, 0.0);
    for (std::size_t i = 0; i < w.values.size(); ++i) prefix[i + 1] = prefix[i] + w.values[i];
    auto mass = [&](std::int64_t lo, std::int64_t hi) {
        return prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)];
    };
    double sup = 1.0;
    for (int r = 0; r <= J; ++r) {
        for (std::int64_t l = 0; l < (std::int64_t{1} << r); ++l) {
            const DyadicInterval I{r, static_cast<int>(l)};
            auto [dlo, dhi] = dilate_cell_range(I, 2.0, w.grid);
            const double ratio = mass(dlo, dhi) / mass(I.first_cell(J), I.end_cell(J));
            sup = std::max(sup, ratio);
        }
    }
    return sup;
}

WeightTriple theorem3_weight_triple(double w_beta, double v_beta, double p, const Grid& grid) {
    if (!(p > 1.0)) throw std::invalid_argument("p must be > 1");
    const double center = grid.origin + 0.5 * grid.length;
    WeightTriple t;
    t.w = power_weight(w_beta, center, grid);
    t.v = power_weight(v_beta, center, grid);
    std::vector<double> av(static_cast<std::size_t>(grid.cells()));
    for (std::size_t i = 0; i < av.size(); ++i)
        av[i] = std::pow(std::pow(t.w.values[i], p) / t.v.values[i], 1.0 / (p - 1.0));
    t.a = Weight(grid, std::move(av));
    t.w_report = ap_characteristic(t.w, 1.0, /*include_shifted=*/true);
    t.v_report = ap_characteristic(t.v, p, /*include_shifted=*/true);
    t.a_report = ap_characteristic(t.a, std::max(p, 2.0), /*include_shifted=*/true);
    return t;
}

}  // namespace emin
