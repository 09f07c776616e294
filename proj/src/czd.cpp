#include "emin/czd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emin {

namespace {

// Prefix sums of |f|*q per cell (q a density); avg over I = diff / q-mass.
struct PrefixAverages {
    std::vector<double> num;  // prefix of |f[i]| * q[i]
    std::vector<double> den;  // prefix of q[i]

    PrefixAverages(const Signal& f, const std::vector<double>* q) {
        const std::size_t n = f.values.size();
        num.assign(n + 1, 0.0);
        den.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double qi = q ? (*q)[i] : 1.0;
            num[i + 1] = num[i] + std::abs(f.values[i]) * qi;
            den[i + 1] = den[i] + qi;
        }
    }

    double average(std::int64_t lo, std::int64_t hi) const {
        return (num[static_cast<std::size_t>(hi)] - num[static_cast<std::size_t>(lo)]) /
               (den[static_cast<std::size_t>(hi)] - den[static_cast<std::size_t>(lo)]);
    }

    double mass(std::int64_t lo, std::int64_t hi) const {
        return den[static_cast<std::size_t>(hi)] - den[static_cast<std::size_t>(lo)];
    }
};

struct StopResult {
    std::vector<DyadicInterval> selected;
    int saturated = 0;
    double selection_constant = 1.0;
};

// Depth-first stopping time over q-weighted averages of |f|. An interval is
// selected the first time its average exceeds lambda; its siblings keep
// subdividing. The caller guarantees the root average is <= lambda.
StopResult run_stop(const PrefixAverages& pre, int J, double lambda) {
    StopResult out;
    struct Frame {
        DyadicInterval I;
    };
    std::vector<Frame> stack;
    stack.push_back({DyadicInterval::root()});
    while (!stack.empty()) {
        const DyadicInterval I = stack.back().I;
        stack.pop_back();
        if (I.r == J) continue;  // single cell with average <= lambda: quiet
        // Examine children right-to-left so the left child is processed first.
        const DyadicInterval kids[2] = {I.right_child(), I.left_child()};
        for (const DyadicInterval& child : kids) {
            const std::int64_t lo = child.first_cell(J), hi = child.end_cell(J);
            const double avg = pre.average(lo, hi);
            if (avg > lambda) {
                out.selected.push_back(child);
                if (child.r == J) ++out.saturated;
                const double parent_mass = pre.mass(I.first_cell(J), I.end_cell(J));
                const double child_mass = pre.mass(lo, hi);
                out.selection_constant = std::max(out.selection_constant, parent_mass / child_mass);
            } else {
                stack.push_back({child});
            }
        }
    }
    // DFS pushes right children deeper; restore position order.
    std::sort(out.selected.begin(), out.selected.end(),
              [J](const DyadicInterval& a, const DyadicInterval& b) {
                  return a.first_cell(J) < b.first_cell(J);
              });
    return out;
}

CellMask quiet_mask_of(const std::vector<DyadicInterval>& selected, const Grid& g) {
    CellMask mask(static_cast<std::size_t>(g.cells()), 1);
    for (const auto& I : selected)
        for (std::int64_t i = I.first_cell(g.J); i < I.end_cell(g.J); ++i)
            mask[static_cast<std::size_t>(i)] = 0;
    return mask;
}

}  // namespace

CZStop cz_stop(const Signal& f, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("lambda must be positive");
    PrefixAverages pre(f, nullptr);
    const std::int64_t n = f.grid.cells();
    if (pre.average(0, n) > lambda) throw ThresholdBelowRootAverage();

    StopResult stop = run_stop(pre, f.grid.J, lambda);
    CZStop out;
    out.lambda = lambda;
    out.selected = std::move(stop.selected);
    out.saturated_count = stop.saturated;
    out.quiet_mask = quiet_mask_of(out.selected, f.grid);
    for (const auto& I : out.selected) out.measure_sum += I.measure(f.grid);
    return out;
}

namespace {

// f * chi_{union of selected intervals at scale r}; exact zeros elsewhere.
Signal masked_at_scale(const Signal& f, const std::vector<DyadicInterval>& selected, int r) {
    Signal out = Signal::zeros(f.grid);
    for (const auto& I : selected) {
        if (I.r != r) continue;
        for (std::int64_t i = I.first_cell(f.grid.J); i < I.end_cell(f.grid.J); ++i)
            out[i] = f[i];
    }
    return out;
}

std::vector<int> scales_present(const std::vector<DyadicInterval>& selected) {
    std::vector<int> scales;
    for (const auto& I : selected)
        if (scales.empty() || scales.back() != I.r) {
            if (std::find(scales.begin(), scales.end(), I.r) == scales.end())
                scales.push_back(I.r);
        }
    std::sort(scales.begin(), scales.end());
    return scales;
}

}  // namespace

WaveletCZ wavelet_good_part(const Signal& f, double lambda, const WaveletBasis& basis) {
    require_same_grid(f.grid, basis.grid);
    WaveletCZ out;
    out.stop = cz_stop(f, lambda);

    // Q_r over each occupied scale; grouping by scale keeps the construction
    // O(#scales * N) instead of O(#intervals * N).
    for (int r : scales_present(out.stop.selected)) {
        Signal masked = masked_at_scale(f, out.stop.selected, r);
        WaveletCoeffs c = analyze(masked, basis);
        keep_scale_range(c, std::min(r, basis.finest_level()), basis.finest_level(),
                         /*keep_coarse=*/false);
        out.bad_by_scale.emplace_back(r, synthesize(c));
    }

    // good = f - sum of bad blocks, so the split is an exact partition of f.
    out.good = f;
    for (const auto& [r, bad] : out.bad_by_scale)
        for (std::int64_t i = 0; i < f.size(); ++i) out.good[i] -= bad[i];
    return out;
}

Signal WaveletCZ::bad_total() const {
    Signal total = Signal::zeros(good.grid);
    for (const auto& [r, bad] : bad_by_scale)
        for (std::int64_t i = 0; i < total.size(); ++i) total[i] += bad[i];
    return total;
}

Signal bad_part(const Signal& f, const WaveletBasis& basis, const DyadicInterval& I) {
    require_interval_in_range(I, f.grid);
    Signal masked = Signal::zeros(f.grid);
    for (std::int64_t i = I.first_cell(f.grid.J); i < I.end_cell(f.grid.J); ++i) masked[i] = f[i];
    WaveletCoeffs c = analyze(masked, basis);
    keep_scale_range(c, std::min(I.r, basis.finest_level()), basis.finest_level(),
                     /*keep_coarse=*/false);
    return synthesize(c);
}

Signal project_bad_total(const Signal& f, const WaveletCZ& cz, const WaveletBasis& basis,
                         const ProjectionSpec& spec) {
    Signal total = Signal::zeros(f.grid);
    for (int r : scales_present(cz.stop.selected)) {
        Signal masked = masked_at_scale(f, cz.stop.selected, r);
        WaveletCoeffs c = analyze(masked, basis);
        keep_scale_range(c, std::min(r, basis.finest_level()), basis.finest_level(),
                         /*keep_coarse=*/false);
        mask_coeffs(c, spec);
        Signal piece = synthesize(c);
        for (std::int64_t i = 0; i < total.size(); ++i) total[i] += piece[i];
    }
    if (spec.restriction) {
        const CellMask& mask = *spec.restriction;
        for (std::int64_t i = 0; i < total.size(); ++i)
            if (!mask[static_cast<std::size_t>(i)]) total[i] = 0.0;
    }
    return total;
}

WeightedCZ weighted_cz(const Signal& G, double lambda, const Weight& w, const Weight& a) {
    require_same_grid(G.grid, w.grid);
    require_same_grid(G.grid, a.grid);
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("lambda must be positive");

    // Stopping time on g = G * w / a with respect to the measure a:
    // the a-average of |g| over I is integral(|G| w) / a(I).
    const std::size_t n = G.values.size();
    Signal g = Signal::zeros(G.grid);
    for (std::size_t i = 0; i < n; ++i) g.values[i] = G.values[i] * w.values[i] / a.values[i];
    PrefixAverages pre(g, &a.values);
    if (pre.average(0, G.grid.cells()) > lambda)
        throw ThresholdBelowRootAverage();

    StopResult stop = run_stop(pre, G.grid.J, lambda);
    WeightedCZ out;
    out.lambda = lambda;
    out.cubes = std::move(stop.selected);
    out.saturated_count = stop.saturated;
    out.selection_constant = stop.selection_constant;
    out.quiet_mask = quiet_mask_of(out.cubes, G.grid);
    for (const auto& I : out.cubes) out.measure_sum += I.measure(G.grid);

    // Good part: G off the cubes; (b / b(Q)) * integral(G over Q) on each cube.
    out.good = G;
    for (const auto& Q : out.cubes) {
        const std::int64_t lo = Q.first_cell(G.grid.J), hi = Q.end_cell(G.grid.J);
        double g_int = 0.0, b_int = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            g_int += G[i];
            b_int += a[i] / w[i];
        }
        const double ratio = g_int / b_int;  // cell_width cancels
        for (std::int64_t i = lo; i < hi; ++i) out.good[i] = (a[i] / w[i]) * ratio;
    }
    return out;
}

}  // namespace emin
