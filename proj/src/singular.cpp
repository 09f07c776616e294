#include "emin/singular.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace emin {

SingularOperator SingularOperator::hilbert(const Grid& grid) {
    SingularOperator op;
    op.kind = Kind::HilbertTransform;
    op.grid = grid;
    return op;
}

SingularOperator SingularOperator::wavelet_projection(WaveletBasis basis, ProjectionSpec spec) {
    SingularOperator op;
    op.kind = Kind::WaveletProjection;
    op.grid = basis.grid;
    op.basis = std::move(basis);
    op.spec = std::move(spec);
    return op;
}

Signal apply(const SingularOperator& T, const Signal& f) {
    require_same_grid(T.grid, f.grid);
    if (T.kind == SingularOperator::Kind::WaveletProjection)
        return project_span(f, *T.basis, *T.spec);

    // (Tf)(x_i) = sum_{j != i} f_j / (pi * (i - j)); the cell width cancels in
    // the convolution-type kernel. Iterating over nonzero inputs keeps the
    // cost at O(N * supp f).
    const std::int64_t n = f.grid.cells();
    Signal out = Signal::zeros(f.grid);
    const double inv_pi = 1.0 / std::numbers::pi;
    for (std::int64_t j = 0; j < n; ++j) {
        const double fj = f[j];
        if (fj == 0.0) continue;
        const double c = fj * inv_pi;
        for (std::int64_t i = 0; i < j; ++i) out[i] += c / static_cast<double>(i - j);
        for (std::int64_t i = j + 1; i < n; ++i) out[i] += c / static_cast<double>(i - j);
    }
    return out;
}

KernelSpec KernelSpec::hilbert() {
    KernelSpec k;
    k.alpha = 1.0;
    k.K = [](double x, double y) { return 1.0 / (std::numbers::pi * (x - y)); };
    return k;
}

double kernel_holder_constant(const KernelSpec& k, const Grid& grid, int samples,
                              std::uint64_t seed) {
    if (samples < 100) throw std::invalid_argument("need at least 100 samples");
    if (!(k.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    Rng rng(seed);
    const std::int64_t n = grid.cells();
    double sup = 0.0;
    int accepted = 0;
    while (accepted < samples) {
        // Random dyadic Q at a scale coarse enough for 5Q to leave room, then
        // y1, y2 in Q and x outside 5Q.
        const int r = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(
                              std::max(1, grid.J - 2))));
        const DyadicInterval Q{r, static_cast<int>(rng.below(std::uint64_t{1} << r))};
        auto [qlo, qhi] = dilate_cell_range(Q, 5.0, grid);
        if (qlo == 0 && qhi == n) continue;  // 5Q swallows the grid at this scale
        const std::int64_t c1 = Q.first_cell(grid.J) +
                                static_cast<std::int64_t>(rng.below(
                                    static_cast<std::uint64_t>(Q.cell_count(grid.J))));
        const std::int64_t c2 = Q.first_cell(grid.J) +
                                static_cast<std::int64_t>(rng.below(
                                    static_cast<std::uint64_t>(Q.cell_count(grid.J))));
        if (c1 == c2) continue;
        const std::int64_t outside = n - (qhi - qlo);
        std::int64_t xi = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(outside)));
        if (xi >= qlo) xi += qhi - qlo;
        const double y1 = grid.cell_midpoint(c1), y2 = grid.cell_midpoint(c2);
        const double x = grid.cell_midpoint(xi);
        const double num = std::abs(k.K(x, y1) - k.K(x, y2));
        const double ratio = num * std::pow(std::abs(x - y1), 1.0 + k.alpha) /
                             std::pow(std::abs(y1 - y2), k.alpha);
        sup = std::max(sup, ratio);
        ++accepted;
    }
    return sup;
}

double long_range_regularity(const SingularOperator& T, const Signal& f, const DyadicInterval& I,
                             const Weight& w) {
    require_same_grid(T.grid, f.grid);
    require_same_grid(f.grid, w.grid);
    require_interval_in_range(I, f.grid);
    const std::int64_t lo = I.first_cell(f.grid.J), hi = I.end_cell(f.grid.J);
    double mass = 0.0, mean = 0.0;
    for (std::int64_t i = 0; i < f.size(); ++i) {
        if ((i < lo || i >= hi) && f[i] != 0.0)
            throw std::invalid_argument("bump support must lie inside the interval");
        mass += std::abs(f[i]);
        mean += f[i];
    }
    mass *= f.grid.cell_width();
    mean *= f.grid.cell_width();
    if (mass == 0.0) throw std::invalid_argument("bump must be nonzero");
    if (std::abs(mean) > 1e-12 * mass) throw std::invalid_argument("bump must have zero mean");

    Signal Tf = apply(T, f);
    auto [dlo, dhi] = dilate_cell_range(I, 2.0, f.grid);
    double tail = 0.0;
    for (std::int64_t i = 0; i < Tf.size(); ++i)
        if (i < dlo || i >= dhi) tail += std::abs(Tf[i]) * w[i];
    tail *= f.grid.cell_width();

    double wmass = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) wmass += std::abs(f[i]) * w[i];
    wmass *= f.grid.cell_width();
    return tail / wmass;
}

}  // namespace emin
