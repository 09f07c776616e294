#include "emin/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace emin {

Grid make_grid(int J, double origin, double length) {
    if (J < 0 || J > 30) throw std::invalid_argument("grid level J must be in [0, 30]");
    if (!(length > 0.0) || !std::isfinite(length) || !std::isfinite(origin))
        throw std::invalid_argument("grid length must be positive and finite");
    return Grid{J, origin, length};
}

bool interval_in_range(const DyadicInterval& I, const Grid& g) {
    return I.r >= 0 && I.r <= g.J && I.l >= 0 &&
           static_cast<std::int64_t>(I.l) < (std::int64_t{1} << I.r);
}

void require_interval_in_range(const DyadicInterval& I, const Grid& g) {
    if (!interval_in_range(I, g)) throw std::invalid_argument("dyadic interval out of range");
}

Signal::Signal(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (static_cast<std::int64_t>(values.size()) != g.cells())
        throw std::invalid_argument("signal length must equal 2^J");
    for (double x : values)
        if (!std::isfinite(x)) throw std::invalid_argument("signal values must be finite");
}

Signal Signal::zeros(const Grid& g) {
    Signal f;
    f.grid = g;
    f.values.assign(static_cast<std::size_t>(g.cells()), 0.0);
    return f;
}

Signal Signal::constant(const Grid& g, double c) {
    Signal f = zeros(g);
    for (double& x : f.values) x = c;
    return f;
}

Signal operator+(const Signal& a, const Signal& b) {
    require_same_grid(a.grid, b.grid);
    Signal out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
    return out;
}

Signal operator-(const Signal& a, const Signal& b) {
    require_same_grid(a.grid, b.grid);
    Signal out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
    return out;
}

Signal operator*(double c, const Signal& f) {
    Signal out = f;
    for (double& x : out.values) x *= c;
    return out;
}

Weight::Weight(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (static_cast<std::int64_t>(values.size()) != g.cells())
        throw std::invalid_argument("weight length must equal 2^J");
    for (double x : values)
        if (!(x > 0.0) || !std::isfinite(x))
            throw std::invalid_argument("weight values must be positive and finite");
}

Weight Weight::ones(const Grid& g) {
    Weight w;
    w.grid = g;
    w.values.assign(static_cast<std::size_t>(g.cells()), 1.0);
    return w;
}

double Weight::cell_mass(std::int64_t first, std::int64_t count) const {
    double s = 0.0;
    for (std::int64_t i = first; i < first + count; ++i) s += values[static_cast<std::size_t>(i)];
    return s * grid.cell_width();
}

void require_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) throw std::invalid_argument("grid mismatch");
}

double lp_norm(const Signal& f, double p, const Weight* w) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must be finite and >= 1");
    if (w) require_same_grid(f.grid, w->grid);
    const double cw = f.grid.cell_width();
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double a = std::abs(f.values[i]);
        const double ww = w ? w->values[i] : 1.0;
        s += (p == 1.0 ? a : std::pow(a, p)) * ww;
    }
    s *= cw;
    return p == 1.0 ? s : std::pow(s, 1.0 / p);
}

double interval_average(const Signal& f, const DyadicInterval& I, const Weight* w) {
    require_interval_in_range(I, f.grid);
    if (w) require_same_grid(f.grid, w->grid);
    const std::int64_t lo = I.first_cell(f.grid.J), hi = I.end_cell(f.grid.J);
    double num = 0.0, den = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) {
        const double ww = w ? (*w)[i] : 1.0;
        num += std::abs(f[i]) * ww;
        den += ww;
    }
    return num / den;
}

double weighted_measure(std::span<const DyadicInterval> intervals, const Weight& w) {
    // Disjointness check at cell level.
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(w.grid.cells()), 0);
    double total = 0.0;
    for (const auto& I : intervals) {
        require_interval_in_range(I, w.grid);
        const std::int64_t lo = I.first_cell(w.grid.J), hi = I.end_cell(w.grid.J);
        for (std::int64_t i = lo; i < hi; ++i) {
            if (seen[static_cast<std::size_t>(i)])
                throw std::invalid_argument("overlapping intervals");
            seen[static_cast<std::size_t>(i)] = 1;
        }
        total += w.cell_mass(lo, hi - lo);
    }
    return total;
}

double integral_over(const Signal& f, const DyadicInterval& I) {
    require_interval_in_range(I, f.grid);
    const std::int64_t lo = I.first_cell(f.grid.J), hi = I.end_cell(f.grid.J);
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += f[i];
    return s * f.grid.cell_width();
}

double inner_product(const Signal& f, const Signal& g) {
    require_same_grid(f.grid, g.grid);
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * g.values[i];
    return s * f.grid.cell_width();
}

CellMask mask_from_intervals(std::span<const DyadicInterval> intervals, const Grid& g) {
    CellMask mask(static_cast<std::size_t>(g.cells()), 0);
    for (const auto& I : intervals) {
        require_interval_in_range(I, g);
        for (std::int64_t i = I.first_cell(g.J); i < I.end_cell(g.J); ++i)
            mask[static_cast<std::size_t>(i)] = 1;
    }
    return mask;
}

std::pair<std::int64_t, std::int64_t> dilate_cell_range(const DyadicInterval& I, double factor,
                                                        const Grid& g) {
    require_interval_in_range(I, g);
    if (!(factor >= 1.0)) throw std::invalid_argument("dilation factor must be >= 1");
    const double lo_cells = static_cast<double>(I.first_cell(g.J));
    const double hi_cells = static_cast<double>(I.end_cell(g.J));
    const double center = 0.5 * (lo_cells + hi_cells);
    const double half = 0.5 * (hi_cells - lo_cells) * factor;
    // A cell [k, k+1) is kept when it overlaps the open dilate
    // (center-half, center+half) with positive measure.
    std::int64_t lo = static_cast<std::int64_t>(std::floor(center - half));
    std::int64_t hi = static_cast<std::int64_t>(std::ceil(center + half));
    lo = std::max<std::int64_t>(lo, 0);
    hi = std::min<std::int64_t>(hi, g.cells());
    return {lo, hi};
}

CellMask dilated_union_mask(std::span<const DyadicInterval> intervals, double factor,
                            const Grid& g) {
    CellMask mask(static_cast<std::size_t>(g.cells()), 0);
    for (const auto& I : intervals) {
        auto [lo, hi] = dilate_cell_range(I, factor, g);
        for (std::int64_t i = lo; i < hi; ++i) mask[static_cast<std::size_t>(i)] = 1;
    }
    return mask;
}

double masked_l1(const Signal& f, const CellMask& mask, const Weight* w, bool complement) {
    if (static_cast<std::int64_t>(mask.size()) != f.grid.cells())
        throw std::invalid_argument("mask length must equal 2^J");
    if (w) require_same_grid(f.grid, w->grid);
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const bool in = mask[i] != 0;
        if (in == complement) continue;
        s += std::abs(f.values[i]) * (w ? w->values[i] : 1.0);
    }
    return s * f.grid.cell_width();
}

}  // namespace emin
