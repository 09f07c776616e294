#ifndef EMIN_GRID_HPP
#define EMIN_GRID_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace emin {

/// A dyadic grid on the root interval [origin, origin + length), split into
/// 2^J equal cells. Everything else in the library lives on one of these.
struct Grid {
    int J = 0;
    double origin = 0.0;
    double length = 1.0;

    std::int64_t cells() const { return std::int64_t{1} << J; }
    double cell_width() const { return length / static_cast<double>(cells()); }
    double cell_left(std::int64_t i) const { return origin + static_cast<double>(i) * cell_width(); }
    double cell_midpoint(std::int64_t i) const {
        return origin + (static_cast<double>(i) + 0.5) * cell_width();
    }

    bool operator==(const Grid&) const = default;

    static Grid unit(int J) { return Grid{J, 0.0, 1.0}; }
};

Grid make_grid(int J, double origin = 0.0, double length = 1.0);

/// Dyadic interval at scale r, translate l: covers cells [l*2^(J-r), (l+1)*2^(J-r)).
/// Scales run from 0 (the root) to J (single finest cells).
struct DyadicInterval {
    int r = 0;
    int l = 0;

    DyadicInterval parent() const { return {r - 1, l / 2}; }
    DyadicInterval left_child() const { return {r + 1, 2 * l}; }
    DyadicInterval right_child() const { return {r + 1, 2 * l + 1}; }

    std::int64_t first_cell(int J) const { return static_cast<std::int64_t>(l) << (J - r); }
    std::int64_t cell_count(int J) const { return std::int64_t{1} << (J - r); }
    std::int64_t end_cell(int J) const { return first_cell(J) + cell_count(J); }

    double measure(const Grid& g) const { return g.length / static_cast<double>(std::int64_t{1} << r); }
    double left(const Grid& g) const { return g.origin + static_cast<double>(l) * measure(g); }

    bool contains(const DyadicInterval& other, int J) const {
        return other.r >= r && other.first_cell(J) >= first_cell(J) && other.end_cell(J) <= end_cell(J);
    }

    bool operator==(const DyadicInterval&) const = default;
    auto operator<=>(const DyadicInterval&) const = default;

    static DyadicInterval root() { return {0, 0}; }
};

bool interval_in_range(const DyadicInterval& I, const Grid& g);
void require_interval_in_range(const DyadicInterval& I, const Grid& g);

/// Piecewise-constant function on the finest cells of a grid (cell averages).
struct Signal {
    Grid grid;
    std::vector<double> values;

    Signal() = default;
    Signal(const Grid& g, std::vector<double> v);

    static Signal zeros(const Grid& g);
    static Signal constant(const Grid& g, double c);

    double& operator[](std::int64_t i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](std::int64_t i) const { return values[static_cast<std::size_t>(i)]; }
    std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }
};

Signal operator+(const Signal& a, const Signal& b);
Signal operator-(const Signal& a, const Signal& b);
Signal operator*(double c, const Signal& f);

/// Strictly positive Signal-shaped array used as a measure density.
struct Weight {
    Grid grid;
    std::vector<double> values;

    Weight() = default;
    Weight(const Grid& g, std::vector<double> v);

    static Weight ones(const Grid& g);

    double operator[](std::int64_t i) const { return values[static_cast<std::size_t>(i)]; }
    std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }
    Signal as_signal() const { return Signal(grid, values); }

    /// w(E) of a cell range: integral of the weight over [first, first+count) cells.
    double cell_mass(std::int64_t first, std::int64_t count) const;
};

void require_same_grid(const Grid& a, const Grid& b);

/// (sum over cells of |f|^p * w * cell_width)^(1/p). Weight defaults to 1.
double lp_norm(const Signal& f, double p, const Weight* w = nullptr);

/// Weighted mean of |f| over I: integral of |f| w over I divided by integral of w.
/// With the default weight this is (1/|I|) * integral of |f|.
double interval_average(const Signal& f, const DyadicInterval& I, const Weight* w = nullptr);

/// Sum of the weight's integral over pairwise disjoint intervals.
double weighted_measure(std::span<const DyadicInterval> intervals, const Weight& w);

/// Integral of f (signed) over an interval.
double integral_over(const Signal& f, const DyadicInterval& I);

/// Plain L2 inner product: sum f*g*cell_width.
double inner_product(const Signal& f, const Signal& g);

/// Cell membership mask (one byte per finest cell).
using CellMask = std::vector<std::uint8_t>;

CellMask mask_from_intervals(std::span<const DyadicInterval> intervals, const Grid& g);

/// Cell range [lo, hi) covered by the concentric `factor`-dilate of I, clipped
/// to the grid. Cells touching the dilate with positive overlap are included.
std::pair<std::int64_t, std::int64_t> dilate_cell_range(const DyadicInterval& I, double factor,
                                                        const Grid& g);

/// Union of dilated intervals as a cell mask.
CellMask dilated_union_mask(std::span<const DyadicInterval> intervals, double factor, const Grid& g);

/// Integral of |f| * w over masked cells (mask value != 0), or over the
/// complement when `complement` is set.
double masked_l1(const Signal& f, const CellMask& mask, const Weight* w = nullptr,
                 bool complement = false);

}  // namespace emin

#endif  // EMIN_GRID_HPP
