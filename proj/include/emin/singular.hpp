#ifndef EMIN_SINGULAR_HPP
#define EMIN_SINGULAR_HPP

#include <functional>
#include <optional>

#include "emin/grid.hpp"
#include "emin/rng.hpp"
#include "emin/wavelet.hpp"

namespace emin {

/// A discrete Calderon-Zygmund operator: either the truncated Hilbert
/// transform (midpoint quadrature, diagonal cell excluded, zero extension
/// outside the root interval) or a wavelet coefficient projection.
struct SingularOperator {
    enum class Kind { HilbertTransform, WaveletProjection };

    Kind kind = Kind::HilbertTransform;
    Grid grid;
    std::optional<WaveletBasis> basis;   // WaveletProjection only
    std::optional<ProjectionSpec> spec;  // WaveletProjection only

    static SingularOperator hilbert(const Grid& grid);
    static SingularOperator wavelet_projection(WaveletBasis basis, ProjectionSpec spec);
};

Signal apply(const SingularOperator& T, const Signal& f);

/// Kernel K(x, y) with a Holder smoothness exponent in the second variable.
struct KernelSpec {
    std::function<double(double, double)> K;
    double alpha = 1.0;

    static KernelSpec hilbert();
};

/// Empirical sup of |K(x,y1)-K(x,y2)| * |x-y1|^(1+alpha) / |y1-y2|^alpha over
/// sampled triples with y1, y2 in a dyadic interval Q and x outside 5Q.
double kernel_holder_constant(const KernelSpec& k, const Grid& grid, int samples,
                              std::uint64_t seed = 1);

/// Tail-to-mass ratio for a mean-free bump: integral of |Tf| w outside the
/// 2-dilate of I, divided by the weighted mass of f. Requires supp f inside I
/// and integral of f equal to zero.
double long_range_regularity(const SingularOperator& T, const Signal& f, const DyadicInterval& I,
                             const Weight& w);

}  // namespace emin

#endif  // EMIN_SINGULAR_HPP
