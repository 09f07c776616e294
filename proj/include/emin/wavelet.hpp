#ifndef EMIN_WAVELET_HPP
#define EMIN_WAVELET_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "emin/grid.hpp"
#include "emin/rng.hpp"

namespace emin {

enum class WaveletFamily { Haar, Daubechies4 };

const char* family_name(WaveletFamily f);
WaveletFamily family_from_name(const std::string& name);

/// Orthonormal periodic filter bank on a dyadic grid. Detail levels run from
/// coarse_level to J-1; level j holds 2^j coefficients indexed by translate k.
struct WaveletBasis {
    WaveletFamily family = WaveletFamily::Haar;
    Grid grid;
    int coarse_level = 0;
    std::vector<double> lowpass;
    std::vector<double> highpass;

    int finest_level() const { return grid.J; }
    int detail_levels() const { return grid.J - coarse_level; }

    static WaveletBasis make(WaveletFamily family, const Grid& grid, int coarse_level = 0);
    static WaveletBasis haar(const Grid& grid) { return make(WaveletFamily::Haar, grid); }
    static WaveletBasis daubechies4(const Grid& grid) {
        return make(WaveletFamily::Daubechies4, grid);
    }
};

/// Transform coefficients: coarse scaling block at coarse_level plus one
/// detail block per level. Total count is always 2^J.
struct WaveletCoeffs {
    WaveletBasis basis;
    std::vector<double> coarse;                 // 2^coarse_level entries
    std::vector<std::vector<double>> details;   // details[i] = level coarse_level+i

    int level_of(int block) const { return basis.coarse_level + block; }
    std::int64_t total_count() const;
    double energy() const;  // sum of squares of every coefficient

    static WaveletCoeffs zeros_like(const WaveletBasis& basis);
};

WaveletCoeffs analyze(const Signal& f, const WaveletBasis& basis);
Signal synthesize(const WaveletCoeffs& coeffs);

enum class ScalePart { Below, AtOrAbove };

/// Below keeps the coarse block and details i < j; AtOrAbove keeps details i >= j.
/// The two parts partition the coefficient set, so they sum back to f.
Signal project_scales(const Signal& f, const WaveletBasis& basis, int j, ScalePart part);

/// Per-coefficient signs, +1 by default. Coarse scaling coefficients are never flipped.
struct SignPattern {
    int coarse_level = 0;
    std::vector<std::vector<std::int8_t>> eps;  // aligned with WaveletCoeffs::details

    void set(int j, std::int64_t k, int sign);
    int get(int j, std::int64_t k) const;

    static SignPattern ones(const WaveletBasis& basis);
    static SignPattern random(const WaveletBasis& basis, Rng& rng);
};

/// U_eps: detail coefficient (j,k) is multiplied by eps(j,k); coarse part kept.
Signal apply_sign_multiplier(const Signal& f, const WaveletBasis& basis, const SignPattern& eps);

/// Index subset A of detail coefficients, plus an optional restriction set E of
/// cells; project_span keeps A and the coarse block, then multiplies by chi_E.
struct ProjectionSpec {
    int coarse_level = 0;
    std::vector<std::vector<std::uint8_t>> keep;  // aligned with WaveletCoeffs::details
    std::optional<CellMask> restriction;

    bool keeps(int j, std::int64_t k) const;
    ProjectionSpec complement() const;  // flips kept detail indices; restriction dropped

    static ProjectionSpec full(const WaveletBasis& basis);
    static ProjectionSpec none(const WaveletBasis& basis);
    static ProjectionSpec random(const WaveletBasis& basis, Rng& rng, double keep_prob);
};

Signal project_span(const Signal& f, const WaveletBasis& basis, const ProjectionSpec& spec);

/// Coefficient-level application of a projection: zero details outside A.
/// (The coarse block is kept; the restriction set, if any, applies only after
/// synthesis and is ignored here.)
void mask_coeffs(WaveletCoeffs& coeffs, const ProjectionSpec& spec);

/// Zero detail levels outside the requested scale range [j_lo, j_hi); pass
/// keep_coarse=false to zero the scaling block too.
void keep_scale_range(WaveletCoeffs& coeffs, int j_lo, int j_hi, bool keep_coarse);

/// Integral of |g| outside the factor-dilate of I (dilate clipped to the grid).
double off_support_mass(const Signal& g, const DyadicInterval& I, double dilation);

/// Discrete Psi_{jk}: the signal with detail coefficient (j,k) = 1 and all
/// other coefficients zero.
Signal wavelet_function(const WaveletBasis& basis, int j, std::int64_t k);

}  // namespace emin

#endif  // EMIN_WAVELET_HPP
