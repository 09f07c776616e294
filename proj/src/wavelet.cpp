#include "emin/wavelet.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace emin {

const char* family_name(WaveletFamily f) {
    return f == WaveletFamily::Haar ? "haar" : "db4";
}

WaveletFamily family_from_name(const std::string& name) {
    if (name == "haar") return WaveletFamily::Haar;
    if (name == "db4" || name == "daubechies4") return WaveletFamily::Daubechies4;
    throw std::invalid_argument("unknown wavelet family: " + name);
}

WaveletBasis WaveletBasis::make(WaveletFamily family, const Grid& grid, int coarse_level) {
    if (coarse_level < 0 || coarse_level > grid.J)
        throw std::invalid_argument("coarse level out of range");
    WaveletBasis b;
    b.family = family;
    b.grid = grid;
    b.coarse_level = coarse_level;
    const double s2 = std::sqrt(2.0);
    if (family == WaveletFamily::Haar) {
        b.lowpass = {1.0 / s2, 1.0 / s2};
    } else {
        const double s3 = std::sqrt(3.0);
        b.lowpass = {(1.0 + s3) / (4.0 * s2), (3.0 + s3) / (4.0 * s2), (3.0 - s3) / (4.0 * s2),
                     (1.0 - s3) / (4.0 * s2)};
    }
    const std::size_t L = b.lowpass.size();
    b.highpass.resize(L);
    for (std::size_t k = 0; k < L; ++k)
        b.highpass[k] = ((k % 2) ? -1.0 : 1.0) * b.lowpass[L - 1 - k];
    return b;
}

namespace {

// One periodized analysis step: n input scaling coefficients -> n/2 approx + n/2 detail.
void step_forward(const std::vector<double>& in, std::vector<double>& approx,
                  std::vector<double>& detail, const WaveletBasis& b) {
    const std::size_t n = in.size(), half = n / 2, L = b.lowpass.size();
    approx.assign(half, 0.0);
    detail.assign(half, 0.0);
    for (std::size_t i = 0; i < half; ++i) {
        double a = 0.0, d = 0.0;
        for (std::size_t k = 0; k < L; ++k) {
            const double x = in[(2 * i + k) % n];
            a += b.lowpass[k] * x;
            d += b.highpass[k] * x;
        }
        approx[i] = a;
        detail[i] = d;
    }
}

// Transposed step: approx + detail at one level -> scaling coefficients one level finer.
void step_inverse(const std::vector<double>& approx, const std::vector<double>& detail,
                  std::vector<double>& out, const WaveletBasis& b) {
    const std::size_t half = approx.size(), n = 2 * half, L = b.lowpass.size();
    out.assign(n, 0.0);
    for (std::size_t i = 0; i < half; ++i) {
        const double a = approx[i], d = detail[i];
        for (std::size_t k = 0; k < L; ++k)
            out[(2 * i + k) % n] += b.lowpass[k] * a + b.highpass[k] * d;
    }
}

}  // namespace

std::int64_t WaveletCoeffs::total_count() const {
    std::int64_t n = static_cast<std::int64_t>(coarse.size());
    for (const auto& d : details) n += static_cast<std::int64_t>(d.size());
    return n;
}

double WaveletCoeffs::energy() const {
    double s = 0.0;
    for (double c : coarse) s += c * c;
    for (const auto& level : details)
        for (double c : level) s += c * c;
    return s;
}

WaveletCoeffs WaveletCoeffs::zeros_like(const WaveletBasis& basis) {
    WaveletCoeffs c;
    c.basis = basis;
    c.coarse.assign(std::size_t{1} << basis.coarse_level, 0.0);
    c.details.resize(static_cast<std::size_t>(basis.detail_levels()));
    for (int j = basis.coarse_level; j < basis.finest_level(); ++j)
        c.details[static_cast<std::size_t>(j - basis.coarse_level)].assign(std::size_t{1} << j, 0.0);
    return c;
}

WaveletCoeffs analyze(const Signal& f, const WaveletBasis& basis) {
    require_same_grid(f.grid, basis.grid);
    WaveletCoeffs c;
    c.basis = basis;
    c.details.resize(static_cast<std::size_t>(basis.detail_levels()));
    // Scaling coefficients at the finest level are cell values * sqrt(cell_width),
    // so coefficient inner products equal continuum L2 inner products.
    const double scale = std::sqrt(f.grid.cell_width());
    std::vector<double> cur(f.values.size());
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = f.values[i] * scale;
    for (int j = basis.finest_level() - 1; j >= basis.coarse_level; --j) {
        std::vector<double> approx, detail;
        step_forward(cur, approx, detail, basis);
        c.details[static_cast<std::size_t>(j - basis.coarse_level)] = std::move(detail);
        cur = std::move(approx);
    }
    c.coarse = std::move(cur);
    return c;
}

Signal synthesize(const WaveletCoeffs& coeffs) {
    const WaveletBasis& basis = coeffs.basis;
    if (static_cast<int>(coeffs.details.size()) != basis.detail_levels() ||
        static_cast<std::int64_t>(coeffs.coarse.size()) != (std::int64_t{1} << basis.coarse_level))
        throw std::invalid_argument("coefficient shape does not match basis");
    std::vector<double> cur = coeffs.coarse;
    for (int j = basis.coarse_level; j < basis.finest_level(); ++j) {
        const auto& detail = coeffs.details[static_cast<std::size_t>(j - basis.coarse_level)];
        if (detail.size() != cur.size())
            throw std::invalid_argument("coefficient shape does not match basis");
        std::vector<double> out;
        step_inverse(cur, detail, out, basis);
        cur = std::move(out);
    }
    const double scale = 1.0 / std::sqrt(basis.grid.cell_width());
    Signal f = Signal::zeros(basis.grid);
    for (std::size_t i = 0; i < cur.size(); ++i) f.values[i] = cur[i] * scale;
    return f;
}

void keep_scale_range(WaveletCoeffs& coeffs, int j_lo, int j_hi, bool keep_coarse) {
    if (!keep_coarse) coeffs.coarse.assign(coeffs.coarse.size(), 0.0);
    for (std::size_t b = 0; b < coeffs.details.size(); ++b) {
        const int j = coeffs.level_of(static_cast<int>(b));
        if (j < j_lo || j >= j_hi) coeffs.details[b].assign(coeffs.details[b].size(), 0.0);
    }
}

Signal project_scales(const Signal& f, const WaveletBasis& basis, int j, ScalePart part) {
    if (j < basis.coarse_level || j > basis.finest_level())
        throw std::invalid_argument("projection level out of range");
    WaveletCoeffs c = analyze(f, basis);
    if (part == ScalePart::Below)
        keep_scale_range(c, basis.coarse_level, j, /*keep_coarse=*/true);
    else
        keep_scale_range(c, j, basis.finest_level(), /*keep_coarse=*/false);
    return synthesize(c);
}

void SignPattern::set(int j, std::int64_t k, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
    auto& level = eps.at(static_cast<std::size_t>(j - coarse_level));
    level.at(static_cast<std::size_t>(k)) = static_cast<std::int8_t>(sign);
}

int SignPattern::get(int j, std::int64_t k) const {
    return eps.at(static_cast<std::size_t>(j - coarse_level)).at(static_cast<std::size_t>(k));
}

SignPattern SignPattern::ones(const WaveletBasis& basis) {
    SignPattern p;
    p.coarse_level = basis.coarse_level;
    p.eps.resize(static_cast<std::size_t>(basis.detail_levels()));
    for (int j = basis.coarse_level; j < basis.finest_level(); ++j)
        p.eps[static_cast<std::size_t>(j - basis.coarse_level)].assign(std::size_t{1} << j, 1);
    return p;
}

SignPattern SignPattern::random(const WaveletBasis& basis, Rng& rng) {
    SignPattern p = ones(basis);
    for (auto& level : p.eps)
        for (auto& e : level) e = static_cast<std::int8_t>(rng.sign());
    return p;
}

Signal apply_sign_multiplier(const Signal& f, const WaveletBasis& basis, const SignPattern& eps) {
    if (eps.coarse_level != basis.coarse_level ||
        static_cast<int>(eps.eps.size()) != basis.detail_levels())
        throw std::invalid_argument("sign pattern shape does not match basis");
    WaveletCoeffs c = analyze(f, basis);
    for (std::size_t b = 0; b < c.details.size(); ++b) {
        if (eps.eps[b].size() != c.details[b].size())
            throw std::invalid_argument("sign pattern shape does not match basis");
        for (std::size_t k = 0; k < c.details[b].size(); ++k)
            if (eps.eps[b][k] < 0) c.details[b][k] = -c.details[b][k];
    }
    return synthesize(c);
}

bool ProjectionSpec::keeps(int j, std::int64_t k) const {
    return keep.at(static_cast<std::size_t>(j - coarse_level)).at(static_cast<std::size_t>(k)) != 0;
}

ProjectionSpec ProjectionSpec::complement() const {
    ProjectionSpec out = *this;
    out.restriction.reset();
    for (auto& level : out.keep)
        for (auto& b : level) b = b ? 0 : 1;
    return out;
}

ProjectionSpec ProjectionSpec::full(const WaveletBasis& basis) {
    ProjectionSpec s;
    s.coarse_level = basis.coarse_level;
    s.keep.resize(static_cast<std::size_t>(basis.detail_levels()));
    for (int j = basis.coarse_level; j < basis.finest_level(); ++j)
        s.keep[static_cast<std::size_t>(j - basis.coarse_level)].assign(std::size_t{1} << j, 1);
    return s;
}

ProjectionSpec ProjectionSpec::none(const WaveletBasis& basis) {
    ProjectionSpec s = full(basis);
    for (auto& level : s.keep)
        for (auto& b : level) b = 0;
    return s;
}

ProjectionSpec ProjectionSpec::random(const WaveletBasis& basis, Rng& rng, double keep_prob) {
    ProjectionSpec s = full(basis);
    for (auto& level : s.keep)
        for (auto& b : level) b = rng.chance(keep_prob) ? 1 : 0;
    return s;
}

void mask_coeffs(WaveletCoeffs& coeffs, const ProjectionSpec& spec) {
    if (spec.coarse_level != coeffs.basis.coarse_level ||
        spec.keep.size() != coeffs.details.size())
        throw std::invalid_argument("projection spec shape does not match basis");
    for (std::size_t b = 0; b < coeffs.details.size(); ++b) {
        if (spec.keep[b].size() != coeffs.details[b].size())
            throw std::invalid_argument("projection spec shape does not match basis");
        for (std::size_t k = 0; k < coeffs.details[b].size(); ++k)
            if (!spec.keep[b][k]) coeffs.details[b][k] = 0.0;
    }
}

Signal project_span(const Signal& f, const WaveletBasis& basis, const ProjectionSpec& spec) {
    WaveletCoeffs c = analyze(f, basis);
    mask_coeffs(c, spec);
    Signal out = synthesize(c);
    if (spec.restriction) {
        const CellMask& mask = *spec.restriction;
        if (static_cast<std::int64_t>(mask.size()) != basis.grid.cells())
            throw std::invalid_argument("restriction mask length must equal 2^J");
        for (std::size_t i = 0; i < out.values.size(); ++i)
            if (!mask[i]) out.values[i] = 0.0;
    }
    return out;
}

double off_support_mass(const Signal& g, const DyadicInterval& I, double dilation) {
    auto [lo, hi] = dilate_cell_range(I, dilation, g.grid);
    double s = 0.0;
    for (std::int64_t i = 0; i < g.size(); ++i)
        if (i < lo || i >= hi) s += std::abs(g[i]);
    return s * g.grid.cell_width();
}

Signal wavelet_function(const WaveletBasis& basis, int j, std::int64_t k) {
    WaveletCoeffs c = WaveletCoeffs::zeros_like(basis);
    c.details.at(static_cast<std::size_t>(j - basis.coarse_level))
        .at(static_cast<std::size_t>(k)) = 1.0;
    return synthesize(c);
}

}  // namespace emin
