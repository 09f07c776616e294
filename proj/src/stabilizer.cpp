#include "emin/stabilizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "emin/muckenhoupt.hpp"

namespace emin {

double t_parameter(double s, double p, double r1norm) {
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("s must be positive");
    if (!(p > 1.0)) throw std::invalid_argument("p must be > 1");
    if (r1norm == 0.0) throw std::domain_error("already optimal: ||f-h|| = 0");
    if (!(r1norm > 0.0)) throw std::invalid_argument("||f-h|| must be non-negative");
    return std::pow(std::pow(s, p) / r1norm, 1.0 / (p - 1.0));
}

namespace {

// 0/0-guarded ratio: both sides vanishing means the case is degenerate and
// the ratio carries no information.
double guarded_ratio(double num, double den) {
    if (num < 1e-14 && den < 1e-14) return 0.0;
    return num / den;
}

double masked_lp_pth_root(const Signal& f, const CellMask& mask, double p, const Weight* v) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (!mask[i]) continue;
        s += std::pow(std::abs(f.values[i]), p) * (v ? v->values[i] : 1.0);
    }
    return std::pow(s * f.grid.cell_width(), 1.0 / p);
}

double dilated_measure_sum(const std::vector<DyadicInterval>& intervals, double factor,
                           const Grid& g) {
    double total = 0.0;
    for (const auto& I : intervals) {
        auto [lo, hi] = dilate_cell_range(I, factor, g);
        total += static_cast<double>(hi - lo) * g.cell_width();
    }
    return total;
}

}  // namespace

StabilizationReport stabilize_unweighted(const Signal& f, double s, double p,
                                         const ProjectionSpec& T, const WaveletBasis& basis,
                                         double dilation, double slack) {
    require_same_grid(f.grid, basis.grid);
    if (!(s > 0.0)) throw std::invalid_argument("s must be positive");
    const CoupleSpec couple = CoupleSpec::unweighted(p);

    StabilizationReport rep;
    rep.s = s;
    rep.p = p;
    rep.dilation = dilation;

    const Signal Tf = project_span(f, basis, T);
    const EMinimizer hmin = near_minimizer(f, s, couple, slack);
    rep.h = hmin.g;
    rep.e_f = (slack == 1.0) ? hmin.e_value : e_functional(f, s, couple);
    rep.norm_f_minus_h = couple.l1_norm(f - rep.h);

    const EMinimizer vmin = truncate_to_ball(Tf, s, couple);
    rep.witness_v = vmin.g;
    rep.e_Tf = vmin.e_value;

    if (rep.norm_f_minus_h == 0.0) {
        rep.u = rep.h;
        rep.degenerate = true;
        rep.t = std::numeric_limits<double>::infinity();
        rep.r1 = lp_norm(rep.u, p) / s;
        rep.r2 = 0.0;
        rep.r3 = 0.0;
        return rep;
    }

    rep.t = t_parameter(s, p, rep.norm_f_minus_h);
    const Signal fh = f - rep.h;
    WaveletCZ cz = wavelet_good_part(fh, rep.t, basis);
    rep.u = rep.h + cz.good;
    rep.n_selected = static_cast<int>(cz.stop.selected.size());
    rep.saturated = cz.stop.saturated_count;
    rep.measure_sum = cz.stop.measure_sum;

    const Signal Tu = project_span(rep.u, basis, T);
    rep.r1 = guarded_ratio(lp_norm(rep.u, p), s);
    rep.r2 = guarded_ratio(lp_norm(f - rep.u, 1.0), rep.e_f);
    rep.r3 = guarded_ratio(lp_norm(Tf - Tu, 1.0), rep.e_f + rep.e_Tf);

    const CellMask dil = dilated_union_mask(cz.stop.selected, dilation, f.grid);
    // T composed with Q_r at coefficient level: Haar bad parts keep exact
    // zeros off the selected set, so the tail vanishes identically there.
    const Signal Tbad = project_bad_total(fh, cz, basis, T);
    rep.terms.off_dilate = masked_l1(Tbad, dil, nullptr, /*complement=*/true);
    rep.terms.witness = masked_l1(Tf - rep.witness_v, dil);
    rep.terms.holder_direct = masked_l1(Tu - rep.witness_v, dil);
    const double p_conj = p / (p - 1.0);
    rep.terms.holder_bound = lp_norm(Tu - rep.witness_v, p) *
                             std::pow(dilated_measure_sum(cz.stop.selected, dilation, f.grid),
                                      1.0 / p_conj);
    return rep;
}

StabilizationReport stabilize_weighted(const Signal& f, double s, double p,
                                       const SingularOperator& T, const Weight& w,
                                       const Weight& v, double dilation, double slack) {
    require_same_grid(f.grid, w.grid);
    require_same_grid(f.grid, v.grid);
    if (!(s > 0.0)) throw std::invalid_argument("s must be positive");
    if (!(p > 1.0)) throw std::invalid_argument("p must be > 1");

    // a = (w^p / v)^(1/(p-1)); the decomposition runs against (w, a) and the
    // truncation density b = a/w matches the couple's (w/v)^(1/(p-1)).
    std::vector<double> av(w.values.size());
    for (std::size_t i = 0; i < av.size(); ++i)
        av[i] = std::pow(std::pow(w.values[i], p) / v.values[i], 1.0 / (p - 1.0));
    const Weight a(f.grid, std::move(av));
    const CoupleSpec couple = CoupleSpec::weighted(p, w, v);

    StabilizationReport rep;
    rep.s = s;
    rep.p = p;
    rep.dilation = dilation;

    // Admissibility is advisory: every positive weight has a finite
    // characteristic on a fixed grid, so only refinement growth is flagged.
    auto warn_growth = [&rep](const WeightReport& r, const char* name) {
        const std::size_t n = r.trace.size();
        if (n < 4) return;
        const double g1 = r.trace[n - 1] / r.trace[n - 2];
        const double g2 = r.trace[n - 2] / r.trace[n - 3];
        if (g1 >= 1.1 && g2 >= 1.1)
            rep.warnings.push_back(std::string(name) + " characteristic grows under refinement");
    };
    warn_growth(ap_characteristic(w, 1.0), "A1(w)");
    warn_growth(ap_characteristic(v, p), "Ap(v)");
    warn_growth(ap_characteristic(a, std::max(p, 2.0)), "Ainf-proxy(a)");

    const Signal Tf = apply(T, f);
    const EMinimizer hmin = near_minimizer(f, s, couple, slack);
    rep.h = hmin.g;
    rep.e_f = (slack == 1.0) ? hmin.e_value : e_functional(f, s, couple);
    rep.norm_f_minus_h = couple.l1_norm(f - rep.h);

    const EMinimizer gmin = truncate_to_ball(Tf, s, couple);
    rep.witness_v = gmin.g;
    rep.e_Tf = gmin.e_value;

    if (rep.norm_f_minus_h == 0.0) {
        rep.u = rep.h;
        rep.degenerate = true;
        rep.t = std::numeric_limits<double>::infinity();
        rep.r1 = couple.lp_ball_norm(rep.u) / s;
        rep.r2 = 0.0;
        rep.r3 = 0.0;
        return rep;
    }

    rep.t = t_parameter(s, p, rep.norm_f_minus_h);
    const Signal fh = f - rep.h;
    WeightedCZ cz = weighted_cz(fh, rep.t, w, a);
    rep.u = rep.h + cz.good;
    rep.n_selected = static_cast<int>(cz.cubes.size());
    rep.saturated = cz.saturated_count;
    rep.measure_sum = cz.measure_sum;

    const Signal Tu = apply(T, rep.u);
    rep.r1 = guarded_ratio(couple.lp_ball_norm(rep.u), s);
    rep.r2 = guarded_ratio(couple.l1_norm(f - rep.u), rep.e_f);
    rep.r3 = guarded_ratio(couple.l1_norm(Tf - Tu), rep.e_f + rep.e_Tf);

    const CellMask dil = dilated_union_mask(cz.cubes, dilation, f.grid);
    rep.terms.off_dilate = masked_l1(Tf - Tu, dil, &w, /*complement=*/true);
    rep.terms.witness = masked_l1(Tf - rep.witness_v, dil, &w);
    rep.terms.holder_direct = masked_l1(Tu - rep.witness_v, dil, &w);
    double a_mass = 0.0;
    for (std::size_t i = 0; i < dil.size(); ++i)
        if (dil[i]) a_mass += a.values[i];
    a_mass *= f.grid.cell_width();
    rep.terms.holder_bound =
        masked_lp_pth_root(Tu - rep.witness_v, dil, p, &v) * std::pow(a_mass, (p - 1.0) / p);
    return rep;
}

ProjectionSpec nonzero_projection_spec(const Signal& f, const WaveletBasis& basis, double tol) {
    WaveletCoeffs c = analyze(f, basis);
    const double scale = std::sqrt(c.energy());
    ProjectionSpec spec = ProjectionSpec::none(basis);
    for (std::size_t b = 0; b < c.details.size(); ++b)
        for (std::size_t k = 0; k < c.details[b].size(); ++k)
            if (std::abs(c.details[b][k]) > tol * scale) spec.keep[b][k] = 1;
    return spec;
}

std::vector<ApproxStep> approx_sequence(const Signal& f, const ProjectionSpec& T,
                                        const WaveletBasis& basis, std::vector<double> s_list,
                                        double p, ApproxMode mode) {
    for (std::size_t i = 1; i < s_list.size(); ++i)
        if (!(s_list[i] > s_list[i - 1]))
            throw std::invalid_argument("s_list must be strictly increasing");

    const ProjectionSpec spec =
        (mode == ApproxMode::RestrictedSupport) ? nonzero_projection_spec(f, basis) : T;
    const Signal Tf = project_span(f, basis, spec);

    std::vector<ApproxStep> steps;
    steps.reserve(s_list.size());
    for (double s : s_list) {
        StabilizationReport rep = stabilize_unweighted(f, s, p, spec, basis);
        ApproxStep step;
        step.s = s;
        if (mode == ApproxMode::RestrictedSupport) {
            step.fk = project_span(rep.u, basis, spec);
            step.err_f = lp_norm(step.fk - f, 1.0);
            step.err_T = lp_norm(project_span(step.fk, basis, spec) - Tf, 1.0);
        } else {
            step.fk = rep.u;
            step.err_f = lp_norm(step.fk - f, 1.0);
            step.err_T = lp_norm(project_span(step.fk, basis, spec) - Tf, 1.0);
        }
        steps.push_back(std::move(step));
    }
    return steps;
}

}  // namespace emin
