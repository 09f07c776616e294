#include "emin/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "emin/czd.hpp"
#include "emin/efunctional.hpp"
#include "emin/muckenhoupt.hpp"
#include "emin/rng.hpp"
#include "emin/singular.hpp"
#include "emin/stabilizer.hpp"
#include "emin/wavelet.hpp"

namespace emin::harness {

using nlohmann::json;

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

int resolve_workers(const ExperimentConfig& cfg) {
    if (cfg.workers > 0) return cfg.workers;
    if (const char* env = std::getenv("EMIN_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

// Deterministic regardless of worker count: rows land by index.
template <typename Fn>
std::vector<std::vector<double>> parallel_rows(int n, int workers, Fn&& fn) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
    if (n == 0) return rows;
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = fn(i);
        return rows;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    rows[static_cast<std::size_t>(i)] = fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return rows;
}

constexpr std::uint64_t kStreamSignal = 0;
constexpr std::uint64_t kStreamTheorem2 = 1;
constexpr std::uint64_t kStreamTheorem3 = 2;
constexpr std::uint64_t kStreamFact4 = 3;
constexpr std::uint64_t kStreamApprox = 4;
constexpr std::uint64_t kStreamLemma1 = 5;

Rng case_rng(const ExperimentConfig& cfg, std::uint64_t index, std::uint64_t stream) {
    return Rng(Rng::derive(cfg.seed, index * 16 + stream));
}

Grid harness_grid(int J) { return Grid::unit(J); }

WaveletFamily pick_family(const ExperimentConfig& cfg, Rng& rng) {
    if (cfg.family == "haar") return WaveletFamily::Haar;
    if (cfg.family == "db4") return WaveletFamily::Daubechies4;
    return rng.chance(0.5) ? WaveletFamily::Haar : WaveletFamily::Daubechies4;
}

double draw_s_frac(const ExperimentConfig& cfg, Rng& rng) {
    const double lo = cfg.s_grid.min_frac, hi = cfg.s_grid.max_frac;
    return lo * std::pow(hi / lo, rng.uniform01());
}

// Power-weight exponents with every member of the triple in its class:
// w in A_1 needs w_beta in (-1, 0]; v in A_p needs v_beta in (-1, p-1);
// a = (w^p/v)^(1/(p-1)) is a power weight with exponent
// (p*w_beta - v_beta)/(p-1), kept above -0.9 so a stays doubling.
std::pair<double, double> draw_weight_betas(const ExperimentConfig& cfg, Rng& rng, double p) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        const double wb = rng.uniform(cfg.weights.w_beta_lo, cfg.weights.w_beta_hi);
        const double vb = rng.uniform(cfg.weights.v_beta_lo, cfg.weights.v_beta_hi);
        const double ab = (p * wb - vb) / (p - 1.0);
        if (ab > -0.9 && vb < p - 1.0 && vb > -1.0 && wb > -1.0 && wb <= 0.0)
            return {wb, vb};
    }
    return {0.0, 0.0};  // unit weights always qualify
}

struct StabilizeOutcome {
    StabilizationReport rep;
    double s_final = 0.0;
    int escalations = 0;
};

// Small s can push the CZ threshold below the root average on a bounded
// domain; doubling s until the stopping time applies keeps the case usable
// and is recorded in the row.
template <typename RunFn>
StabilizeOutcome stabilize_with_escalation(double s0, RunFn&& run) {
    StabilizeOutcome out;
    double s = s0;
    for (int k = 0; k <= 60; ++k) {
        try {
            out.rep = run(s);
            out.s_final = s;
            out.escalations = k;
            return out;
        } catch (const ThresholdBelowRootAverage&) {
            s *= 2.0;
        }
    }
    throw std::runtime_error("stabilization threshold never became admissible");
}

double p_conjugate_power(double p) { return (p - 1.0) / p; }  // 1/p'

// --- lemma1 ------------------------------------------------------------

const std::vector<std::string> kLemma1Cols = {
    "case", "J", "family", "lambda_mult", "lambda", "n_selected", "saturated", "cz_ok",
    "ratio_p1_5", "ratio_p2", "ratio_p3", "ratio_p4",
    "good_p1_5", "good_p2", "good_p3", "good_p4", "l1_diff_ratio"};

bool cz_exactness_ok(const Signal& f, const CZStop& stop) {
    const int J = f.grid.J;
    // Pairwise disjoint: covered cell count equals the sum of interval sizes.
    std::int64_t covered = 0;
    for (const auto& I : stop.selected) covered += I.cell_count(J);
    std::int64_t quiet = 0;
    for (auto m : stop.quiet_mask) quiet += (m == 0);
    if (covered != quiet) return false;
    // Selection range and maximality at the parent.
    for (const auto& I : stop.selected) {
        const double avg = interval_average(f, I);
        if (!(avg > stop.lambda) || !(avg <= 2.0 * stop.lambda)) return false;
        if (I.r > 0 && interval_average(f, I.parent()) > stop.lambda) return false;
    }
    // Quiet set bound.
    for (std::int64_t i = 0; i < f.size(); ++i)
        if (stop.in_quiet_set(i) && std::abs(f[i]) > stop.lambda) return false;
    // Measure bound.
    if (stop.measure_sum > lp_norm(f, 1.0) / stop.lambda * (1.0 + 1e-12)) return false;
    return true;
}

std::vector<double> lemma1_case(const ExperimentConfig& cfg, int J, int idx) {
    const Grid grid = harness_grid(J);
    const Signal f = make_corpus_signal(grid, cfg.seed, static_cast<std::uint64_t>(idx));
    Rng rng = case_rng(cfg, static_cast<std::uint64_t>(idx), kStreamLemma1);
    const WaveletFamily family = pick_family(cfg, rng);
    const double mults[3] = {1.0, 2.0, 4.0};
    const double mult = mults[rng.below(3)];

    const double root_avg = interval_average(f, DyadicInterval::root());
    const double lambda = mult * root_avg;
    const WaveletBasis basis = WaveletBasis::make(family, grid);
    WaveletCZ cz = wavelet_good_part(f, lambda, basis);

    Signal sum_p = cz.good;  // good - f*chi_F = sum over S of P_r(f_rl)
    for (std::int64_t i = 0; i < f.size(); ++i)
        if (cz.stop.in_quiet_set(i)) sum_p[i] -= f[i];

    const double l1 = lp_norm(f, 1.0);
    auto lemma_ratio = [&](const Signal& g, double p) {
        const double denom = std::pow(lambda, 1.0 - 1.0 / p) * std::pow(l1, 1.0 / p);
        return lp_norm(g, p) / denom;
    };
    const Signal diff = f - cz.good;

    return {static_cast<double>(idx), static_cast<double>(J),
            family == WaveletFamily::Haar ? 0.0 : 1.0, mult, lambda,
            static_cast<double>(cz.stop.selected.size()),
            static_cast<double>(cz.stop.saturated_count),
            cz_exactness_ok(f, cz.stop) ? 1.0 : 0.0,
            lemma_ratio(sum_p, 1.5), lemma_ratio(sum_p, 2.0), lemma_ratio(sum_p, 3.0),
            lemma_ratio(sum_p, 4.0),
            lemma_ratio(cz.good, 1.5), lemma_ratio(cz.good, 2.0), lemma_ratio(cz.good, 3.0),
            lemma_ratio(cz.good, 4.0),
            lp_norm(diff, 1.0) / l1};
}

// --- theorem2 ----------------------------------------------------------

const std::vector<std::string> kTheorem2Cols = {
    "case", "J", "family", "p", "keep_prob", "s", "s_frac", "escalations", "degenerate",
    "t", "norm_fh", "e_f", "e_Tf", "n_selected", "saturated", "measure_sum",
    "r1", "r2", "r3", "off_dilate", "witness", "holder_direct", "holder_bound",
    "off_ratio", "t_identity_err", "holder_identity_err", "measure_ok", "triangle_ok"};

std::vector<double> theorem2_case(const ExperimentConfig& cfg, int J, int idx) {
    const Grid grid = harness_grid(J);
    const Signal f = make_corpus_signal(grid, cfg.seed, static_cast<std::uint64_t>(idx));
    Rng rng = case_rng(cfg, static_cast<std::uint64_t>(idx), kStreamTheorem2);
    const WaveletFamily family = pick_family(cfg, rng);
    const double p = cfg.p_values[rng.below(cfg.p_values.size())];
    const double keep_probs[3] = {0.25, 0.5, 0.75};
    const double keep_prob = keep_probs[rng.below(3)];
    const double s_frac = draw_s_frac(cfg, rng);
    const WaveletBasis basis = WaveletBasis::make(family, grid);
    const ProjectionSpec T = ProjectionSpec::random(basis, rng, keep_prob);

    const double s0 = s_frac * lp_norm(f, p);
    StabilizeOutcome out = stabilize_with_escalation(s0, [&](double s) {
        return stabilize_unweighted(f, s, p, T, basis, cfg.dilation);
    });
    const StabilizationReport& rep = out.rep;

    double t_err = 0.0, holder_err = 0.0, measure_ok = 1.0, triangle_ok = 1.0, off_ratio = 0.0;
    if (!rep.degenerate) {
        const double sp = std::pow(rep.s, p);
        t_err = std::abs(std::pow(rep.t, p - 1.0) * rep.norm_f_minus_h - sp) / sp;
        holder_err = std::abs(rep.s * std::pow(rep.norm_f_minus_h / rep.t, p_conjugate_power(p)) -
                              rep.norm_f_minus_h) /
                     rep.norm_f_minus_h;
        measure_ok = rep.measure_sum <= rep.norm_f_minus_h / rep.t * (1.0 + 1e-12) ? 1.0 : 0.0;
        const double lhs = rep.r3 * (rep.e_f + rep.e_Tf);
        const double rhs = rep.terms.off_dilate + rep.terms.witness + rep.terms.holder_direct;
        triangle_ok = lhs <= rhs + 1e-9 * std::max(1.0, lhs) ? 1.0 : 0.0;
        off_ratio = rep.terms.off_dilate / rep.norm_f_minus_h;
    }

    return {static_cast<double>(idx), static_cast<double>(J),
            family == WaveletFamily::Haar ? 0.0 : 1.0, p, keep_prob,
            out.s_final, s_frac, static_cast<double>(out.escalations),
            rep.degenerate ? 1.0 : 0.0,
            rep.degenerate ? 0.0 : rep.t, rep.norm_f_minus_h, rep.e_f, rep.e_Tf,
            static_cast<double>(rep.n_selected), static_cast<double>(rep.saturated),
            rep.measure_sum, rep.r1, rep.r2, rep.r3,
            rep.terms.off_dilate, rep.terms.witness, rep.terms.holder_direct,
            rep.terms.holder_bound, off_ratio, t_err, holder_err, measure_ok, triangle_ok};
}

// --- theorem3 ----------------------------------------------------------

const std::vector<std::string> kTheorem3Cols = {
    "case", "J", "p", "w_beta", "v_beta", "s", "s_frac", "escalations", "degenerate",
    "t", "norm_fh", "e_f", "e_Tf", "n_selected", "saturated",
    "r1", "r2", "r3", "off_dilate", "witness", "holder_direct", "holder_bound",
    "t_identity_err", "measure_ok", "n_warnings"};

std::vector<double> theorem3_case(const ExperimentConfig& cfg, int J, int idx) {
    const Grid grid = harness_grid(J);
    const Signal f = make_corpus_signal(grid, cfg.seed, static_cast<std::uint64_t>(idx));
    Rng rng = case_rng(cfg, static_cast<std::uint64_t>(idx), kStreamTheorem3);
    const double p = cfg.p_values[rng.below(cfg.p_values.size())];
    const auto [w_beta, v_beta] = draw_weight_betas(cfg, rng, p);
    const double s_frac = draw_s_frac(cfg, rng);

    WeightTriple triple = theorem3_weight_triple(w_beta, v_beta, p, grid);
    const SingularOperator T = SingularOperator::hilbert(grid);
    const double s0 = s_frac * lp_norm(f, p, &triple.v);
    StabilizeOutcome out = stabilize_with_escalation(s0, [&](double s) {
        return stabilize_weighted(f, s, p, T, triple.w, triple.v);
    });
    const StabilizationReport& rep = out.rep;

    double t_err = 0.0, measure_ok = 1.0;
    if (!rep.degenerate) {
        const double sp = std::pow(rep.s, p);
        t_err = std::abs(std::pow(rep.t, p - 1.0) * rep.norm_f_minus_h - sp) / sp;
        measure_ok = rep.measure_sum <= rep.norm_f_minus_h / rep.t * (1.0 + 1e-12) ? 1.0 : 0.0;
    }

    return {static_cast<double>(idx), static_cast<double>(J), p, w_beta, v_beta,
            out.s_final, s_frac, static_cast<double>(out.escalations),
            rep.degenerate ? 1.0 : 0.0,
            rep.degenerate ? 0.0 : rep.t, rep.norm_f_minus_h, rep.e_f, rep.e_Tf,
            static_cast<double>(rep.n_selected), static_cast<double>(rep.saturated),
            rep.r1, rep.r2, rep.r3,
            rep.terms.off_dilate, rep.terms.witness, rep.terms.holder_direct,
            rep.terms.holder_bound, t_err, measure_ok,
            static_cast<double>(rep.warnings.size())};
}

// --- fact3 -------------------------------------------------------------

const std::vector<std::string> kFact3Cols = {"case", "J", "weight_id", "r", "max_ratio",
                                             "argmax_l"};

// The Hilbert image of the scale-r reference bump on an index range wide
// enough to read off every translate: convolution kernels make the translated
// output an exact shift of this one (same sums, same order).
std::vector<double> hilbert_extended(const std::vector<double>& bump, std::int64_t n) {
    std::vector<double> out(static_cast<std::size_t>(2 * n), 0.0);
    const double inv_pi = 1.0 / std::numbers::pi;
    for (std::size_t j = 0; j < bump.size(); ++j) {
        const double c = bump[j] * inv_pi;
        if (c == 0.0) continue;
        for (std::int64_t o = -n; o < n; ++o) {
            const std::int64_t d = o - static_cast<std::int64_t>(j);
            if (d == 0) continue;
            out[static_cast<std::size_t>(o + n)] += c / static_cast<double>(d);
        }
    }
    return out;
}

std::vector<double> fact3_case(const ExperimentConfig& cfg, int J, int idx) {
    (void)cfg;
    const Grid grid = harness_grid(J);
    const int scales = J - 3;  // r in [2, J-2]
    const int weight_id = idx / scales;
    const int r = 2 + idx % scales;
    const Weight w = weight_id == 0
                         ? Weight::ones(grid)
                         : power_weight(-0.25, grid.origin + 0.5 * grid.length, grid);

    const std::int64_t n = grid.cells();
    const std::int64_t m = std::int64_t{1} << (J - r);
    std::vector<double> bump(static_cast<std::size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) bump[static_cast<std::size_t>(i)] = i < m / 2 ? 1.0 : -1.0;
    const std::vector<double> ext = hilbert_extended(bump, n);

    const double cw = grid.cell_width();
    double best = 0.0;
    std::int64_t best_l = 0;
    for (std::int64_t l = 0; l < (std::int64_t{1} << r); ++l) {
        const DyadicInterval I{r, static_cast<int>(l)};
        const std::int64_t shift = I.first_cell(J);
        auto [dlo, dhi] = dilate_cell_range(I, 2.0, grid);
        double tail = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            if (i >= dlo && i < dhi) continue;
            tail += std::abs(ext[static_cast<std::size_t>(i - shift + n)]) * w[i];
        }
        tail *= cw;
        double wmass = 0.0;
        for (std::int64_t i = 0; i < m; ++i) wmass += w[shift + i];
        wmass *= cw;  // |bump| = 1 on its support
        const double ratio = tail / wmass;
        if (ratio > best) {
            best = ratio;
            best_l = l;
        }
    }
    return {static_cast<double>(idx), static_cast<double>(J), static_cast<double>(weight_id),
            static_cast<double>(r), best, static_cast<double>(best_l)};
}

// --- fact4 -------------------------------------------------------------

const std::vector<std::string> kFact4Cols = {
    "case", "J", "p", "w_beta", "v_beta", "lambda_mult", "lambda", "n_cubes", "saturated",
    "selection_constant", "meanzero_rel", "c1_pointwise", "c2_l1w", "l1w_diff_ratio",
    "c4_percube_ok", "c4_aggregate"};

std::vector<double> fact4_case(const ExperimentConfig& cfg, int J, int idx) {
    const Grid grid = harness_grid(J);
    const Signal G = make_corpus_signal(grid, cfg.seed, static_cast<std::uint64_t>(idx));
    Rng rng = case_rng(cfg, static_cast<std::uint64_t>(idx), kStreamFact4);
    const double p = cfg.p_values[rng.below(cfg.p_values.size())];
    const double mults[3] = {1.0, 2.0, 4.0};
    const double mult = mults[rng.below(3)];
    const auto [w_beta, v_beta] = draw_weight_betas(cfg, rng, p);
    WeightTriple triple = theorem3_weight_triple(w_beta, v_beta, p, grid);
    const Weight& w = triple.w;
    const Weight& a = triple.a;

    // Root a-average of |G b^{-1}| = ||G||_{L1(w)} / a(root).
    const double g_l1w = lp_norm(G, 1.0, &w);
    const double a_root = a.cell_mass(0, grid.cells());
    const double lambda = mult * (g_l1w / a_root);
    WeightedCZ cz = weighted_cz(G, lambda, w, a);

    double meanzero_rel = 0.0, c1 = 0.0, percube_ok = 1.0;
    for (const auto& Q : cz.cubes) {
        const std::int64_t lo = Q.first_cell(J), hi = Q.end_cell(J);
        double dsum = 0.0, gabs = 0.0, gw = 0.0, amass = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            dsum += G[i] - cz.good[i];
            gabs += std::abs(G[i]);
            gw += std::abs(G[i]) * w[i];
            amass += a[i];
        }
        meanzero_rel = std::max(meanzero_rel, std::abs(dsum) / std::max(gabs, 1e-300));
        if (amass > gw / lambda * (1.0 + 1e-12)) percube_ok = 0.0;
    }
    for (std::int64_t i = 0; i < G.size(); ++i) {
        const double b = a[i] / w[i];
        c1 = std::max(c1, std::abs(cz.good[i]) / (lambda * b));
    }
    const double good_l1w = lp_norm(cz.good, 1.0, &w);
    const double diff_l1w = lp_norm(G - cz.good, 1.0, &w);
    const CellMask dil = dilated_union_mask(cz.cubes, 2.0, grid);
    double a_dil = 0.0;
    for (std::size_t i = 0; i < dil.size(); ++i)
        if (dil[i]) a_dil += a.values[i];
    a_dil *= grid.cell_width();

    return {static_cast<double>(idx), static_cast<double>(J), p, w_beta, v_beta, mult, lambda,
            static_cast<double>(cz.cubes.size()), static_cast<double>(cz.saturated_count),
            cz.selection_constant, meanzero_rel, c1, good_l1w / g_l1w, diff_l1w / g_l1w,
            percube_ok, a_dil * lambda / g_l1w};
}

// --- approx (corollaries) ----------------------------------------------

const std::vector<std::string> kApproxCols = {
    "case", "J", "family", "p", "n_steps", "n_dropped", "monotone_ok", "final_err",
    "max_zero_leak", "first_s", "last_s"};

std::vector<double> approx_case(const ExperimentConfig& cfg, int J, int idx) {
    const Grid grid = harness_grid(J);
    Rng rng = case_rng(cfg, static_cast<std::uint64_t>(idx), kStreamApprox);
    const WaveletFamily family = pick_family(cfg, rng);
    const double p = cfg.p_values[rng.below(cfg.p_values.size())];
    const WaveletBasis basis = WaveletBasis::make(family, grid);

    // Corpus signal with roughly half the detail coefficients forced to zero.
    const Signal f0 = make_corpus_signal(grid, cfg.seed, static_cast<std::uint64_t>(idx));
    WaveletCoeffs c = analyze(f0, basis);
    std::vector<std::vector<std::uint8_t>> zeroed(c.details.size());
    for (std::size_t b = 0; b < c.details.size(); ++b) {
        zeroed[b].assign(c.details[b].size(), 0);
        for (std::size_t k = 0; k < c.details[b].size(); ++k)
            if (rng.chance(0.5)) {
                c.details[b][k] = 0.0;
                zeroed[b][k] = 1;
            }
    }
    const Signal f = synthesize(c);

    const double norm_p = lp_norm(f, p);
    std::vector<double> s_list;
    for (int k = cfg.s_grid.count - 1; k >= 0; --k) s_list.push_back(norm_p * std::pow(2.0, -k));

    // Drop leading radii whose CZ threshold is inadmissible on this grid.
    int dropped = 0;
    std::vector<ApproxStep> steps;
    const ProjectionSpec dummy = ProjectionSpec::full(basis);
    for (;;) {
        try {
            steps = approx_sequence(f, dummy, basis, s_list, p, ApproxMode::RestrictedSupport);
            break;
        } catch (const ThresholdBelowRootAverage&) {
            s_list.erase(s_list.begin());
            ++dropped;
            if (s_list.empty()) throw;
        }
    }

    double monotone_ok = 1.0;
    for (std::size_t i = 1; i < steps.size(); ++i)
        if (steps[i].err_f > steps[i - 1].err_f * (1.0 + 1e-12) + 1e-14) monotone_ok = 0.0;

    const double scale = std::sqrt(analyze(f, basis).energy());
    double leak = 0.0;
    for (const auto& step : steps) {
        WaveletCoeffs sc = analyze(step.fk, basis);
        for (std::size_t b = 0; b < sc.details.size(); ++b)
            for (std::size_t k = 0; k < sc.details[b].size(); ++k)
                if (zeroed[b][k]) leak = std::max(leak, std::abs(sc.details[b][k]) / scale);
    }

    return {static_cast<double>(idx), static_cast<double>(J),
            family == WaveletFamily::Haar ? 0.0 : 1.0, p,
            static_cast<double>(steps.size()), static_cast<double>(dropped), monotone_ok,
            steps.empty() ? -1.0 : steps.back().err_f, leak,
            steps.empty() ? 0.0 : steps.front().s, steps.empty() ? 0.0 : steps.back().s};
}

}  // namespace

// --- corpus -------------------------------------------------------------

Signal make_corpus_signal(const Grid& grid, std::uint64_t seed, std::uint64_t case_index) {
    Rng rng(Rng::derive(seed, case_index * 16 + kStreamSignal));
    bool use_spikes = rng.chance(0.7);
    bool use_smooth = rng.chance(0.7);
    bool use_noise = rng.chance(0.7);
    if (!use_spikes && !use_smooth && !use_noise) use_smooth = true;

    // Component parameters are always drawn so the stream position does not
    // depend on the flags (or on J; noise comes last).
    const int n_spikes = 1 + static_cast<int>(rng.below(5));
    double spike_pos[5], spike_amp[5];
    for (int i = 0; i < 5; ++i) {
        spike_pos[i] = rng.uniform01();
        spike_amp[i] = rng.sign() * rng.uniform(4.0, 12.0);
    }
    const double smooth_base = rng.uniform(-0.5, 0.5);
    double smooth_amp[3], smooth_phase[3];
    for (int k = 0; k < 3; ++k) {
        smooth_amp[k] = rng.uniform(-1.0, 1.0);
        smooth_phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }

    Signal f = Signal::zeros(grid);
    const std::int64_t n = grid.cells();
    if (use_smooth) {
        for (std::int64_t i = 0; i < n; ++i) {
            const double x = (grid.cell_midpoint(i) - grid.origin) / grid.length;
            double v = smooth_base;
            for (int k = 0; k < 3; ++k)
                v += smooth_amp[k] *
                     std::sin(2.0 * std::numbers::pi * (k + 1) * x + smooth_phase[k]);
            f[i] += v;
        }
    }
    if (use_spikes) {
        for (int i = 0; i < n_spikes; ++i) {
            const std::int64_t cell =
                std::min<std::int64_t>(static_cast<std::int64_t>(spike_pos[i] * n), n - 1);
            f[cell] += spike_amp[i];
        }
    }
    if (use_noise) {
        for (std::int64_t i = 0; i < n; ++i) f[i] += rng.uniform(-0.25, 0.25);
    }
    return f;
}

// --- config -------------------------------------------------------------

void ExperimentConfig::validate() const {
    for (int J : J_values)
        if (J < 3 || J > 20) throw std::invalid_argument("config: J values must be in [3, 20]");
    if (J_values.empty()) throw std::invalid_argument("config: J list must not be empty");
    if (p_values.empty()) throw std::invalid_argument("config: p list must not be empty");
    for (double p : p_values)
        if (!(p > 1.0)) throw std::invalid_argument("config: p values must be > 1");
    if (!(s_grid.min_frac > 0.0) || !(s_grid.max_frac >= s_grid.min_frac))
        throw std::invalid_argument("config: s_grid fractions must satisfy 0 < min <= max");
    if (s_grid.count < 1) throw std::invalid_argument("config: s_grid count must be >= 1");
    if (family != "haar" && family != "db4" && family != "both")
        throw std::invalid_argument("config: family must be haar, db4, or both");
    if (op.kind != "wavelet_projection" && op.kind != "hilbert")
        throw std::invalid_argument("config: operator kind must be wavelet_projection or hilbert");
    if (!(op.keep_prob >= 0.0 && op.keep_prob <= 1.0))
        throw std::invalid_argument("config: keep_prob must be in [0, 1]");
    if (!(dilation >= 1.0)) throw std::invalid_argument("config: dilation must be >= 1");
    if (corpus_size < 0) throw std::invalid_argument("config: corpus size must be >= 0");
    const auto& known = known_experiments();
    for (const auto& e : experiments)
        if (std::find(known.begin(), known.end(), e) == known.end())
            throw std::invalid_argument("config: unknown experiment: " + e);
}

std::string ExperimentConfig::canonical_json() const {
    json j;
    j["seed"] = seed;
    j["J"] = J_values;
    j["p"] = p_values;
    j["s_grid"] = {{"count", s_grid.count},
                   {"min_frac", s_grid.min_frac},
                   {"max_frac", s_grid.max_frac}};
    j["family"] = family;
    j["operator"] = {{"kind", op.kind}, {"keep_prob", op.keep_prob}};
    j["weights"] = {{"w_beta", {weights.w_beta_lo, weights.w_beta_hi}},
                    {"v_beta", {weights.v_beta_lo, weights.v_beta_hi}}};
    j["dilation"] = dilation;
    j["corpus"] = corpus_size;
    j["experiments"] = experiments;
    return j.dump();
}

std::string ExperimentConfig::hash() const {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical_json())));
    return buf;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("J")) cfg.J_values = j["J"].get<std::vector<int>>();
        if (j.contains("p")) cfg.p_values = j["p"].get<std::vector<double>>();
        if (j.contains("s_grid")) {
            const auto& s = j["s_grid"];
            if (s.contains("count")) cfg.s_grid.count = s["count"].get<int>();
            if (s.contains("min_frac")) cfg.s_grid.min_frac = s["min_frac"].get<double>();
            if (s.contains("max_frac")) cfg.s_grid.max_frac = s["max_frac"].get<double>();
        }
        if (j.contains("family")) cfg.family = j["family"].get<std::string>();
        if (j.contains("operator")) {
            const auto& o = j["operator"];
            if (o.contains("kind")) cfg.op.kind = o["kind"].get<std::string>();
            if (o.contains("keep_prob")) cfg.op.keep_prob = o["keep_prob"].get<double>();
        }
        if (j.contains("weights")) {
            const auto& w = j["weights"];
            if (w.contains("w_beta")) {
                cfg.weights.w_beta_lo = w["w_beta"][0].get<double>();
                cfg.weights.w_beta_hi = w["w_beta"][1].get<double>();
            }
            if (w.contains("v_beta")) {
                cfg.weights.v_beta_lo = w["v_beta"][0].get<double>();
                cfg.weights.v_beta_hi = w["v_beta"][1].get<double>();
            }
        }
        if (j.contains("dilation")) cfg.dilation = j["dilation"].get<double>();
        if (j.contains("corpus")) cfg.corpus_size = j["corpus"].get<int>();
        if (j.contains("experiments"))
            cfg.experiments = j["experiments"].get<std::vector<std::string>>();
        if (j.contains("out_prefix")) cfg.out_prefix = j["out_prefix"].get<std::string>();
        if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
        if (j.contains("baselines")) cfg.baselines_path = j["baselines"].get<std::string>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

// --- experiment dispatch -------------------------------------------------

const std::vector<std::string>& known_experiments() {
    static const std::vector<std::string> names = {"lemma1", "theorem2", "theorem3",
                                                   "fact3", "fact4", "approx"};
    return names;
}

int experiment_case_count(const ExperimentConfig& cfg, const std::string& experiment, int J) {
    if (experiment == "fact3") return 2 * (J - 3);
    if (experiment == "approx") return std::min(cfg.corpus_size, 40);
    return cfg.corpus_size;
}

std::vector<std::string> experiment_columns(const std::string& experiment) {
    if (experiment == "lemma1") return kLemma1Cols;
    if (experiment == "theorem2") return kTheorem2Cols;
    if (experiment == "theorem3") return kTheorem3Cols;
    if (experiment == "fact3") return kFact3Cols;
    if (experiment == "fact4") return kFact4Cols;
    if (experiment == "approx") return kApproxCols;
    throw std::invalid_argument("unknown experiment: " + experiment);
}

std::vector<double> run_case(const ExperimentConfig& cfg, const std::string& experiment, int J,
                             int case_index) {
    if (experiment == "lemma1") return lemma1_case(cfg, J, case_index);
    if (experiment == "theorem2") return theorem2_case(cfg, J, case_index);
    if (experiment == "theorem3") return theorem3_case(cfg, J, case_index);
    if (experiment == "fact3") return fact3_case(cfg, J, case_index);
    if (experiment == "fact4") return fact4_case(cfg, J, case_index);
    if (experiment == "approx") return approx_case(cfg, J, case_index);
    throw std::invalid_argument("unknown experiment: " + experiment);
}

Table run_experiment(const ExperimentConfig& cfg, const std::string& experiment, int J) {
    Table t;
    t.columns = experiment_columns(experiment);
    const int n = experiment_case_count(cfg, experiment, J);
    t.rows = parallel_rows(n, resolve_workers(cfg),
                           [&](int i) { return run_case(cfg, experiment, J, i); });
    return t;
}

std::string table_to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out += ',';
        out += t.columns[i];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += fmt(row[i]);
        }
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

double column_max(const Table& t, const std::string& name) {
    const auto it = std::find(t.columns.begin(), t.columns.end(), name);
    if (it == t.columns.end()) throw std::logic_error("no column " + name);
    const std::size_t c = static_cast<std::size_t>(it - t.columns.begin());
    double best = 0.0;
    for (const auto& row : t.rows) best = std::max(best, row[c]);
    return best;
}

double column_min(const Table& t, const std::string& name) {
    const auto it = std::find(t.columns.begin(), t.columns.end(), name);
    if (it == t.columns.end()) throw std::logic_error("no column " + name);
    const std::size_t c = static_cast<std::size_t>(it - t.columns.begin());
    double best = t.rows.empty() ? 1.0 : t.rows.front()[c];
    for (const auto& row : t.rows) best = std::min(best, row[c]);
    return best;
}

double column_max_where(const Table& t, const std::string& name, const std::string& cond_col,
                        double cond_val) {
    const auto it = std::find(t.columns.begin(), t.columns.end(), name);
    const auto ic = std::find(t.columns.begin(), t.columns.end(), cond_col);
    if (it == t.columns.end() || ic == t.columns.end()) throw std::logic_error("no column");
    const std::size_t c = static_cast<std::size_t>(it - t.columns.begin());
    const std::size_t cc = static_cast<std::size_t>(ic - t.columns.begin());
    double best = 0.0;
    for (const auto& row : t.rows)
        if (row[cc] == cond_val) best = std::max(best, row[c]);
    return best;
}

}  // namespace

std::map<std::string, double> summarize(const std::string& experiment, const Table& t) {
    std::map<std::string, double> s;
    if (experiment == "lemma1") {
        double c_l1 = 0.0, c_good = 0.0;
        for (const char* col : {"ratio_p1_5", "ratio_p2", "ratio_p3", "ratio_p4"})
            c_l1 = std::max(c_l1, column_max(t, col));
        for (const char* col : {"good_p1_5", "good_p2", "good_p3", "good_p4"})
            c_good = std::max(c_good, column_max(t, col));
        s["C_L1"] = c_l1;
        s["C_good"] = c_good;
        s["C_l1_diff"] = column_max(t, "l1_diff_ratio");
        s["all_cz_ok"] = column_min(t, "cz_ok");
    } else if (experiment == "theorem2") {
        s["max_r1"] = column_max(t, "r1");
        s["max_r2"] = column_max(t, "r2");
        s["max_r3"] = column_max(t, "r3");
        s["max_off_ratio"] = column_max(t, "off_ratio");
        s["haar_max_off_dilate"] = column_max_where(t, "off_dilate", "family", 0.0);
        s["max_t_identity_err"] = column_max(t, "t_identity_err");
        s["max_holder_identity_err"] = column_max(t, "holder_identity_err");
        s["all_measure_ok"] = column_min(t, "measure_ok");
        s["all_triangle_ok"] = column_min(t, "triangle_ok");
    } else if (experiment == "theorem3") {
        s["max_r1"] = column_max(t, "r1");
        s["max_r2"] = column_max(t, "r2");
        s["max_r3"] = column_max(t, "r3");
        s["max_t_identity_err"] = column_max(t, "t_identity_err");
        s["all_measure_ok"] = column_min(t, "measure_ok");
    } else if (experiment == "fact3") {
        s["C_F3"] = column_max(t, "max_ratio");
        s["C_F3_w1"] = column_max_where(t, "max_ratio", "weight_id", 0.0);
        s["C_F3_power"] = column_max_where(t, "max_ratio", "weight_id", 1.0);
    } else if (experiment == "fact4") {
        s["max_meanzero_rel"] = column_max(t, "meanzero_rel");
        s["C1_pointwise"] = column_max(t, "c1_pointwise");
        s["C2_l1w"] = column_max(t, "c2_l1w");
        s["C_l1w_diff"] = column_max(t, "l1w_diff_ratio");
        s["all_c4_percube"] = column_min(t, "c4_percube_ok");
        s["C4_aggregate"] = column_max(t, "c4_aggregate");
        s["max_selection_constant"] = column_max(t, "selection_constant");
    } else if (experiment == "approx") {
        s["all_monotone"] = column_min(t, "monotone_ok");
        s["max_final_err"] = column_max(t, "final_err");
        s["max_zero_leak"] = column_max(t, "max_zero_leak");
    }
    return s;
}

RunOutput run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    RunOutput out;
    for (int J : cfg.J_values) {
        for (const auto& exp : cfg.experiments) {
            Table t = run_experiment(cfg, exp, J);
            const std::string csv = table_to_csv(t);
            const std::string csv_path =
                cfg.out_prefix + "_" + exp + "_J" + std::to_string(J) + ".csv";
            write_file(csv_path, csv);
            out.csv_files.push_back(csv_path);
            // gnuplot-style mirror of the same rows
            std::string dat = "# ";
            for (std::size_t i = 0; i < t.columns.size(); ++i) {
                if (i) dat += ' ';
                dat += t.columns[i];
            }
            dat += '\n';
            for (const auto& row : t.rows) {
                for (std::size_t i = 0; i < row.size(); ++i) {
                    if (i) dat += ' ';
                    dat += fmt(row[i]);
                }
                dat += '\n';
            }
            write_file(cfg.out_prefix + "_" + exp + "_J" + std::to_string(J) + ".dat", dat);

            for (const auto& [k, v] : summarize(exp, t)) {
                out.constants[exp + ".J" + std::to_string(J) + "." + k] = v;
                const std::string agg = exp + "." + k;
                const bool min_type = k.rfind("all_", 0) == 0;
                auto it = out.constants.find(agg);
                if (it == out.constants.end())
                    out.constants[agg] = v;
                else
                    it->second = min_type ? std::min(it->second, v) : std::max(it->second, v);
            }
        }
    }

    json summary;
    summary["config_hash"] = cfg.hash();
    summary["constants"] = out.constants;
    write_file(cfg.out_prefix + "_summary.json", summary.dump(2) + "\n");

    if (!cfg.baselines_path.empty()) {
        const BaselineStore store = BaselineStore::load(cfg.baselines_path);
        if (store.config_hash != cfg.hash()) {
            out.baselines_ok = false;
            out.baseline_failures.push_back("baseline/config mismatch");
        } else {
            for (const auto& [name, bound] : store.constants) {
                const auto it = out.constants.find(name);
                if (it == out.constants.end()) continue;
                if (it->second > bound) {
                    out.baselines_ok = false;
                    out.baseline_failures.push_back(name + ": " + fmt(it->second) + " > " +
                                                    fmt(bound));
                }
            }
        }
    }
    return out;
}

BaselineStore BaselineStore::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open baselines: " + path);
    json j = json::parse(in);
    BaselineStore s;
    s.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& [k, v] : j.at("constants").items()) s.constants[k] = v.get<double>();
    return s;
}

void BaselineStore::save(const std::string& path) const {
    json j;
    j["config_hash"] = config_hash;
    j["constants"] = constants;
    write_file(path, j.dump(2) + "\n");
}

BaselineStore record_baselines(const ExperimentConfig& cfg, const std::string& out_path,
                               bool force) {
    if (std::filesystem::exists(out_path)) {
        if (!force)
            throw std::runtime_error("refusing to overwrite " + out_path +
                                     " (pass --force to archive and replace)");
        const auto stamp = std::chrono::duration_cast<std::chrono::seconds>(
                               std::chrono::system_clock::now().time_since_epoch())
                               .count();
        std::filesystem::rename(out_path, out_path + "." + std::to_string(stamp) + ".bak");
    }
    ExperimentConfig run_cfg = cfg;
    run_cfg.baselines_path.clear();
    const RunOutput out = run_sweep(run_cfg);
    BaselineStore store;
    store.config_hash = cfg.hash();
    for (const auto& [name, value] : out.constants) {
        // Ratio-style constants only; booleans and counts are criteria, not baselines.
        const auto dot = name.rfind('.');
        const std::string leaf = dot == std::string::npos ? name : name.substr(dot + 1);
        if (leaf.rfind("all_", 0) == 0 || leaf.rfind("n_", 0) == 0) continue;
        store.constants[name] = value * 1.1;
    }
    store.save(out_path);
    return store;
}

std::vector<std::string> replay_row(const ExperimentConfig& cfg, const std::string& experiment,
                                    int J, const std::string& csv_path, int row_index,
                                    double rel_tol) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open csv: " + csv_path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + csv_path);
    for (int i = 0; i <= row_index; ++i)
        if (!std::getline(in, line)) throw std::runtime_error("csv row out of range");

    std::vector<double> stored;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) stored.push_back(std::stod(tok));

    const auto cols = experiment_columns(experiment);
    std::vector<std::string> failures;
    if (stored.size() != cols.size()) {
        failures.push_back("column count mismatch");
        return failures;
    }
    const std::vector<double> fresh = run_case(cfg, experiment, J, row_index);
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const double a = stored[i], b = fresh[i];
        const double err = std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
        if (err > rel_tol)
            failures.push_back(cols[i] + ": stored " + fmt(a) + " vs replayed " + fmt(b));
    }
    return failures;
}

}  // namespace emin::harness
