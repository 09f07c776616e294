#include "emin/serialize.hpp"

#include <cstdio>

#include "json.hpp"

namespace emin {

using nlohmann::json;

namespace {

json intervals_json(const std::vector<DyadicInterval>& intervals) {
    json arr = json::array();
    for (const auto& I : intervals) arr.push_back({I.r, I.l});
    return arr;
}

}  // namespace

std::string to_json_text(const CZStop& stop, const Grid& grid) {
    json j;
    j["lambda"] = stop.lambda;
    j["intervals"] = intervals_json(stop.selected);
    j["n_selected"] = stop.selected.size();
    j["saturated"] = stop.saturated_count;
    j["measure_sum"] = stop.measure_sum;
    j["grid"] = {{"J", grid.J}, {"origin", grid.origin}, {"length", grid.length}};
    return j.dump(2) + "\n";
}

std::string to_json_text(const WeightedCZ& cz, const Grid& grid) {
    json j;
    j["lambda"] = cz.lambda;
    j["intervals"] = intervals_json(cz.cubes);
    j["n_selected"] = cz.cubes.size();
    j["saturated"] = cz.saturated_count;
    j["measure_sum"] = cz.measure_sum;
    j["selection_constant"] = cz.selection_constant;
    j["grid"] = {{"J", grid.J}, {"origin", grid.origin}, {"length", grid.length}};
    return j.dump(2) + "\n";
}

std::string to_json_text(const StabilizationReport& rep) {
    json j;
    j["s"] = rep.s;
    j["p"] = rep.p;
    j["t"] = rep.degenerate ? json() : json(rep.t);
    j["degenerate"] = rep.degenerate;
    j["e_f"] = rep.e_f;
    j["e_Tf"] = rep.e_Tf;
    j["norm_f_minus_h"] = rep.norm_f_minus_h;
    j["r1"] = rep.r1;
    j["r2"] = rep.r2;
    j["r3"] = rep.r3;
    j["terms"] = {{"off_dilate", rep.terms.off_dilate},
                  {"witness", rep.terms.witness},
                  {"holder_direct", rep.terms.holder_direct},
                  {"holder_bound", rep.terms.holder_bound}};
    j["dilation"] = rep.dilation;
    j["n_selected"] = rep.n_selected;
    j["saturated"] = rep.saturated;
    j["measure_sum"] = rep.measure_sum;
    j["warnings"] = rep.warnings;
    return j.dump(2) + "\n";
}

std::string to_json_text(const WeightReport& rep) {
    json j;
    j["p"] = rep.p;
    j["characteristic"] = rep.characteristic;
    j["depth"] = rep.depth;
    j["trace"] = rep.trace;
    return j.dump(2) + "\n";
}

std::string coeffs_to_csv(const WaveletCoeffs& coeffs) {
    std::string out = "j,k,value\n";
    char buf[64];
    for (std::size_t k = 0; k < coeffs.coarse.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%d,%zu,%.17g\n", coeffs.basis.coarse_level - 1, k,
                      coeffs.coarse[k]);
        out += buf;
    }
    for (std::size_t b = 0; b < coeffs.details.size(); ++b) {
        const int j = coeffs.level_of(static_cast<int>(b));
        for (std::size_t k = 0; k < coeffs.details[b].size(); ++k) {
            std::snprintf(buf, sizeof(buf), "%d,%zu,%.17g\n", j, k, coeffs.details[b][k]);
            out += buf;
        }
    }
    return out;
}

}  // namespace emin
