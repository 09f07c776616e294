#ifndef EMIN_SERIALIZE_HPP
#define EMIN_SERIALIZE_HPP

#include <string>

#include "emin/czd.hpp"
#include "emin/muckenhoupt.hpp"
#include "emin/stabilizer.hpp"
#include "emin/wavelet.hpp"

namespace emin {

// JSON snapshots for reports and decompositions (selected intervals, measured
// constants); signals themselves travel through signal_io.
std::string to_json_text(const CZStop& stop, const Grid& grid);
std::string to_json_text(const WeightedCZ& cz, const Grid& grid);
std::string to_json_text(const StabilizationReport& rep);
std::string to_json_text(const WeightReport& rep);

/// Coefficients as CSV rows "j,k,value" (coarse block uses j = coarse_level-1).
std::string coeffs_to_csv(const WaveletCoeffs& coeffs);

}  // namespace emin

#endif  // EMIN_SERIALIZE_HPP
