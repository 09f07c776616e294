#ifndef EMIN_SIGNAL_IO_HPP
#define EMIN_SIGNAL_IO_HPP

#include <string>

#include "emin/grid.hpp"

namespace emin {

// Binary layout: 16-byte header (u32 J, f32 origin, f32 length, u32 reserved),
// then 2^J little-endian float64 cell values.
void write_signal_binary(const Signal& f, const std::string& path);
Signal read_signal_binary(const std::string& path);

// CSV: one value per line; the grid is supplied by the caller.
void write_signal_csv(const Signal& f, const std::string& path);
Signal read_signal_csv(const std::string& path, const Grid& grid);

}  // namespace emin

#endif  // EMIN_SIGNAL_IO_HPP
