#include "emin/signal_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace emin {

namespace {

static_assert(std::endian::native == std::endian::little,
              "signal binary I/O assumes a little-endian host");

struct Header {
    std::uint32_t J;
    float origin;
    float length;
    std::uint32_t reserved;
};
static_assert(sizeof(Header) == 16);

}  // namespace

void write_signal_binary(const Signal& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    Header h{static_cast<std::uint32_t>(f.grid.J), static_cast<float>(f.grid.origin),
             static_cast<float>(f.grid.length), 0};
    out.write(reinterpret_cast<const char*>(&h), sizeof(h));
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path);
}

Signal read_signal_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    Header h{};
    in.read(reinterpret_cast<char*>(&h), sizeof(h));
    if (!in || h.J > 30) throw std::runtime_error("bad signal header: " + path);
    Grid g = make_grid(static_cast<int>(h.J), static_cast<double>(h.origin),
                       static_cast<double>(h.length));
    std::vector<double> v(static_cast<std::size_t>(g.cells()));
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated signal file: " + path);
    return Signal(g, std::move(v));
}

void write_signal_csv(const Signal& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    char buf[64];
    for (double x : f.values) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", x);
        out << buf;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Signal read_signal_csv(const std::string& path, const Grid& grid) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(grid.cells()));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        v.push_back(std::stod(line));
    }
    if (static_cast<std::int64_t>(v.size()) != grid.cells())
        throw std::runtime_error("csv value count does not match 2^J: " + path);
    return Signal(grid, std::move(v));
}

}  // namespace emin
