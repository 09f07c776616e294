#ifndef EMIN_RNG_HPP
#define EMIN_RNG_HPP

#include <cstdint>
#include <random>

namespace emin {

// mt19937_64 output is fixed by the standard; mapping to doubles by hand keeps
// every draw bit-identical across platforms (std distributions are not portable).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    int sign() { return (engine_() & 1) ? 1 : -1; }

    bool chance(double prob) { return uniform01() < prob; }

    std::uint64_t raw() { return engine_(); }

    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        // splitmix64 of seed xor stream; decorrelates per-case substreams.
        std::uint64_t z = seed ^ (stream * 0x9E3779B97F4A7C15ull + 0xBF58476D1CE4E5B9ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace emin

#endif  // EMIN_RNG_HPP
