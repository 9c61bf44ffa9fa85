#pragma once

#include <cstdint>
#include <random>

namespace intsense {

// Seeded sampling helpers. std:: distributions are not bit-stable across
// standard library implementations, so the few draws we need are done by
// hand: same seed, same bits, everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // uniform in (0, 1]
    double uniform_pos() { return 1.0 - uniform(); }

    double normal();             // standard normal, Box-Muller
    double gamma(double shape);  // Gamma(shape, 1), Marsaglia-Tsang

private:
    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace intsense
