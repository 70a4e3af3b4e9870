#pragma once

#include <cmath>
#include <cstdint>

namespace ontoscope {

// Counter-splittable SplitMix64 stream. Every draw is fully specified in
// terms of integer arithmetic, so identical seeds give bit-identical
// sequences on any platform; this is what makes CLI outputs reproducible.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller. Consumes exactly two uniforms and
    // discards the second variate; no hidden cache state.
    double next_gaussian() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Independent child stream for a given counter. Derivation mixes the
    // counter through the output function so sibling streams do not overlap.
    Rng split(std::uint64_t counter) const {
        Rng mixer(state_ ^ (0xD1B54A32D192ED03ULL * (counter + 1)));
        return Rng(mixer.next_u64());
    }

   private:
    std::uint64_t state_;
};

}  // namespace ontoscope
