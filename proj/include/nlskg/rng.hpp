#pragma once

#include <cstdint>

namespace nlskg {

// SplitMix64 (Steele/Lea/Flood; same constants as java.util.SplittableRandom).
// Deterministic across platforms, splittable into independent streams, which
// is all the sampling suites need.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [-1, 1)
    double symmetric() { return 2.0 * uniform() - 1.0; }

    // Independent child stream: the label is mixed through the generator so
    // fork(0), fork(1), ... are decorrelated and reproducible.
    SplitMix64 fork(std::uint64_t label) const {
        SplitMix64 g(state_ ^ (0xA3EC647659359ACDull * (label + 1)));
        g.next();
        return g;
    }

  private:
    std::uint64_t state_;
};

}  // namespace nlskg
