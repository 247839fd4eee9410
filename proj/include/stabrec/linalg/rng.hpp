#pragma once

#include <cstdint>

namespace stabrec::linalg {

// Deterministic generator used by the randomized factorizations. Hand-rolled
// (splitmix64 + Box-Muller) so streams do not depend on the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    // Uniform in (0, 1].
    double next_unit();
    // Standard normal.
    double next_gaussian();
    // Uniform integer in [0, n), n > 0.
    std::int64_t next_below(std::int64_t n);

private:
    std::uint64_t state_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

// Combines up to four values into one stream seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0, std::uint64_t d = 0);

}  // namespace stabrec::linalg
