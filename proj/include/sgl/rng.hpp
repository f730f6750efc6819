#pragma once

#include <cstdint>

namespace sgl {

/**
 * xoshiro256** seeded through splitmix64. All variates below are derived
 * from raw 64-bit outputs with fixed arithmetic, so a seed produces the same
 * stream on every platform (unlike the std:: distributions, whose algorithms
 * are implementation-defined).
 */
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()();

    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Uniform integer on [lo, hi], unbiased (rejection).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    // Standard normal via the Marsaglia polar method.
    double normal();

private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace sgl
