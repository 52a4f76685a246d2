#ifndef DAGFAULT_RNG_HPP_
#define DAGFAULT_RNG_HPP_

#include <cstdint>
#include <vector>

#include "dagfault/types.hpp"

namespace dagfault {

/// xoshiro256** 1.0 (Blackman & Vigna), seeded through splitmix64.
/// Every stochastic component in the library draws from this generator so
/// that runs are reproducible bit-for-bit from a single integer seed,
/// independent of the platform's std::random implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform on [0, 1): 53 high bits scaled by 2^-53.
    double uniform();

    /// Uniform on the closed interval [0, 1].
    double uniform_closed();

    /// Unbiased uniform integer in [0, n). Rejection sampling, n >= 1.
    std::uint64_t below(std::uint64_t n);

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi);

    /// Standard normal via Box-Muller (no cached spare: one draw per call
    /// consumes exactly two uniforms, which keeps the stream position
    /// independent of call history).
    double normal();

    /// Fisher-Yates shuffle, descending.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_[4];
};

/// splitmix64 step; used for seeding and sub-stream derivation.
std::uint64_t splitmix64(std::uint64_t& x);

/// Deterministic sub-seed for a named parallel unit (fold index, candidate
/// index, explained row, ...). Serial and parallel schedules see identical
/// streams because each unit reseeds from (base, stream_id) alone.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream_id);

/// FNV-1a, for deriving stream ids from stage names.
std::uint64_t hash_label(const std::string& label);

}  // namespace dagfault

#endif  // DAGFAULT_RNG_HPP_
