#pragma once

#include <array>
#include <cstdint>

// Seeded, reproducible random streams. One root seed; every consumer gets
// its own substream derived from (purpose, iteration, member), so the same
// numbers are drawn no matter how work is scheduled across threads.

namespace esmda::rng {

/// xoshiro256++ generator with a private normal cache (Marsaglia polar).
class Stream {
public:
    explicit Stream(std::array<std::uint64_t, 4> state) : s_(state) {}

    std::uint64_t next_u64();

    /// Uniform in [0, 1), 53-bit resolution.
    double next_uniform();

    /// Standard normal deviate.
    double next_normal();

private:
    std::array<std::uint64_t, 4> s_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

enum class Purpose : std::uint64_t {
    prior_sample = 0x70u,
    data_perturbation = 0xd0u,
};

class StreamFactory {
public:
    explicit StreamFactory(std::uint64_t root_seed) : root_(root_seed) {}

    /// Substream for one (purpose, iteration, member) cell. Deterministic
    /// in the root seed and the key; independent streams for distinct keys.
    Stream stream(Purpose purpose, std::uint64_t iteration,
                  std::uint64_t member) const;

    std::uint64_t root_seed() const noexcept { return root_; }

private:
    std::uint64_t root_;
};

} // namespace esmda::rng
