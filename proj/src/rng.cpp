#include "esmda/rng.hpp"

#include <cmath>

namespace esmda::rng {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

// SplitMix64 finalizer; also used as the substream key mixer.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t Stream::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Stream::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::next_normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * next_uniform() - 1.0;
        v = 2.0 * next_uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    have_spare_ = true;
    return u * factor;
}

Stream StreamFactory::stream(Purpose purpose, std::uint64_t iteration,
                             std::uint64_t member) const {
    std::uint64_t key = mix64(root_);
    key = mix64(key ^ static_cast<std::uint64_t>(purpose));
    key = mix64(key ^ iteration);
    key = mix64(key ^ member);
    // Expand the key into generator state the way the xoshiro authors
    // recommend: consecutive SplitMix64 outputs.
    std::array<std::uint64_t, 4> state;
    std::uint64_t sm = key;
    for (auto& word : state) {
        sm += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = sm;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        word = z ^ (z >> 31);
    }
    return Stream(state);
}

} // namespace esmda::rng
