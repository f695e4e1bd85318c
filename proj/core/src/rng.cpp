#include "hawkes/rng.hpp"

#include <array>

namespace hawkes {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) noexcept {
    // mix64 is a bijection, so for a fixed seed distinct stream ids never collide.
    return mix64(mix64(seed) ^ stream_id);
}

Rng seed_split(std::uint64_t seed, std::uint64_t stream_id) {
    const std::uint64_t base = derive_seed(seed, stream_id);
    std::array<std::uint32_t, 8> words{};
    std::uint64_t state = base;
    for (std::size_t i = 0; i < words.size(); i += 2) {
        state = mix64(state);
        words[i] = static_cast<std::uint32_t>(state);
        words[i + 1] = static_cast<std::uint32_t>(state >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

}  // namespace hawkes
