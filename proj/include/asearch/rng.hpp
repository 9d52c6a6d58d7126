#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace asearch {

using Rng = std::mt19937_64;

// Independent named streams derived from one episode seed. Tags keep the
// streams for truth placement, each agent, and the bus apart.
inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::vector<std::uint32_t> words;
    words.push_back(static_cast<std::uint32_t>(seed));
    words.push_back(static_cast<std::uint32_t>(seed >> 32));
    for (auto t : tags) {
        words.push_back(static_cast<std::uint32_t>(t));
        words.push_back(static_cast<std::uint32_t>(t >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

namespace stream_tag {
inline constexpr std::uint64_t kTruth = 0x7275746855ULL;
inline constexpr std::uint64_t kAgentDecide = 0x646563ULL;
inline constexpr std::uint64_t kAgentSense = 0x73656eULL;
inline constexpr std::uint64_t kBus = 0x627573ULL;
}  // namespace stream_tag

// Stateless 64-bit mixer; used where a draw must depend only on its key.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double unit_from_bits(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace asearch
