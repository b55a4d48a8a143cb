#pragma once

#include <concepts>
#include <cstdint>
#include <limits>
#include <random>

namespace qss {

// Every stochastic operation takes its generator explicitly so sessions replay
// bit-identically. Generators must produce full 64-bit words.
template <class G>
concept BitSource = std::uniform_random_bit_generator<std::remove_reference_t<G>> &&
                    std::remove_reference_t<G>::min() == 0 &&
                    std::remove_reference_t<G>::max() == std::numeric_limits<std::uint64_t>::max();

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Substream seed rule: splitmix64(splitmix64(master ^ splitmix64(stream)) + index).
// Round r of a session uses stream kRoundStream, index r.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                           std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master ^ splitmix64(stream)) + index);
}

inline constexpr std::uint64_t kRoundStream = 1;
inline constexpr std::uint64_t kBootstrapStream = 2;

inline Rng make_stream(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
    return Rng{derive_seed(master, stream, index)};
}

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
template <BitSource G>
double uniform01(G& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

template <BitSource G>
bool coin(G& gen) {
    return (gen() >> 63) != 0;
}

// True with probability p.
template <BitSource G>
bool bernoulli(G& gen, double p) {
    return uniform01(gen) < p;
}

}  // namespace qss
