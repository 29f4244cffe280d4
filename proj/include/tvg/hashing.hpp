#pragma once

#include <cstdint>
#include <cstring>
#include <string>

namespace tvg {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(const void* bytes, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Per-cell seed for the Monte Carlo harness: base_seed XOR hash(density, repetition).
/// Hashing the cell coordinates keeps parallel execution order irrelevant.
inline std::uint64_t cell_seed(std::uint64_t base_seed, double density, std::uint64_t repetition) {
    std::uint64_t dbits = 0;
    std::memcpy(&dbits, &density, sizeof(dbits));
    return base_seed ^ splitmix64(splitmix64(dbits) ^ splitmix64(repetition + 0x51ed2701ULL));
}

/// Derive an independent stream from a seed and a short tag (e.g. method name).
inline std::uint64_t derive_seed(std::uint64_t seed, const std::string& tag) {
    return splitmix64(seed ^ fnv1a64(tag.data(), tag.size()));
}

inline std::string hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

}  // namespace tvg
