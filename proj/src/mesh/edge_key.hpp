#pragma once

#include <algorithm>
#include <cstdint>

namespace cortex::detail {

inline std::uint64_t edge_key(int a, int b) {
    const auto lo = static_cast<std::uint64_t>(static_cast<std::uint32_t>(std::min(a, b)));
    const auto hi = static_cast<std::uint64_t>(static_cast<std::uint32_t>(std::max(a, b)));
    return (lo << 32) | hi;
}

inline int edge_lo(std::uint64_t key) { return static_cast<int>(key >> 32); }
inline int edge_hi(std::uint64_t key) { return static_cast<int>(key & 0xffffffffu); }

}  // namespace cortex::detail
