#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace fluidic {

// FNV-1a, 64 bit.
class Fnv1a {
public:
    static constexpr std::uint64_t kOffset = 0xcbf29ce484222325ull;
    static constexpr std::uint64_t kPrime = 0x00000100000001b3ull;

    constexpr Fnv1a() = default;
    constexpr explicit Fnv1a(std::uint64_t start) : h_(start) {}

    constexpr void bytes(const unsigned char* data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= data[i];
            h_ *= kPrime;
        }
    }

    constexpr void text(std::string_view s) {
        for (char c : s) {
            h_ ^= static_cast<unsigned char>(c);
            h_ *= kPrime;
        }
    }

    // Little-endian byte order regardless of host.
    constexpr void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h_ ^= (v >> (8 * i)) & 0xffu;
            h_ *= kPrime;
        }
    }

    constexpr void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }

    constexpr std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = kOffset;
};

inline std::uint64_t fnv1a(std::string_view s) {
    Fnv1a h;
    h.text(s);
    return h.value();
}

std::string to_hex(std::uint64_t v);
bool parse_hex(std::string_view s, std::uint64_t& out);

} // namespace fluidic
