#pragma once

// FNV-1a content hashing for provenance manifests and reproducibility
// checks. Not cryptographic.

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace seqforge {

inline std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xCBF29CE484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

inline std::uint64_t fnv1a64(const std::vector<double>& v, std::uint64_t h = 0xCBF29CE484222325ULL) {
    return fnv1a64(v.data(), v.size() * sizeof(double), h);
}

inline std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

std::string file_hash_hex(const std::string& path);

}  // namespace seqforge
