#include "tssid/hash.hpp"

#include <openssl/sha.h>

#include <array>
#include <cstdio>

namespace tssid {

namespace {

std::array<unsigned char, SHA256_DIGEST_LENGTH> digest(std::string_view data) {
    std::array<unsigned char, SHA256_DIGEST_LENGTH> out{};
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), out.data());
    return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned char c : digest(data)) {
        s += hex[c >> 4];
        s += hex[c & 0xF];
    }
    return s;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage) {
    const auto d = digest(std::to_string(seed) + ":" + std::string(stage));
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | d[static_cast<std::size_t>(i)];
    return v;
}

}  // namespace tssid
