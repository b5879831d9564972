#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace tssid {

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// Per-stage seed: first 8 bytes (big-endian) of SHA-256("<seed>:<stage>").
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage);

}  // namespace tssid
