#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace palimpsest {

// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

// Stable 64-bit string hash (FNV-1a followed by a murmur-style finalizer).
// Identical on every platform and run; never use std::hash for persisted keys.
std::uint64_t stable_hash64(std::string_view bytes,
                            std::uint64_t seed = 0x5bd1e9955bd1e995ULL);

std::string hex64(std::uint64_t v);

}  // namespace palimpsest
