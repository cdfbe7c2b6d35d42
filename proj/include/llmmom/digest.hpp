#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace llmmom {

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// First 8 bytes of SHA-256(data), big-endian.
std::uint64_t sha256_prefix64(std::string_view data);

}  // namespace llmmom
