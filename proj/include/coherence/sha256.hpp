#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace coherence {

/// FIPS 180-4 SHA-256 of a byte buffer, as a lowercase hex string.
std::string sha256_hex(std::span<const unsigned char> bytes);

} // namespace coherence
