#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mfv {

// FIPS 180-4 SHA-256, used for content addressing and config hashing.
std::string sha256_hex(const void* data, size_t len);
std::string sha256_hex(const std::string& s);
std::string sha256_hex(const std::vector<uint8_t>& v);

}  // namespace mfv
