#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace xraysim {

/// SHA-256 (FIPS 180-4), hex-encoded. Used for manifest checksums and the
/// resume/determinism machinery.
std::string sha256_hex(const std::uint8_t* data, std::size_t len);
std::string sha256_hex(const std::vector<std::uint8_t>& data);
std::string sha256_file_hex(const std::string& path);

} // namespace xraysim
