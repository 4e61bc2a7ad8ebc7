#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace imgfact {

// Standard alphabet, '=' padding.
std::string base64_encode(std::span<const std::uint8_t> data);
std::string base64_encode(const std::string& data);

// Throws FormatError on characters outside the alphabet or bad padding.
std::vector<std::uint8_t> base64_decode(const std::string& text);

} // namespace imgfact
