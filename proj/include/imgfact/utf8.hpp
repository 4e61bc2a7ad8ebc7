#pragma once

#include <cstddef>
#include <string_view>

namespace imgfact {
namespace utf8 {

// Byte width of the sequence starting with this lead byte. Invalid or
// continuation bytes count as width 1 so that malformed input degrades to
// byte-wise handling instead of being rejected.
std::size_t seq_width(unsigned char lead);

// Number of code points in the string.
std::size_t length(std::string_view text);

// Byte offset after advancing n code points from byte offset `from`.
// Saturates at text.size().
std::size_t advance(std::string_view text, std::size_t from, std::size_t n);

// Longest prefix of at most n code points.
std::string_view prefix(std::string_view text, std::size_t n);

// Longest suffix of at most n code points.
std::string_view suffix(std::string_view text, std::size_t n);

} // namespace utf8
} // namespace imgfact
