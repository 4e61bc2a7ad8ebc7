#include "imgfact/utf8.hpp"

#include <vector>

namespace imgfact {
namespace utf8 {

std::size_t seq_width(unsigned char lead) {
    if ((lead & 0x80) == 0x00)
        return 1;
    if ((lead & 0xE0) == 0xC0)
        return 2;
    if ((lead & 0xF0) == 0xE0)
        return 3;
    if ((lead & 0xF8) == 0xF0)
        return 4;
    return 1; // continuation or invalid byte
}

std::size_t length(std::string_view text) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < text.size();) {
        std::size_t w = seq_width(static_cast<unsigned char>(text[i]));
        i += w > text.size() - i ? text.size() - i : w;
        ++n;
    }
    return n;
}

std::size_t advance(std::string_view text, std::size_t from, std::size_t n) {
    std::size_t i = from;
    while (n > 0 && i < text.size()) {
        std::size_t w = seq_width(static_cast<unsigned char>(text[i]));
        i += w > text.size() - i ? text.size() - i : w;
        --n;
    }
    return i;
}

std::string_view prefix(std::string_view text, std::size_t n) {
    return text.substr(0, advance(text, 0, n));
}

std::string_view suffix(std::string_view text, std::size_t n) {
    // One pass recording sequence starts, then cut n from the end.
    std::vector<std::size_t> starts;
    starts.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        starts.push_back(i);
        std::size_t w = seq_width(static_cast<unsigned char>(text[i]));
        i += w > text.size() - i ? text.size() - i : w;
    }
    if (n >= starts.size())
        return text;
    return text.substr(starts[starts.size() - n]);
}

} // namespace utf8
} // namespace imgfact
