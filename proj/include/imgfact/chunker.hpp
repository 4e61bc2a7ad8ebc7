#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "imgfact/types.hpp"

namespace imgfact {

// A fixed-width segment of a source document. Concatenating the texts of a
// document's chunks in index order reproduces the document exactly; the
// context fields replicate the tail/head of the neighbouring chunks.
struct Chunk {
    std::string doc_url;
    std::size_t index = 0;
    std::string text;
    std::string context_before;
    std::string context_after;

    bool operator==(const Chunk&) const = default;
};

// Splits at fixed offsets of `max_len` Unicode code points; never cuts a
// code point in half. Empty documents produce no chunks.
std::vector<Chunk> chunk_document(const SourceDocument& doc,
                                  std::size_t max_len = 2048,
                                  std::size_t context_window = 256);

} // namespace imgfact
