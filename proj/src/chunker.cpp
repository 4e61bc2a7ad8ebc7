#include "imgfact/chunker.hpp"

#include "imgfact/errors.hpp"
#include "imgfact/utf8.hpp"

namespace imgfact {

std::vector<Chunk> chunk_document(const SourceDocument& doc,
                                  std::size_t max_len,
                                  std::size_t context_window) {
    if (max_len == 0)
        throw Error("chunk_document: max_len must be positive");

    std::vector<Chunk> chunks;
    const std::string& text = doc.text;
    std::size_t offset = 0;
    while (offset < text.size()) {
        std::size_t end = utf8::advance(text, offset, max_len);
        Chunk c;
        c.doc_url = doc.url;
        c.index = chunks.size();
        c.text = text.substr(offset, end - offset);
        chunks.push_back(std::move(c));
        offset = end;
    }

    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (i > 0)
            chunks[i].context_before =
                std::string(utf8::suffix(chunks[i - 1].text, context_window));
        if (i + 1 < chunks.size())
            chunks[i].context_after =
                std::string(utf8::prefix(chunks[i + 1].text, context_window));
    }
    return chunks;
}

} // namespace imgfact
