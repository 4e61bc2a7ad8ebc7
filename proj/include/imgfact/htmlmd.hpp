#pragma once

#include <string>
#include <string_view>

namespace imgfact {

// Readability-style HTML to markdown conversion for the built-in scraper
// fallback: keeps headings, paragraphs, lists, links, images and emphasis,
// drops scripts, styles and navigation chrome, decodes common entities and
// collapses whitespace. Returns "" for pages with no extractable text.
std::string html_to_markdown(std::string_view html);

// Decodes &amp;-style and numeric entities; used by the converter and the
// date heuristics.
std::string decode_entities(std::string_view text);

} // namespace imgfact
