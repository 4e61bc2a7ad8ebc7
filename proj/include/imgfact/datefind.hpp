#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "imgfact/dates.hpp"

namespace imgfact {

// Best-effort publication date from a page URL and its raw HTML, in
// decreasing order of trust: explicit meta tags and JSON-LD, <time>
// elements, date segments in the URL path, then visible text patterns.
// Absent result means no plausible signal was found.
std::optional<Date> find_publication_date(std::string_view url,
                                          std::string_view raw_page);

} // namespace imgfact
