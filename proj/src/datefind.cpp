#include "imgfact/datefind.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>

namespace imgfact {

namespace {

constexpr int kMinYear = 1995;
constexpr int kMaxYear = 2035;

std::optional<Date> checked(int y, int m, int d) {
    Date date{y, m, d};
    if (y < kMinYear || y > kMaxYear || !date.valid())
        return std::nullopt;
    return date;
}

// ISO-like date anywhere in the string: YYYY-MM-DD or YYYY/MM/DD.
std::optional<Date> find_iso_like(std::string_view text) {
    static const std::regex re(R"((\d{4})[-/](\d{1,2})[-/](\d{1,2}))");
    std::cmatch m;
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (std::regex_search(begin, end, m, re)) {
        auto d = checked(std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]));
        if (d)
            return d;
        begin = m[0].second;
    }
    return std::nullopt;
}

int month_from_name(std::string name) {
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    static const std::array<const char*, 12> kMonths = {
        "jan", "feb", "mar", "apr", "may", "jun",
        "jul", "aug", "sep", "oct", "nov", "dec"};
    for (int i = 0; i < 12; ++i)
        if (name.rfind(kMonths[static_cast<std::size_t>(i)], 0) == 0)
            return i + 1;
    return 0;
}

// "March 4, 2021" / "4 March 2021" style dates in visible text.
std::optional<Date> find_textual(std::string_view text) {
    static const std::regex re_mdy(
        R"(([A-Za-z]{3,9})\.?\s+(\d{1,2})(?:st|nd|rd|th)?,?\s+(\d{4}))");
    static const std::regex re_dmy(
        R"((\d{1,2})(?:st|nd|rd|th)?\s+([A-Za-z]{3,9})\.?,?\s+(\d{4}))");
    std::cmatch m;
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (std::regex_search(begin, end, m, re_mdy)) {
        int month = month_from_name(m[1]);
        if (month) {
            auto d = checked(std::stoi(m[3]), month, std::stoi(m[2]));
            if (d)
                return d;
        }
        begin = m[0].second;
    }
    begin = text.data();
    while (std::regex_search(begin, end, m, re_dmy)) {
        int month = month_from_name(m[2]);
        if (month) {
            auto d = checked(std::stoi(m[3]), month, std::stoi(m[1]));
            if (d)
                return d;
        }
        begin = m[0].second;
    }
    return std::nullopt;
}

// content inside attributes of tags that match `tag_re`
std::optional<Date> from_attr_dates(std::string_view html,
                                    const std::regex& tag_re) {
    std::cmatch m;
    const char* begin = html.data();
    const char* end = begin + html.size();
    while (std::regex_search(begin, end, m, tag_re)) {
        std::string content = m[1];
        if (auto d = find_iso_like(content))
            return d;
        if (auto d = find_textual(content))
            return d;
        begin = m[0].second;
    }
    return std::nullopt;
}

} // namespace

std::optional<Date> find_publication_date(std::string_view url,
                                          std::string_view raw_page) {
    // 1. meta tags carrying a publication timestamp
    static const std::regex re_meta(
        R"(<meta[^>]*(?:property|name|itemprop)\s*=\s*["'](?:article:published_time|og:published_time|datePublished|date|dc\.date(?:\.issued)?|dcterms\.date|publish-date|publication[_-]date|sailthru\.date|parsely-pub-date|pubdate)["'][^>]*content\s*=\s*["']([^"']+)["'])",
        std::regex::icase);
    // meta with content before the name attribute
    static const std::regex re_meta_rev(
        R"(<meta[^>]*content\s*=\s*["']([^"']+)["'][^>]*(?:property|name|itemprop)\s*=\s*["'](?:article:published_time|og:published_time|datePublished|date|dc\.date(?:\.issued)?|dcterms\.date|publish-date|publication[_-]date|sailthru\.date|parsely-pub-date|pubdate)["'])",
        std::regex::icase);
    if (auto d = from_attr_dates(raw_page, re_meta))
        return d;
    if (auto d = from_attr_dates(raw_page, re_meta_rev))
        return d;

    // 2. JSON-LD "datePublished": "..."
    static const std::regex re_jsonld(
        R"re("datePublished"\s*:\s*"([^"]+)")re", std::regex::icase);
    if (auto d = from_attr_dates(raw_page, re_jsonld))
        return d;

    // 3. <time datetime="...">
    static const std::regex re_time(
        R"(<time[^>]*datetime\s*=\s*["']([^"']+)["'])", std::regex::icase);
    if (auto d = from_attr_dates(raw_page, re_time))
        return d;

    // 4. date segments in the URL path, e.g. /2021/03/04/ or /2021-03-04
    static const std::regex re_url(R"((\d{4})[/-](\d{1,2})[/-](\d{1,2}))");
    std::cmatch m;
    const char* begin = url.data();
    const char* end = begin + url.size();
    while (std::regex_search(begin, end, m, re_url)) {
        if (auto d = checked(std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3])))
            return d;
        begin = m[0].second;
    }

    // 5. visible text, last resort
    if (auto d = find_textual(raw_page))
        return d;
    if (auto d = find_iso_like(raw_page))
        return d;
    return std::nullopt;
}

} // namespace imgfact
