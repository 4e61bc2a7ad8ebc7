#include "imgfact/htmlmd.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <vector>

namespace imgfact {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

struct Tag {
    std::string name;
    bool closing = false;
    bool self_closing = false;
    std::map<std::string, std::string> attrs;
};

// Parses the tag starting at html[pos] (== '<'); returns one-past-'>' or
// npos when the tag never closes.
std::size_t parse_tag(std::string_view html, std::size_t pos, Tag& tag) {
    std::size_t i = pos + 1;
    if (i < html.size() && html[i] == '/') {
        tag.closing = true;
        ++i;
    }
    std::size_t name_start = i;
    while (i < html.size() &&
           (std::isalnum(static_cast<unsigned char>(html[i])) || html[i] == '-'))
        ++i;
    tag.name = lower(html.substr(name_start, i - name_start));

    while (i < html.size() && html[i] != '>') {
        while (i < html.size() &&
               std::isspace(static_cast<unsigned char>(html[i])))
            ++i;
        if (i >= html.size() || html[i] == '>' )
            break;
        if (html[i] == '/') {
            tag.self_closing = true;
            ++i;
            continue;
        }
        std::size_t key_start = i;
        while (i < html.size() && html[i] != '=' && html[i] != '>' &&
               !std::isspace(static_cast<unsigned char>(html[i])))
            ++i;
        std::string key = lower(html.substr(key_start, i - key_start));
        std::string value;
        if (i < html.size() && html[i] == '=') {
            ++i;
            if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
                char quote = html[i++];
                std::size_t val_start = i;
                while (i < html.size() && html[i] != quote)
                    ++i;
                value = std::string(html.substr(val_start, i - val_start));
                if (i < html.size())
                    ++i;
            } else {
                std::size_t val_start = i;
                while (i < html.size() && html[i] != '>' &&
                       !std::isspace(static_cast<unsigned char>(html[i])))
                    ++i;
                value = std::string(html.substr(val_start, i - val_start));
            }
        }
        if (!key.empty())
            tag.attrs[key] = value;
    }
    if (i >= html.size())
        return std::string_view::npos;
    return i + 1;
}

bool is_block(const std::string& t) {
    static const char* kBlocks[] = {"p",       "div",    "section", "article",
                                    "header",  "footer", "table",   "tr",
                                    "blockquote", "figure", "figcaption"};
    return std::find(std::begin(kBlocks), std::end(kBlocks), t) !=
           std::end(kBlocks);
}

bool is_skipped_subtree(const std::string& t) {
    static const char* kSkip[] = {"script", "style", "noscript", "svg",
                                  "iframe", "head",  "nav",      "form",
                                  "template", "aside"};
    return std::find(std::begin(kSkip), std::end(kSkip), t) != std::end(kSkip);
}

} // namespace

std::string decode_entities(std::string_view text) {
    static const std::map<std::string, std::string, std::less<>> kNamed = {
        {"amp", "&"},  {"lt", "<"},    {"gt", ">"},   {"quot", "\""},
        {"apos", "'"}, {"nbsp", " "},  {"mdash", "—"},
        {"ndash", "–"}, {"hellip", "…"}, {"rsquo", "’"},
        {"lsquo", "‘"}, {"rdquo", "”"},  {"ldquo", "“"},
        {"copy", "©"},  {"deg", "°"},
    };
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] != '&') {
            out.push_back(text[i++]);
            continue;
        }
        std::size_t semi = text.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(text[i++]);
            continue;
        }
        std::string_view body = text.substr(i + 1, semi - i - 1);
        if (!body.empty() && body[0] == '#') {
            // numeric entity, decimal or hex, emitted as UTF-8
            long cp = -1;
            try {
                cp = (body.size() > 1 && (body[1] == 'x' || body[1] == 'X'))
                         ? std::stol(std::string(body.substr(2)), nullptr, 16)
                         : std::stol(std::string(body.substr(1)));
            } catch (...) {
            }
            if (cp >= 0 && cp <= 0x10FFFF) {
                char buf[4];
                int n = 0;
                unsigned v = static_cast<unsigned>(cp);
                if (v < 0x80) {
                    buf[n++] = static_cast<char>(v);
                } else if (v < 0x800) {
                    buf[n++] = static_cast<char>(0xC0 | (v >> 6));
                    buf[n++] = static_cast<char>(0x80 | (v & 0x3F));
                } else if (v < 0x10000) {
                    buf[n++] = static_cast<char>(0xE0 | (v >> 12));
                    buf[n++] = static_cast<char>(0x80 | ((v >> 6) & 0x3F));
                    buf[n++] = static_cast<char>(0x80 | (v & 0x3F));
                } else {
                    buf[n++] = static_cast<char>(0xF0 | (v >> 18));
                    buf[n++] = static_cast<char>(0x80 | ((v >> 12) & 0x3F));
                    buf[n++] = static_cast<char>(0x80 | ((v >> 6) & 0x3F));
                    buf[n++] = static_cast<char>(0x80 | (v & 0x3F));
                }
                out.append(buf, static_cast<std::size_t>(n));
                i = semi + 1;
                continue;
            }
        } else if (auto it = kNamed.find(body); it != kNamed.end()) {
            out += it->second;
            i = semi + 1;
            continue;
        }
        out.push_back(text[i++]);
    }
    return out;
}

std::string html_to_markdown(std::string_view html) {
    std::string out;
    std::string title;
    std::string link_href;     // open <a>
    std::string pending_text;  // inline buffer, whitespace-collapsed

    int skip_depth = 0;
    std::string skip_tag;
    bool in_title = false;
    bool in_pre = false;

    auto flush_inline = [&] {
        // trim trailing spaces before a block break
        while (!pending_text.empty() && pending_text.back() == ' ')
            pending_text.pop_back();
        if (!pending_text.empty()) {
            out += pending_text;
            pending_text.clear();
        }
    };
    auto block_break = [&] {
        flush_inline();
        if (!out.empty() && !(out.size() >= 2 && out[out.size() - 1] == '\n' &&
                              out[out.size() - 2] == '\n')) {
            while (!out.empty() && out.back() == ' ')
                out.pop_back();
            if (!out.empty() && out.back() != '\n')
                out.push_back('\n');
            out.push_back('\n');
        }
    };
    auto append_text = [&](std::string_view raw) {
        std::string text = decode_entities(raw);
        if (in_pre) {
            pending_text += text;
            return;
        }
        for (char c : text) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!pending_text.empty() && pending_text.back() != ' ')
                    pending_text.push_back(' ');
                else if (pending_text.empty() && !out.empty() &&
                         out.back() != '\n' && out.back() != ' ')
                    pending_text.push_back(' ');
            } else {
                pending_text.push_back(c);
            }
        }
    };

    for (std::size_t i = 0; i < html.size();) {
        if (html[i] == '<') {
            if (html.compare(i, 4, "<!--") == 0) {
                std::size_t end = html.find("-->", i + 4);
                i = end == std::string_view::npos ? html.size() : end + 3;
                continue;
            }
            if (i + 1 < html.size() &&
                (html[i + 1] == '!' || html[i + 1] == '?')) {
                std::size_t end = html.find('>', i);
                i = end == std::string_view::npos ? html.size() : end + 1;
                continue;
            }
            Tag tag;
            std::size_t next = parse_tag(html, i, tag);
            if (next == std::string_view::npos)
                break;
            i = next;

            if (skip_depth > 0) {
                if (tag.name == skip_tag)
                    skip_depth += tag.closing ? -1 : (tag.self_closing ? 0 : 1);
                continue;
            }
            if (!tag.closing && is_skipped_subtree(tag.name)) {
                if (!tag.self_closing) {
                    skip_depth = 1;
                    skip_tag = tag.name;
                }
                continue;
            }

            if (tag.name == "title") {
                in_title = !tag.closing;
                continue;
            }
            if (tag.name == "br") {
                flush_inline();
                out.push_back('\n');
                continue;
            }
            if (tag.name == "hr") {
                block_break();
                out += "---";
                block_break();
                continue;
            }
            if (tag.name.size() == 2 && tag.name[0] == 'h' &&
                tag.name[1] >= '1' && tag.name[1] <= '6') {
                block_break();
                if (!tag.closing) {
                    out.append(static_cast<std::size_t>(tag.name[1] - '0'),
                               '#');
                    out.push_back(' ');
                }
                continue;
            }
            if (tag.name == "li") {
                block_break();
                if (!tag.closing)
                    out += "- ";
                continue;
            }
            if (tag.name == "pre" || tag.name == "code") {
                if (tag.name == "pre") {
                    block_break();
                    in_pre = !tag.closing;
                }
                continue;
            }
            if (tag.name == "a") {
                if (!tag.closing) {
                    auto it = tag.attrs.find("href");
                    link_href = it != tag.attrs.end() ? it->second : "";
                    if (!link_href.empty() && link_href[0] != '#')
                        pending_text += "[";
                    else
                        link_href.clear();
                } else if (!link_href.empty()) {
                    pending_text += "](" + link_href + ")";
                    link_href.clear();
                }
                continue;
            }
            if (tag.name == "img") {
                auto src = tag.attrs.find("src");
                auto alt = tag.attrs.find("alt");
                if (src != tag.attrs.end() && !src->second.empty()) {
                    pending_text += "![" +
                                    (alt != tag.attrs.end()
                                         ? decode_entities(alt->second)
                                         : std::string{}) +
                                    "](" + src->second + ")";
                }
                continue;
            }
            if (tag.name == "strong" || tag.name == "b") {
                pending_text += "**";
                continue;
            }
            if (tag.name == "em" || tag.name == "i") {
                pending_text += "*";
                continue;
            }
            if (is_block(tag.name) || tag.name == "ul" || tag.name == "ol") {
                block_break();
                continue;
            }
            continue; // unknown tags: drop the tag, keep contents
        }

        std::size_t text_end = html.find('<', i);
        if (text_end == std::string_view::npos)
            text_end = html.size();
        std::string_view raw = html.substr(i, text_end - i);
        if (skip_depth == 0) {
            if (in_title)
                title += decode_entities(raw);
            else
                append_text(raw);
        }
        i = text_end;
    }
    flush_inline();

    // strip leading/trailing blank space
    std::size_t begin = out.find_first_not_of(" \n");
    if (begin == std::string::npos)
        out.clear();
    else
        out = out.substr(begin, out.find_last_not_of(" \n") - begin + 1);

    // collapse the title in as a top heading when the body has content
    auto trim = [](std::string s) {
        std::size_t b = s.find_first_not_of(" \t\n");
        if (b == std::string::npos)
            return std::string{};
        return s.substr(b, s.find_last_not_of(" \t\n") - b + 1);
    };
    title = trim(title);
    if (out.empty())
        return title.empty() ? "" : "# " + title;
    if (!title.empty())
        return "# " + title + "\n\n" + out;
    return out;
}

} // namespace imgfact
