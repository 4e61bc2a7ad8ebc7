#include "imgfact/prompt.hpp"

#include <fstream>
#include <sstream>

#include "imgfact/base64.hpp"
#include "imgfact/errors.hpp"
#include "imgfact/utf8.hpp"

namespace imgfact {

std::vector<SourceBlock>
assign_source_ids(const std::vector<ScoredChunk>& text_sources,
                  const std::vector<ImageSourceSet>& image_sets) {
    if (text_sources.size() > 9)
        throw TooManySources("got " + std::to_string(text_sources.size()) +
                             " text sources, the ID scheme allows 9");
    std::vector<SourceBlock> blocks;

    int id = 1;
    for (const auto& sc : text_sources) {
        SourceBlock b;
        b.source_id = id++;
        b.kind = SourceBlock::Kind::Text;
        b.url = sc.entry.chunk.doc_url;
        b.body = sc.entry.chunk.text;
        b.context_before = sc.entry.chunk.context_before;
        b.context_after = sc.entry.chunk.context_after;
        blocks.push_back(std::move(b));
    }

    for (const auto& set : image_sets) {
        if (set.sources.size() > 9)
            throw TooManySources("image set " +
                                 std::to_string(set.image_index) + " has " +
                                 std::to_string(set.sources.size()) +
                                 " sources, the ID scheme allows 9");
        int j = 1;
        for (const auto& src : set.sources) {
            SourceBlock b;
            b.source_id = 10 * set.image_index + j++;
            b.kind = SourceBlock::Kind::Image;
            b.url = src.ris.url;
            b.body = src.markdown;
            b.title = src.ris.title;
            b.page_date = src.page_date;
            b.image_url = src.ris.thumbnail_url;
            b.image_index = set.image_index;
            blocks.push_back(std::move(b));
        }
    }
    return blocks;
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open prompt template: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    PromptTemplate t;
    t.text_ = buf.str();
    t.name_ = path.filename().string();
    for (const char* token : {"{image_count}", "{author}", "{date}", "{medium}",
                              "{k}", "{sources}", "{fewshot}"})
        if (t.text_.find(token) == std::string::npos)
            throw TemplateError("template " + t.name_ +
                                " lacks placeholder " + token);
    return t;
}

namespace {

void replace_all(std::string& text, const std::string& token,
                 const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
        text.replace(pos, token.size(), value);
        pos += value.size();
    }
}

// Replaces the whole template line holding `token` when the value is empty,
// so degenerate prompts carry no stray blank lines.
void replace_section(std::string& text, const std::string& token,
                     const std::string& value) {
    if (!value.empty()) {
        replace_all(text, token, value);
        return;
    }
    std::size_t pos = text.find(token);
    if (pos == std::string::npos)
        return;
    std::size_t end = pos + token.size();
    if (end < text.size() && text[end] == '\n')
        ++end;
    text.replace(pos, end - pos, "");
}

std::string truncated_body(const std::string& body, std::size_t max_chars) {
    if (max_chars == 0 || utf8::length(body) <= max_chars)
        return body;
    return std::string(utf8::prefix(body, max_chars)) + "\n[truncated]";
}

std::string render_sources(const std::vector<SourceBlock>& blocks,
                           const PromptRenderOptions& opts) {
    std::string out;
    for (const auto& b : blocks) {
        if (!out.empty())
            out += "\n";
        out += "---\n";
        if (b.kind == SourceBlock::Kind::Text) {
            out += "## Source ID: " + std::to_string(b.source_id) + " " +
                   b.url + "\n";
            out += b.context_before + "\n";
            out += truncated_body(b.body, opts.max_source_chars) + "\n";
            out += b.context_after;
        } else {
            out += "## Image Source ID: " + std::to_string(b.source_id) +
                   " (related to user image " + std::to_string(b.image_index) +
                   ", Title : " + b.title + ", date:" +
                   (b.page_date ? b.page_date->iso() : "unknown") +
                   ", url: " + b.url + ", image url: " + b.image_url + ")\n";
            out += truncated_body(b.body, opts.max_source_chars);
        }
    }
    return out;
}

std::string render_fewshot(const std::vector<TrainExample>& fewshot) {
    std::string out;
    for (const auto& ex : fewshot) {
        if (!out.empty())
            out += "\n";
        out += "### Question examples for claim \"" + ex.claim_text +
               "\" (verdict " + to_string(ex.gold_label) + ")\n";
        bool first = true;
        for (const auto& qa : ex.qa_pairs) {
            if (!first)
                out += "\n";
            first = false;
            out += "\"question\": \"" + qa.question + "\", \"answer\": \"" +
                   qa.answer + "\", \"answer_type\": \"" +
                   to_string(qa.answer_type) + "\"";
        }
    }
    return out;
}

} // namespace

std::string render_system_prompt(const PromptTemplate& tmpl, const Claim& claim,
                                 const std::vector<SourceBlock>& blocks,
                                 const std::vector<TrainExample>& fewshot,
                                 const PromptRenderOptions& opts) {
    std::size_t text_count = 0;
    for (const auto& b : blocks)
        if (b.kind == SourceBlock::Kind::Text)
            ++text_count;

    std::string out = tmpl.text();
    replace_all(out, "{image_count}", std::to_string(claim.images.size()));
    replace_all(out, "{author}", claim.author);
    replace_all(out, "{date}", claim.date.iso());
    replace_all(out, "{medium}", claim.medium);
    replace_all(out, "{k}", std::to_string(text_count));
    replace_section(out, "{sources}", render_sources(blocks, opts));
    replace_section(out, "{fewshot}", render_fewshot(fewshot));
    return out;
}

std::vector<LlmUserPart> build_user_message(const Claim& claim) {
    std::vector<LlmUserPart> parts;
    LlmUserPart text;
    text.kind = LlmUserPart::Kind::Text;
    text.text = claim.text;
    parts.push_back(std::move(text));

    for (std::size_t i = 0; i < claim.images.size(); ++i) {
        const ClaimImage& img = claim.images[i];
        if (img.bytes.empty())
            throw ImageEncodeError("claim " + claim.claim_id + " image " +
                                   std::to_string(i + 1) + " has no bytes");
        if (img.media_type.empty())
            throw ImageEncodeError("claim " + claim.claim_id + " image " +
                                   std::to_string(i + 1) +
                                   " has no media type");
        LlmUserPart part;
        part.kind = LlmUserPart::Kind::Image;
        part.image_b64 = base64_encode(img.bytes);
        part.media_type = img.media_type;
        parts.push_back(std::move(part));
    }
    return parts;
}

PromptBundle build_prompt_bundle(const PromptTemplate& tmpl, const Claim& claim,
                                 const std::vector<ScoredChunk>& text_sources,
                                 const std::vector<ImageSourceSet>& image_sets,
                                 const std::vector<TrainExample>& fewshot,
                                 const PromptRenderOptions& opts) {
    PromptBundle bundle;
    bundle.claim_id = claim.claim_id;
    auto blocks = assign_source_ids(text_sources, image_sets);
    bundle.system_prompt =
        render_system_prompt(tmpl, claim, blocks, fewshot, opts);
    bundle.user_parts = build_user_message(claim);
    for (auto& b : blocks)
        bundle.source_table.emplace(b.source_id, std::move(b));
    return bundle;
}

} // namespace imgfact
