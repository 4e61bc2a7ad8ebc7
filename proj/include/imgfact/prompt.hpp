#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "imgfact/image_retrieval.hpp"
#include "imgfact/providers.hpp"
#include "imgfact/retrieval.hpp"
#include "imgfact/types.hpp"

namespace imgfact {

// One prompt source with its assigned numeric ID. Text sources occupy
// 1..9; sources for claim image i occupy 10*i+1 .. 10*i+9.
struct SourceBlock {
    enum class Kind { Text, Image };

    int source_id = 0;
    Kind kind = Kind::Text;
    std::string url;
    std::string body; // chunk text or scraped markdown

    // text kind
    std::string context_before;
    std::string context_after;

    // image kind
    std::string title;
    std::optional<Date> page_date;
    std::string image_url;
    int image_index = 0;
};

using SourceTable = std::map<int, SourceBlock>;

// Numbers text sources 1..n in MMR order and image set i as 10*i+1.. in
// rank order. Throws TooManySources when any group exceeds 9 (an upstream
// bug; retrieval caps both).
std::vector<SourceBlock>
assign_source_ids(const std::vector<ScoredChunk>& text_sources,
                  const std::vector<ImageSourceSet>& image_sets);

// The system prompt skeleton, stored as a versioned asset file with named
// placeholders ({image_count}, {author}, {date}, {medium}, {k}, {sources},
// {fewshot}). Pinned by golden tests; edit only with a version bump.
class PromptTemplate {
public:
    static PromptTemplate load(const std::filesystem::path& path);

    const std::string& text() const { return text_; }
    const std::string& name() const { return name_; }

private:
    std::string text_;
    std::string name_;
};

struct PromptRenderOptions {
    // Source bodies longer than this many code points are cut and marked.
    std::size_t max_source_chars = 6000;
};

// Instantiates the template: claim metadata, numbered source blocks (bodies
// only -- thumbnails never enter the system prompt), then few-shot QA
// examples. Deterministic; byte-identical output for identical input.
std::string render_system_prompt(const PromptTemplate& tmpl, const Claim& claim,
                                 const std::vector<SourceBlock>& blocks,
                                 const std::vector<TrainExample>& fewshot,
                                 const PromptRenderOptions& opts = {});

// Part 0 is the claim text; parts 1..n carry the claim images as standard
// base64 in claim order. Throws ImageEncodeError for images without bytes
// or media type.
std::vector<LlmUserPart> build_user_message(const Claim& claim);

struct PromptBundle {
    std::string claim_id;
    std::string system_prompt;
    std::vector<LlmUserPart> user_parts;
    SourceTable source_table;
};

PromptBundle build_prompt_bundle(const PromptTemplate& tmpl, const Claim& claim,
                                 const std::vector<ScoredChunk>& text_sources,
                                 const std::vector<ImageSourceSet>& image_sets,
                                 const std::vector<TrainExample>& fewshot,
                                 const PromptRenderOptions& opts = {});

} // namespace imgfact
