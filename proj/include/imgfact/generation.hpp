#pragma once

#include <optional>
#include <string>
#include <vector>

#include "imgfact/image_retrieval.hpp"
#include "imgfact/prompt.hpp"
#include "imgfact/providers.hpp"
#include "imgfact/types.hpp"

namespace imgfact {

struct QAPair {
    std::string question;
    std::string answer;
    int source_id = 0;
    AnswerType answer_type = AnswerType::Abstractive;
    // the model cited an ID absent from the source table; kept with a warning
    bool unknown_source = false;
    // declarative-mode evidence sentence, when the response carries one
    std::string declarative;
    std::optional<Thumb> thumbnail;
};

struct VeracityLikert {
    int supported = 0;
    int refuted = 0;
    int not_enough_evidence = 0;
    int conflicting = 0;
};

struct LlmUsage {
    long input_tokens = 0;
    long output_tokens = 0;
};

struct VerificationResult {
    std::vector<QAPair> qa_pairs; // <= 10 after parsing
    VeracityLikert likert;        // stored, never used for verdict selection
    Verdict verdict = Verdict::NotEnoughEvidence;
    std::string justification;
    bool declarative_format = false; // response carried evidence fields
    std::vector<std::string> warnings;
    LlmUsage usage;
};

// Transport wrapper: bounded retries on retryable ProviderError, response
// text and usage passed through unmodified.
LlmResponse call_llm(const PromptBundle& bundle, LlmProvider& provider,
                     const RetryPolicy& retry = {});

// Strips optional markdown fences, parses the JSON payload and validates it
// against the prompt's output contract. Throws ParseError for non-JSON and
// SchemaError for domain violations; a cited ID missing from the source
// table or a pair without a source only flags/drops that pair with a
// warning. Excess questions beyond 10 are truncated with a warning.
VerificationResult parse_response(const std::string& raw,
                                  const SourceTable& sources);

// Gives every pair citing an image-kind source the base64 thumbnail of
// exactly that source. Fetch failures downgrade to per-pair warnings.
void attach_thumbnails(VerificationResult& result, const SourceTable& sources,
                       ThumbnailCache& cache, ThumbFetcher& fetcher);

struct EvidenceText {
    std::string text;
    int source_id = 0;
    std::optional<Thumb> thumbnail;
};

// Converts QA pairs to the submission evidence format. Pairs whose
// thumbnail is attached get " [IMG_1]" and carry the image in metadata; the
// tag and the payload always appear together. Declarative mode requires a
// declarative-format response (ModeMismatch otherwise) and passes the
// model's evidence sentences through.
std::vector<EvidenceText> to_submission_evidence(const VerificationResult& result,
                                                 EvidenceFormatMode mode);

} // namespace imgfact
