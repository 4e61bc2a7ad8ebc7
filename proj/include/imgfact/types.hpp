#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "imgfact/dates.hpp"

namespace imgfact {

struct ClaimImage {
    std::vector<std::uint8_t> bytes;
    std::string media_type; // e.g. "image/jpeg"
    std::string url;        // public URL, used by reverse image search
    std::string path;       // local origin, for diagnostics
};

// The unit of work: one image-text claim to verify.
struct Claim {
    std::string claim_id;
    std::string text;
    std::vector<ClaimImage> images;
    std::string author;
    Date date;
    std::string medium;
};

struct SourceDocument {
    std::string url;  // real-world source identifier, non-empty
    std::string text; // may be empty (failed scrapes in the knowledge store)
};

enum class AnswerType { Boolean, Extractive, Abstractive, Unanswerable };

const char* to_string(AnswerType t);
std::optional<AnswerType> answer_type_from_string(const std::string& s);

enum class Verdict {
    Supported,
    Refuted,
    NotEnoughEvidence,
    ConflictingEvidence,
};

const char* to_string(Verdict v);

// Canonical labels only ("Supported", "Refuted", "Not Enough Evidence",
// "Conflicting Evidence/Cherrypicking"), matched case-insensitively with an
// optional " claim" suffix tolerated because the prompt names the verdicts
// that way in prose.
std::optional<Verdict> verdict_from_string(const std::string& s);

enum class EvidenceFormatMode { AnswerOnly, QuestionPlusAnswer, Declarative };

const char* to_string(EvidenceFormatMode m);
std::optional<EvidenceFormatMode> mode_from_string(const std::string& s);

struct TrainQa {
    std::string question;
    std::string answer;
    AnswerType answer_type = AnswerType::Abstractive;
};

// One train-set claim with its gold annotation, the pool few-shot examples
// are drawn from.
struct TrainExample {
    std::string claim_text;
    Verdict gold_label = Verdict::Refuted;
    std::vector<TrainQa> qa_pairs;
};

} // namespace imgfact
