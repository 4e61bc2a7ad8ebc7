#include "imgfact/types.hpp"

#include <algorithm>
#include <cctype>

namespace imgfact {

static std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

const char* to_string(AnswerType t) {
    switch (t) {
    case AnswerType::Boolean:
        return "Boolean";
    case AnswerType::Extractive:
        return "Extractive";
    case AnswerType::Abstractive:
        return "Abstractive";
    case AnswerType::Unanswerable:
        return "Unanswerable";
    }
    return "Abstractive";
}

std::optional<AnswerType> answer_type_from_string(const std::string& s) {
    std::string l = lower(s);
    if (l == "boolean")
        return AnswerType::Boolean;
    if (l == "extractive")
        return AnswerType::Extractive;
    if (l == "abstractive")
        return AnswerType::Abstractive;
    if (l == "unanswerable")
        return AnswerType::Unanswerable;
    return std::nullopt;
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Supported:
        return "Supported";
    case Verdict::Refuted:
        return "Refuted";
    case Verdict::NotEnoughEvidence:
        return "Not Enough Evidence";
    case Verdict::ConflictingEvidence:
        return "Conflicting Evidence/Cherrypicking";
    }
    return "Refuted";
}

std::optional<Verdict> verdict_from_string(const std::string& s) {
    std::string l = lower(s);
    // Trim whitespace and the prose " claim" suffix used by the prompt.
    while (!l.empty() && std::isspace(static_cast<unsigned char>(l.back())))
        l.pop_back();
    std::size_t start = 0;
    while (start < l.size() && std::isspace(static_cast<unsigned char>(l[start])))
        ++start;
    l = l.substr(start);
    if (l.size() > 6 && l.substr(l.size() - 6) == " claim")
        l = l.substr(0, l.size() - 6);

    if (l == "supported")
        return Verdict::Supported;
    if (l == "refuted")
        return Verdict::Refuted;
    if (l == "not enough evidence")
        return Verdict::NotEnoughEvidence;
    if (l == "conflicting evidence/cherrypicking")
        return Verdict::ConflictingEvidence;
    return std::nullopt;
}

const char* to_string(EvidenceFormatMode m) {
    switch (m) {
    case EvidenceFormatMode::AnswerOnly:
        return "answer_only";
    case EvidenceFormatMode::QuestionPlusAnswer:
        return "question_plus_answer";
    case EvidenceFormatMode::Declarative:
        return "declarative";
    }
    return "question_plus_answer";
}

std::optional<EvidenceFormatMode> mode_from_string(const std::string& s) {
    std::string l = lower(s);
    if (l == "answer_only")
        return EvidenceFormatMode::AnswerOnly;
    if (l == "qa" || l == "question_plus_answer")
        return EvidenceFormatMode::QuestionPlusAnswer;
    if (l == "declarative")
        return EvidenceFormatMode::Declarative;
    return std::nullopt;
}

} // namespace imgfact
