#include "imgfact/generation.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include <json.hpp>

#include "imgfact/base64.hpp"
#include "imgfact/errors.hpp"

namespace imgfact {

using nlohmann::json;

LlmResponse call_llm(const PromptBundle& bundle, LlmProvider& provider,
                     const RetryPolicy& retry) {
    return with_retries(retry, [&] {
        return provider.complete(bundle.claim_id, bundle.system_prompt,
                                 bundle.user_parts);
    });
}

namespace {

std::string strip_fences(const std::string& raw) {
    std::string text = raw;
    auto trim = [](std::string& s) {
        std::size_t b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) {
            s.clear();
            return;
        }
        s = s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
    };
    trim(text);
    if (text.rfind("```", 0) == 0) {
        std::size_t line_end = text.find('\n');
        text = line_end == std::string::npos ? "" : text.substr(line_end + 1);
        if (auto close = text.rfind("```"); close != std::string::npos)
            text = text.substr(0, close);
        trim(text);
    }
    return text;
}

int parse_likert(const json& v, const char* label) {
    long value = -1;
    if (v.is_number_integer()) {
        value = v.get<long>();
    } else if (v.is_string()) {
        // models habitually quote the digit
        const std::string s = v.get<std::string>();
        if (!s.empty() &&
            std::all_of(s.begin(), s.end(),
                        [](unsigned char c) { return std::isdigit(c); }))
            value = std::stol(s);
    }
    if (value < 1 || value > 5)
        throw SchemaError(std::string("Likert rating for '") + label +
                          "' is not an integer in 1..5: " + v.dump());
    return static_cast<int>(value);
}

// source IDs arrive as numbers or digit strings
std::optional<int> parse_source_id(const json& v) {
    if (v.is_number_integer())
        return v.get<int>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (!s.empty() &&
            std::all_of(s.begin(), s.end(),
                        [](unsigned char c) { return std::isdigit(c); }))
            return std::stoi(s);
    }
    return std::nullopt;
}

const std::regex kImgTag(R"(\s*\[IMG_\d+\])");

std::string strip_img_tags(const std::string& text, bool& stripped) {
    std::string out = std::regex_replace(text, kImgTag, "");
    stripped = out != text;
    return out;
}

} // namespace

VerificationResult parse_response(const std::string& raw,
                                  const SourceTable& sources) {
    json doc;
    try {
        doc = json::parse(strip_fences(raw));
    } catch (const json::exception& e) {
        throw ParseError(std::string("response is not valid JSON: ") +
                         e.what());
    }
    if (!doc.is_object())
        throw SchemaError("response JSON is not an object");

    VerificationResult result;

    if (!doc.contains("questions") || !doc["questions"].is_array())
        throw SchemaError("response lacks a questions array");
    bool any_evidence_field = false;
    for (const auto& item : doc["questions"]) {
        if (!item.is_object())
            throw SchemaError("question entry is not an object");
        if (!item.contains("question") || !item["question"].is_string())
            throw SchemaError("question entry lacks a question string");
        if (!item.contains("answer") || !item["answer"].is_string())
            throw SchemaError("question entry lacks an answer string");
        if (!item.contains("answer_type") || !item["answer_type"].is_string())
            throw SchemaError("question entry lacks an answer_type");
        auto atype = answer_type_from_string(item["answer_type"]);
        if (!atype)
            throw SchemaError("unknown answer_type: " +
                              item["answer_type"].dump());

        QAPair pair;
        bool stripped = false;
        pair.question = strip_img_tags(item["question"], stripped);
        if (stripped)
            result.warnings.push_back("image tag stripped from a question");
        pair.answer = strip_img_tags(item["answer"], stripped);
        if (stripped)
            result.warnings.push_back("image tag stripped from an answer");
        pair.answer_type = *atype;
        if (item.contains("evidence") && item["evidence"].is_string()) {
            pair.declarative = item["evidence"].get<std::string>();
            any_evidence_field = true;
        }

        if (!item.contains("source")) {
            result.warnings.push_back(
                "question without a source field dropped: " +
                pair.question.substr(0, 60));
            continue;
        }
        auto sid = parse_source_id(item["source"]);
        if (!sid) {
            result.warnings.push_back(
                "question with a non-numeric source dropped: " +
                item["source"].dump());
            continue;
        }
        pair.source_id = *sid;
        if (!sources.count(*sid)) {
            pair.unknown_source = true;
            result.warnings.push_back("cited source ID " +
                                      std::to_string(*sid) +
                                      " does not exist in the prompt");
        }
        result.qa_pairs.push_back(std::move(pair));
    }
    if (result.qa_pairs.size() > 10) {
        result.warnings.push_back(
            "response carried " + std::to_string(result.qa_pairs.size()) +
            " questions, keeping the first 10");
        result.qa_pairs.resize(10);
    }
    result.declarative_format = any_evidence_field;

    if (!doc.contains("claim_veracity") || !doc["claim_veracity"].is_object())
        throw SchemaError("response lacks the claim_veracity object");
    const json& cv = doc["claim_veracity"];
    for (const char* key : {"Supported", "Refuted", "Not Enough Evidence",
                            "Conflicting Evidence/Cherrypicking"})
        if (!cv.contains(key))
            throw SchemaError(std::string("claim_veracity lacks '") + key +
                              "'");
    result.likert.supported = parse_likert(cv["Supported"], "Supported");
    result.likert.refuted = parse_likert(cv["Refuted"], "Refuted");
    result.likert.not_enough_evidence =
        parse_likert(cv["Not Enough Evidence"], "Not Enough Evidence");
    result.likert.conflicting = parse_likert(
        cv["Conflicting Evidence/Cherrypicking"],
        "Conflicting Evidence/Cherrypicking");

    if (!doc.contains("veracity_verdict") ||
        !doc["veracity_verdict"].is_string())
        throw SchemaError("response lacks the veracity_verdict string");
    auto verdict = verdict_from_string(doc["veracity_verdict"]);
    if (!verdict)
        throw SchemaError("veracity_verdict is not one of the four labels: " +
                          doc["veracity_verdict"].dump());
    result.verdict = *verdict;

    if (!doc.contains("verdict_justification") ||
        !doc["verdict_justification"].is_string())
        throw SchemaError("response lacks the verdict_justification string");
    bool stripped = false;
    result.justification =
        strip_img_tags(doc["verdict_justification"], stripped);
    if (stripped)
        result.warnings.push_back("image tag stripped from the justification");

    return result;
}

void attach_thumbnails(VerificationResult& result, const SourceTable& sources,
                       ThumbnailCache& cache, ThumbFetcher& fetcher) {
    for (auto& pair : result.qa_pairs) {
        if (pair.unknown_source)
            continue;
        auto it = sources.find(pair.source_id);
        if (it == sources.end() || it->second.kind != SourceBlock::Kind::Image)
            continue;
        const std::string& url = it->second.image_url;
        if (url.empty()) {
            result.warnings.push_back("source " +
                                      std::to_string(pair.source_id) +
                                      " has no thumbnail URL");
            continue;
        }
        try {
            pair.thumbnail = cache.get(url, fetcher);
        } catch (const ThumbFetchError& e) {
            result.warnings.push_back(std::string("thumbnail unavailable: ") +
                                      e.what());
        }
    }
}

std::vector<EvidenceText>
to_submission_evidence(const VerificationResult& result,
                       EvidenceFormatMode mode) {
    if (mode == EvidenceFormatMode::Declarative && !result.declarative_format)
        throw ModeMismatch(
            "declarative evidence requested but the response carries no "
            "evidence fields (QA-format response)");

    std::vector<EvidenceText> out;
    out.reserve(result.qa_pairs.size());
    for (const auto& pair : result.qa_pairs) {
        EvidenceText ev;
        ev.source_id = pair.source_id;
        ev.thumbnail = pair.thumbnail;

        std::string text;
        switch (mode) {
        case EvidenceFormatMode::AnswerOnly:
            text = pair.answer;
            break;
        case EvidenceFormatMode::QuestionPlusAnswer:
            text = pair.question + " " + pair.answer;
            break;
        case EvidenceFormatMode::Declarative:
            text = pair.declarative.empty() ? pair.question + " " + pair.answer
                                            : pair.declarative;
            break;
        }

        // The [IMG_1] tag and the thumbnail payload travel together: strip
        // stray tags from pairs without an image, add the tag to pairs with
        // one.
        bool stripped = false;
        text = strip_img_tags(text, stripped);
        if (ev.thumbnail)
            text += " [IMG_1]";
        ev.text = std::move(text);
        out.push_back(std::move(ev));
    }
    return out;
}

} // namespace imgfact
