#include "imgfact/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "imgfact/errors.hpp"

namespace imgfact {

using nlohmann::json;

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        bool alnum = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                     (c >= 'A' && c <= 'Z');
        if (alnum) {
            cur.push_back(static_cast<char>(
                c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty())
        tokens.push_back(std::move(cur));
    return tokens;
}

void Bm25Params::validate() const {
    if (k1 < 0.0)
        throw ConfigError("bm25 k1 must be >= 0");
    if (b < 0.0 || b > 1.0)
        throw ConfigError("bm25 b must be in [0, 1]");
}

Bm25Index::Bm25Index(const std::vector<TrainExample>& corpus, Bm25Params params)
    : params_(params) {
    params_.validate();
    std::unordered_map<std::string, int> doc_freq;
    double total_len = 0.0;
    for (const auto& ex : corpus) {
        auto tokens = tokenize(ex.claim_text);
        doc_len_.push_back(static_cast<double>(tokens.size()));
        total_len += static_cast<double>(tokens.size());
        std::unordered_map<std::string, int> tf;
        for (auto& t : tokens)
            ++tf[t];
        for (const auto& [t, _] : tf)
            ++doc_freq[t];
        term_freq_.push_back(std::move(tf));
    }
    std::size_t n = doc_len_.size();
    avgdl_ = n > 0 ? total_len / static_cast<double>(n) : 0.0;
    for (const auto& [t, df] : doc_freq) {
        double idf = std::log((static_cast<double>(n) - df + 0.5) / (df + 0.5));
        idf_[t] = idf > 0.0 ? idf : 0.0;
    }
}

std::vector<double> Bm25Index::scores(std::string_view query) const {
    std::vector<double> out(doc_len_.size(), 0.0);
    if (avgdl_ == 0.0)
        return out;
    for (const auto& token : tokenize(query)) {
        auto idf_it = idf_.find(token);
        if (idf_it == idf_.end() || idf_it->second == 0.0)
            continue;
        for (std::size_t i = 0; i < out.size(); ++i) {
            auto tf_it = term_freq_[i].find(token);
            if (tf_it == term_freq_[i].end())
                continue;
            double tf = tf_it->second;
            double denom = tf + params_.k1 * (1.0 - params_.b +
                                              params_.b * doc_len_[i] / avgdl_);
            out[i] += idf_it->second * (tf * (params_.k1 + 1.0)) / denom;
        }
    }
    return out;
}

std::vector<std::size_t> Bm25Index::rank(std::string_view query,
                                         std::size_t top_n) const {
    auto s = scores(query);
    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t take = std::min(top_n, order.size());
    std::partial_sort(order.begin(), order.begin() + take, order.end(),
                      [&s](std::size_t a, std::size_t b) {
                          if (s[a] != s[b])
                              return s[a] > s[b];
                          return a < b;
                      });
    order.resize(take);
    return order;
}

std::vector<TrainExample> bm25_rank(const std::string& query,
                                    const std::vector<TrainExample>& corpus,
                                    Bm25Params params, std::size_t top_n) {
    Bm25Index index(corpus, params);
    std::vector<TrainExample> out;
    for (std::size_t i : index.rank(query, top_n))
        out.push_back(corpus[i]);
    return out;
}

std::vector<TrainExample> select_fewshot(const std::string& claim_text,
                                         const std::vector<TrainExample>& corpus,
                                         std::size_t n_claims,
                                         Bm25Params params) {
    if (corpus.empty())
        throw EmptyCorpus("few-shot corpus is empty");
    return bm25_rank(claim_text, corpus, params, n_claims);
}

std::vector<TrainExample> load_train_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open train set: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("bad train set JSON: " + std::string(e.what()));
    }
    if (!doc.is_array())
        throw FormatError("train set must be a JSON array");

    std::vector<TrainExample> corpus;
    for (const auto& item : doc) {
        TrainExample ex;
        ex.claim_text = item.value("claim", "");
        auto verdict = verdict_from_string(item.value("label", ""));
        ex.gold_label = verdict.value_or(Verdict::Refuted);
        for (const auto& q : item.value("questions", json::array())) {
            TrainQa qa;
            qa.question = q.value("question", "");
            if (q.contains("answer")) {
                qa.answer = q.value("answer", "");
                qa.answer_type =
                    answer_type_from_string(q.value("answer_type", ""))
                        .value_or(AnswerType::Abstractive);
            } else if (q.contains("answers") && q["answers"].is_array() &&
                       !q["answers"].empty()) {
                // Alternate layout with an array of answers; keep the first.
                const auto& a = q["answers"][0];
                qa.answer = a.value("answer", "");
                qa.answer_type =
                    answer_type_from_string(a.value("answer_type", ""))
                        .value_or(AnswerType::Abstractive);
            }
            ex.qa_pairs.push_back(std::move(qa));
        }
        corpus.push_back(std::move(ex));
    }
    return corpus;
}

} // namespace imgfact
