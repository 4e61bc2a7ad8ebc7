#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "imgfact/types.hpp"

namespace imgfact {

// Lowercases and splits on runs of non-alphanumeric characters (ASCII
// semantics; multi-byte sequences act as separators). Deterministic.
std::vector<std::string> tokenize(std::string_view text);

struct Bm25Params {
    double k1 = 1.5;
    double b = 0.75;

    void validate() const; // throws ConfigError
};

/// Okapi BM25 over the tokenized claim texts of the train set.
///
/// idf(t) = max(0, ln((N - df + 0.5) / (df + 0.5))) -- the classic
/// Robertson/Sparck-Jones form with the usual floor at zero so that terms
/// present in most documents never push a matching document below a
/// non-matching one.  Query tokens contribute per occurrence. Statistics are
/// fixed at construction; the index is immutable and safe for concurrent
/// queries.
class Bm25Index {
public:
    Bm25Index(const std::vector<TrainExample>& corpus, Bm25Params params = {});

    // One score per corpus document, in corpus order.
    std::vector<double> scores(std::string_view query) const;

    // Indices of the top_n documents, descending score, ties by corpus order.
    std::vector<std::size_t> rank(std::string_view query,
                                  std::size_t top_n) const;

    std::size_t size() const { return doc_len_.size(); }

private:
    Bm25Params params_;
    double avgdl_ = 0.0;
    std::vector<double> doc_len_;
    std::vector<std::unordered_map<std::string, int>> term_freq_;
    std::unordered_map<std::string, double> idf_;
};

// Functional form over a throwaway index.
std::vector<TrainExample> bm25_rank(const std::string& query,
                                    const std::vector<TrainExample>& corpus,
                                    Bm25Params params, std::size_t top_n);

// Top n_claims train examples for this claim text, full qa_pairs retained.
// Throws EmptyCorpus.
std::vector<TrainExample> select_fewshot(const std::string& claim_text,
                                         const std::vector<TrainExample>& corpus,
                                         std::size_t n_claims = 3,
                                         Bm25Params params = {});

// Ingests the train-set JSON: an array of claims, each with a
// claim text, a gold label and its annotated QA pairs.
std::vector<TrainExample> load_train_corpus(const std::filesystem::path& path);

} // namespace imgfact
