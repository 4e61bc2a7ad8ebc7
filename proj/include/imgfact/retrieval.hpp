#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "imgfact/store.hpp"

namespace imgfact {

struct ScoredChunk {
    EmbeddedChunk entry;
    std::size_t store_index = 0; // position in the store / candidate list
    double score = 0.0;          // cosine similarity to the query
};

struct RetrievalParams {
    std::size_t k = 20;   // knn depth
    std::size_t l = 7;    // results kept after reranking
    double lambda = 0.8;  // similarity-vs-diversity tradeoff

    void validate() const; // throws ConfigError
};

/// Exact top-k by cosine similarity via a full scan, descending score with
/// ties broken by ascending store index. Returns min(k, |store|) entries;
/// an empty store yields an empty result. Throws DimensionMismatch when the
/// query does not match the store dimension.
std::vector<ScoredChunk> knn_search(const VectorStore& store,
                                    std::span<const float> query_vec,
                                    std::size_t k);

/// Greedy maximal-marginal-relevance selection of min(l, n) candidates.
/// The first pick is the most query-similar candidate; each later step
/// maximizes lambda*sim(d, query) - (1-lambda)*max_{s in selected} sim(d, s).
/// All ties break by ascending original candidate position.
std::vector<ScoredChunk> mmr_rerank(const std::vector<ScoredChunk>& candidates,
                                    std::span<const float> query_vec,
                                    double lambda, std::size_t l);

/// embed -> knn(k) -> mmr(lambda, l). At most l results.
std::vector<ScoredChunk> retrieve_text_sources(const VectorStore& store,
                                               const std::string& query_text,
                                               EmbeddingProvider& embedder,
                                               const RetrievalParams& params = {});

} // namespace imgfact
