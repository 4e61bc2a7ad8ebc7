#include "imgfact/retrieval.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "imgfact/errors.hpp"
#include "imgfact/simkernel.hpp"

namespace imgfact {

void RetrievalParams::validate() const {
    if (k < 1)
        throw ConfigError("retrieval k must be >= 1");
    if (l < 1)
        throw ConfigError("retrieval l must be >= 1");
    if (l > k)
        throw ConfigError("retrieval l must not exceed k");
    if (lambda < 0.0 || lambda > 1.0)
        throw ConfigError("retrieval lambda must be in [0, 1]");
}

std::vector<ScoredChunk> knn_search(const VectorStore& store,
                                    std::span<const float> query_vec,
                                    std::size_t k) {
    if (k < 1)
        throw ConfigError("knn_search: k must be >= 1");
    if (store.empty())
        return {};
    if (query_vec.size() != store.dim())
        throw DimensionMismatch("knn_search: query dim " +
                                std::to_string(query_vec.size()) +
                                ", store dim " + std::to_string(store.dim()));

    std::vector<double> scores(store.size());
    cosine_scores(store.matrix(), store.dim(), query_vec, scores);

    std::vector<std::size_t> order(store.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t take = std::min(k, store.size());
    std::partial_sort(order.begin(), order.begin() + take, order.end(),
                      [&scores](std::size_t a, std::size_t b) {
                          if (scores[a] != scores[b])
                              return scores[a] > scores[b];
                          return a < b;
                      });

    std::vector<ScoredChunk> out;
    out.reserve(take);
    for (std::size_t r = 0; r < take; ++r) {
        std::size_t i = order[r];
        out.push_back(ScoredChunk{store.entry(i), i, scores[i]});
    }
    return out;
}

std::vector<ScoredChunk> mmr_rerank(const std::vector<ScoredChunk>& candidates,
                                    std::span<const float> query_vec,
                                    double lambda, std::size_t l) {
    if (lambda < 0.0 || lambda > 1.0)
        throw ConfigError("mmr_rerank: lambda must be in [0, 1]");
    std::size_t n = candidates.size();
    if (n == 0 || l == 0)
        return {};
    for (const auto& c : candidates)
        if (c.entry.vector.size() != query_vec.size())
            throw DimensionMismatch("mmr_rerank: candidate dim " +
                                    std::to_string(c.entry.vector.size()) +
                                    ", query dim " +
                                    std::to_string(query_vec.size()));

    std::vector<double> query_sim(n);
    for (std::size_t i = 0; i < n; ++i)
        query_sim[i] = cosine(candidates[i].entry.vector, query_vec);

    // max similarity of each remaining candidate to the selected set,
    // updated incrementally after every pick; -inf until the set is non-empty
    std::vector<double> max_sel_sim(n,
                                    -std::numeric_limits<double>::infinity());
    std::vector<bool> taken(n, false);
    std::vector<std::size_t> picks;
    std::size_t want = std::min(l, n);

    while (picks.size() < want) {
        std::size_t best = n;
        double best_score = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i])
                continue;
            // First pick ranks by plain query similarity.
            double s = picks.empty()
                           ? query_sim[i]
                           : lambda * query_sim[i] -
                                 (1.0 - lambda) * max_sel_sim[i];
            if (best == n || s > best_score) {
                best = i;
                best_score = s;
            }
        }
        taken[best] = true;
        picks.push_back(best);
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i])
                continue;
            double s = cosine(candidates[i].entry.vector,
                              candidates[best].entry.vector);
            if (s > max_sel_sim[i])
                max_sel_sim[i] = s;
        }
    }

    std::vector<ScoredChunk> out;
    out.reserve(picks.size());
    for (std::size_t i : picks)
        out.push_back(candidates[i]);
    return out;
}

std::vector<ScoredChunk> retrieve_text_sources(const VectorStore& store,
                                               const std::string& query_text,
                                               EmbeddingProvider& embedder,
                                               const RetrievalParams& params) {
    params.validate();
    if (store.empty())
        return {};
    auto vecs = embedder.embed({query_text});
    if (vecs.size() != 1)
        throw EmbeddingError("query embedding returned " +
                             std::to_string(vecs.size()) + " vectors");
    auto candidates = knn_search(store, vecs[0], params.k);
    return mmr_rerank(candidates, vecs[0], params.lambda, params.l);
}

} // namespace imgfact
