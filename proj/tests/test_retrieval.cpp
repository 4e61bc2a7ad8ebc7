#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "imgfact/errors.hpp"
#include "imgfact/retrieval.hpp"
#include "imgfact/simkernel.hpp"
#include "support.hpp"

using namespace imgfact;
using namespace testsupport;

namespace {

// --- independent oracle implementations -----------------------------------

// cosine re-implemented for the oracle: same accumulation order as the
// production kernel so exact tie behaviour is comparable
double oracle_cosine(const std::vector<float>& a, const std::vector<float>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0 || nb == 0)
        return 0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

// full sort over all entries; the reference for knn_search
std::vector<std::size_t> oracle_knn(const std::vector<std::vector<float>>& vecs,
                                    const std::vector<float>& query,
                                    std::size_t k) {
    std::vector<double> scores(vecs.size());
    for (std::size_t i = 0; i < vecs.size(); ++i)
        scores[i] = oracle_cosine(vecs[i], query);
    std::vector<std::size_t> order(vecs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b])
            return scores[a] > scores[b];
        return a < b;
    });
    order.resize(std::min(k, order.size()));
    return order;
}

// stepwise exhaustive maximization of the MMR objective; mirrors the
// documented convention that the first pick ranks by plain similarity
std::vector<std::size_t> oracle_mmr(const std::vector<std::vector<float>>& cands,
                                    const std::vector<float>& query,
                                    double lambda, std::size_t l) {
    std::vector<std::size_t> selected;
    std::vector<bool> taken(cands.size(), false);
    while (selected.size() < std::min(l, cands.size())) {
        double best_score = -1e300;
        std::size_t best = cands.size();
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (taken[i])
                continue;
            double score;
            if (selected.empty()) {
                score = oracle_cosine(cands[i], query);
            } else {
                double max_sim = -1e300;
                for (std::size_t s : selected)
                    max_sim = std::max(max_sim,
                                       oracle_cosine(cands[i], cands[s]));
                score = lambda * oracle_cosine(cands[i], query) -
                        (1.0 - lambda) * max_sim;
            }
            if (score > best_score) {
                best_score = score;
                best = i;
            }
        }
        taken[best] = true;
        selected.push_back(best);
    }
    return selected;
}

VectorStore store_from(const std::vector<std::vector<float>>& vecs) {
    VectorStore store("t", vecs.empty() ? 0 : vecs[0].size());
    for (std::size_t i = 0; i < vecs.size(); ++i) {
        Chunk c;
        c.doc_url = "u" + std::to_string(i);
        c.index = i;
        c.text = "chunk " + std::to_string(i);
        store.add(std::move(c), vecs[i]);
    }
    return store;
}

std::vector<ScoredChunk> candidates_from(const std::vector<std::vector<float>>& vecs) {
    std::vector<ScoredChunk> cands;
    for (std::size_t i = 0; i < vecs.size(); ++i) {
        ScoredChunk sc;
        sc.entry.chunk.index = i;
        sc.entry.vector = vecs[i];
        sc.store_index = i;
        cands.push_back(std::move(sc));
    }
    return cands;
}

// small discrete components make exact score ties common
std::vector<std::vector<float>> random_vectors(std::mt19937& rng, std::size_t n,
                                               std::size_t dim) {
    std::uniform_int_distribution<int> comp(-2, 2);
    std::vector<std::vector<float>> vecs(n, std::vector<float>(dim));
    for (auto& v : vecs)
        for (auto& x : v)
            x = static_cast<float>(comp(rng));
    return vecs;
}

} // namespace

TEST_CASE("knn on the documented 3-vector example") {
    auto store = store_from({{1, 0}, {0, 1}, {0.6f, 0.8f}});
    std::vector<float> q{1, 0};
    auto got = knn_search(store, q, 2);
    REQUIRE(got.size() == 2);
    CHECK(got[0].store_index == 0);
    CHECK(got[0].score == doctest::Approx(1.0));
    CHECK(got[1].store_index == 2);
    CHECK(got[1].score == doctest::Approx(0.6));
}

TEST_CASE("knn saturates at store size and handles empty stores") {
    auto store = store_from({{1, 0}, {0, 1}});
    std::vector<float> q{1, 0};
    CHECK(knn_search(store, q, 100).size() == 2);
    VectorStore empty;
    CHECK(knn_search(empty, q, 5).empty());
}

TEST_CASE("knn rejects mismatched dimensions") {
    auto store = store_from({{1, 0}});
    std::vector<float> q{1, 0, 0};
    CHECK_THROWS_AS(knn_search(store, q, 1), DimensionMismatch);
}

TEST_CASE("knn matches the full-sort oracle on randomized stores") {
    std::mt19937 rng(123);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 1 + rng() % 200;
        std::size_t dim = 1 + rng() % 16;
        auto vecs = random_vectors(rng, n, dim);
        // duplicates guarantee exact ties
        if (n > 3) {
            vecs[n - 1] = vecs[0];
            vecs[n - 2] = vecs[1];
        }
        std::vector<float> q(dim);
        std::uniform_int_distribution<int> comp(-2, 2);
        for (auto& x : q)
            x = static_cast<float>(comp(rng));

        auto store = store_from(vecs);
        std::size_t k = 1 + rng() % 25;
        auto got = knn_search(store, q, k);
        auto expect = oracle_knn(vecs, q, k);
        REQUIRE(got.size() == expect.size());
        for (std::size_t i = 0; i < got.size(); ++i)
            CHECK(got[i].store_index == expect[i]);
        // result is sorted non-increasing with index tie-break
        for (std::size_t i = 1; i < got.size(); ++i) {
            bool ordered = got[i - 1].score > got[i].score ||
                           (got[i - 1].score == got[i].score &&
                            got[i - 1].store_index < got[i].store_index);
            CHECK(ordered);
        }
    }
}

TEST_CASE("cosine is scale-invariant in ranking") {
    std::mt19937 rng(5);
    auto vecs = random_vectors(rng, 50, 8);
    std::vector<float> q(8);
    std::uniform_int_distribution<int> comp(-2, 2);
    for (auto& x : q)
        x = static_cast<float>(comp(rng));
    auto base = knn_search(store_from(vecs), q, 50);

    auto scaled = vecs;
    for (auto& v : scaled[7])
        v *= 4.0f; // exact in binary floating point
    auto after = knn_search(store_from(scaled), q, 50);
    REQUIRE(base.size() == after.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(base[i].store_index == after[i].store_index);
}

TEST_CASE("cosine with a zero vector is 0, never NaN") {
    auto store = store_from({{0, 0}, {1, 0}});
    std::vector<float> q{1, 0};
    auto got = knn_search(store, q, 2);
    CHECK(got[0].store_index == 1);
    CHECK(got[1].score == 0.0);
    std::vector<float> zero_q{0, 0};
    auto zeros = knn_search(store, zero_q, 2);
    CHECK(zeros[0].score == 0.0);
}

TEST_CASE("parallel and serial kernels agree bit-exactly") {
    std::mt19937 rng(31337);
    std::uniform_real_distribution<float> dist(-1, 1);
    std::size_t n = 5000, dim = 33;
    std::vector<float> matrix(n * dim), q(dim);
    for (auto& v : matrix)
        v = dist(rng);
    for (auto& v : q)
        v = dist(rng);
    std::vector<double> serial(n), parallel(n);
    cosine_scores_serial(matrix, dim, q, serial);
    cosine_scores_parallel(matrix, dim, q, parallel);
    for (std::size_t i = 0; i < n; ++i)
        REQUIRE(serial[i] == parallel[i]);
}

TEST_CASE("mmr with lambda=1 is pure similarity order") {
    std::mt19937 rng(77);
    auto vecs = random_vectors(rng, 10, 4);
    std::vector<float> q{1, 2, 0, -1};
    auto cands = candidates_from(vecs);
    auto got = mmr_rerank(cands, q, 1.0, 5);
    auto expect = oracle_knn(vecs, q, 5);
    REQUIRE(got.size() == 5);
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got[i].store_index == expect[i]);
}

TEST_CASE("mmr picks a duplicate then the orthogonal vector") {
    // candidates ordered [dup, orthogonal, dup]; at lambda=0.5 the second
    // duplicate ties with the orthogonal vector and loses on position
    auto cands = candidates_from({{1, 0}, {0, 1}, {1, 0}});
    std::vector<float> q{1, 0};
    auto got = mmr_rerank(cands, q, 0.5, 2);
    REQUIRE(got.size() == 2);
    CHECK(got[0].store_index == 0); // the duplicate most similar to q
    CHECK(got[1].store_index == 1); // the orthogonal one
}

TEST_CASE("mmr saturates to a permutation of all candidates") {
    std::mt19937 rng(11);
    auto vecs = random_vectors(rng, 5, 3);
    std::vector<float> q{1, 0, 0};
    auto got = mmr_rerank(candidates_from(vecs), q, 0.3, 99);
    REQUIRE(got.size() == 5);
    std::vector<bool> seen(5, false);
    for (const auto& sc : got) {
        CHECK_FALSE(seen[sc.store_index]);
        seen[sc.store_index] = true;
    }
}

TEST_CASE("mmr first element is the argmax of query similarity") {
    std::mt19937 rng(222);
    for (double lambda : {0.0, 0.25, 0.5, 0.8, 1.0}) {
        auto vecs = random_vectors(rng, 8, 4);
        std::vector<float> q(4);
        std::uniform_int_distribution<int> comp(-2, 2);
        for (auto& x : q)
            x = static_cast<float>(comp(rng));
        auto got = mmr_rerank(candidates_from(vecs), q, lambda, 3);
        REQUIRE_FALSE(got.empty());
        double best = -1e300;
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < vecs.size(); ++i) {
            double s = oracle_cosine(vecs[i], q);
            if (s > best) {
                best = s;
                best_i = i;
            }
        }
        CHECK(got[0].store_index == best_i);
    }
}

TEST_CASE("mmr equals stepwise exhaustive maximization (oracle)") {
    std::mt19937 rng(4242);
    for (double lambda : {0.0, 0.5, 0.8, 1.0}) {
        for (int trial = 0; trial < 40; ++trial) {
            std::size_t n = 1 + rng() % 6;
            std::size_t l = 1 + rng() % 3;
            auto vecs = random_vectors(rng, n, 3);
            std::vector<float> q(3);
            std::uniform_int_distribution<int> comp(-2, 2);
            for (auto& x : q)
                x = static_cast<float>(comp(rng));
            auto got = mmr_rerank(candidates_from(vecs), q, lambda, l);
            auto expect = oracle_mmr(vecs, q, lambda, l);
            REQUIRE(got.size() == expect.size());
            for (std::size_t i = 0; i < got.size(); ++i)
                CHECK(got[i].store_index == expect[i]);
        }
    }
}

TEST_CASE("mmr rejects mismatched dimensions") {
    auto cands = candidates_from({{1, 0}});
    std::vector<float> q{1, 0, 0};
    CHECK_THROWS_AS(mmr_rerank(cands, q, 0.5, 1), DimensionMismatch);
}

TEST_CASE("retrieve_text_sources applies the documented defaults") {
    RetrievalParams params;
    CHECK(params.k == 20);
    CHECK(params.l == 7);
    CHECK(params.lambda == 0.8);
    params.validate();

    StubEmbedder embedder(4);
    embedder.set("query", {1, 0, 0, 0});
    std::mt19937 rng(9);
    auto vecs = random_vectors(rng, 30, 4);
    VectorStore store("c", 4);
    for (std::size_t i = 0; i < vecs.size(); ++i) {
        Chunk c;
        c.index = i;
        c.text = "t" + std::to_string(i);
        store.add(std::move(c), vecs[i]);
    }
    auto got = retrieve_text_sources(store, "query", embedder, params);
    CHECK(got.size() == 7);

    VectorStore empty;
    CHECK(retrieve_text_sources(empty, "query", embedder, params).empty());

    // 3 entries, l=7 -> all three
    VectorStore small("s", 4);
    for (std::size_t i = 0; i < 3; ++i) {
        Chunk c;
        c.index = i;
        small.add(std::move(c), vecs[i]);
    }
    CHECK(retrieve_text_sources(small, "query", embedder, params).size() == 3);
}

TEST_CASE("retrieval params validation") {
    RetrievalParams p;
    p.l = 30; // > k
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.lambda = 1.5;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.k = 0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}
