#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "imgfact/chunker.hpp"
#include "imgfact/embedding.hpp"

namespace imgfact {

struct EmbeddedChunk {
    Chunk chunk;
    std::vector<float> vector;

    bool operator==(const EmbeddedChunk&) const = default;
};

/// Per-claim collection of embedded knowledge-store chunks. Entries keep
/// insertion order; vectors live in one contiguous row-major block so the
/// scoring kernels can scan them without indirection. Immutable once built,
/// safe to share across threads.
class VectorStore {
public:
    VectorStore() = default;
    VectorStore(std::string claim_id, std::size_t dim)
        : claim_id_(std::move(claim_id)), dim_(dim) {}

    void add(Chunk chunk, std::span<const float> vec);

    const std::string& claim_id() const { return claim_id_; }
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return chunks_.size(); }
    bool empty() const { return chunks_.empty(); }

    const Chunk& chunk(std::size_t i) const { return chunks_[i]; }
    std::span<const float> vec(std::size_t i) const {
        return std::span<const float>(matrix_.data() + i * dim_, dim_);
    }
    std::span<const float> matrix() const { return matrix_; }

    EmbeddedChunk entry(std::size_t i) const {
        return EmbeddedChunk{chunks_[i], {vec(i).begin(), vec(i).end()}};
    }

    bool operator==(const VectorStore&) const = default;

private:
    std::string claim_id_;
    std::size_t dim_ = 0;
    std::vector<Chunk> chunks_;
    std::vector<float> matrix_; // size() * dim clamped floats
};

struct ChunkingParams {
    std::size_t max_len = 2048;
    std::size_t context_window = 256;
    std::size_t embed_batch = 32;
};

// Chunks every document and embeds all chunks. Throws EmbeddingError when
// the provider fails or mixes dimensions. Zero documents yield a valid
// empty store.
VectorStore build_store(const std::string& claim_id,
                        const std::vector<SourceDocument>& docs,
                        EmbeddingProvider& embedder,
                        const ChunkingParams& params = {});

// Versioned binary container: magic + JSON header + per-entry metadata and
// packed little-endian float32 vectors. save/load round-trips bit-exactly.
void save_store(const VectorStore& store, const std::filesystem::path& path);
VectorStore load_store(const std::filesystem::path& path);

} // namespace imgfact
