#include "imgfact/store.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "imgfact/errors.hpp"

namespace imgfact {

using nlohmann::json;

static constexpr char kMagic[4] = {'I', 'F', 'V', 'S'};
static constexpr int kFormatVersion = 1;

void VectorStore::add(Chunk chunk, std::span<const float> vec) {
    if (vec.size() != dim_)
        throw DimensionMismatch("store dim " + std::to_string(dim_) +
                                ", entry dim " + std::to_string(vec.size()));
    chunks_.push_back(std::move(chunk));
    matrix_.insert(matrix_.end(), vec.begin(), vec.end());
}

VectorStore build_store(const std::string& claim_id,
                        const std::vector<SourceDocument>& docs,
                        EmbeddingProvider& embedder,
                        const ChunkingParams& params) {
    std::vector<Chunk> chunks;
    for (const auto& doc : docs) {
        auto dc = chunk_document(doc, params.max_len, params.context_window);
        chunks.insert(chunks.end(), std::make_move_iterator(dc.begin()),
                      std::make_move_iterator(dc.end()));
    }
    if (chunks.empty())
        return VectorStore(claim_id, 0);

    std::vector<std::vector<float>> vectors;
    vectors.reserve(chunks.size());
    std::size_t batch = params.embed_batch > 0 ? params.embed_batch : 32;
    for (std::size_t at = 0; at < chunks.size(); at += batch) {
        std::size_t n = std::min(batch, chunks.size() - at);
        std::vector<std::string> texts;
        texts.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            texts.push_back(chunks[at + i].text);
        auto vecs = embedder.embed(texts);
        if (vecs.size() != n)
            throw EmbeddingError("embedding provider returned " +
                                 std::to_string(vecs.size()) + " vectors for " +
                                 std::to_string(n) + " texts");
        vectors.insert(vectors.end(), std::make_move_iterator(vecs.begin()),
                       std::make_move_iterator(vecs.end()));
    }

    std::size_t dim = vectors.front().size();
    if (dim == 0)
        throw EmbeddingError("embedding provider returned empty vectors");
    for (const auto& v : vectors)
        if (v.size() != dim)
            throw EmbeddingError("embedding provider mixed dimensions: " +
                                 std::to_string(dim) + " vs " +
                                 std::to_string(v.size()));

    VectorStore store(claim_id, dim);
    for (std::size_t i = 0; i < chunks.size(); ++i)
        store.add(std::move(chunks[i]), vectors[i]);
    return store;
}

namespace {

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

bool read_u32(std::istream& in, std::uint32_t& v) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        return false;
    v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
        (static_cast<std::uint32_t>(b[2]) << 16) |
        (static_cast<std::uint32_t>(b[3]) << 24);
    return true;
}

void write_f32_le(std::ostream& out, std::span<const float> vals) {
    for (float f : vals) {
        std::uint32_t u = std::bit_cast<std::uint32_t>(f);
        write_u32(out, u);
    }
}

bool read_f32_le(std::istream& in, std::span<float> vals) {
    for (float& f : vals) {
        std::uint32_t u;
        if (!read_u32(in, u))
            return false;
        f = std::bit_cast<float>(u);
    }
    return true;
}

} // namespace

void save_store(const VectorStore& store, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open store file for writing: " + path.string());

    json header = {
        {"version", kFormatVersion},
        {"claim_id", store.claim_id()},
        {"dim", store.dim()},
        {"count", store.size()},
    };
    std::string hs = header.dump();
    out.write(kMagic, 4);
    write_u32(out, static_cast<std::uint32_t>(hs.size()));
    out.write(hs.data(), static_cast<std::streamsize>(hs.size()));

    for (std::size_t i = 0; i < store.size(); ++i) {
        const Chunk& c = store.chunk(i);
        json meta = {
            {"url", c.doc_url},     {"index", c.index},
            {"text", c.text},       {"before", c.context_before},
            {"after", c.context_after},
        };
        std::string ms = meta.dump();
        write_u32(out, static_cast<std::uint32_t>(ms.size()));
        out.write(ms.data(), static_cast<std::streamsize>(ms.size()));
        write_f32_le(out, store.vec(i));
    }
    if (!out)
        throw IoError("short write to store file: " + path.string());
}

VectorStore load_store(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open store file: " + path.string());

    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("not a vector store file: " + path.string());
    std::uint32_t hlen;
    if (!read_u32(in, hlen))
        throw FormatError("truncated store header: " + path.string());
    std::string hs(hlen, '\0');
    if (!in.read(hs.data(), hlen))
        throw FormatError("truncated store header: " + path.string());

    json header;
    try {
        header = json::parse(hs);
    } catch (const json::exception& e) {
        throw FormatError("bad store header: " + std::string(e.what()));
    }
    if (!header.contains("version") || header["version"] != kFormatVersion)
        throw FormatError("unsupported store format version in " + path.string());

    std::string claim_id = header.value("claim_id", "");
    std::size_t dim = header.value("dim", std::size_t{0});
    std::size_t count = header.value("count", std::size_t{0});

    VectorStore store(claim_id, dim);
    std::vector<float> vec(dim);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t mlen;
        if (!read_u32(in, mlen))
            throw FormatError("truncated store entry in " + path.string());
        std::string ms(mlen, '\0');
        if (!in.read(ms.data(), mlen))
            throw FormatError("truncated store entry in " + path.string());
        json meta;
        try {
            meta = json::parse(ms);
        } catch (const json::exception& e) {
            throw FormatError("bad entry metadata: " + std::string(e.what()));
        }
        Chunk c;
        c.doc_url = meta.value("url", "");
        c.index = meta.value("index", std::size_t{0});
        c.text = meta.value("text", "");
        c.context_before = meta.value("before", "");
        c.context_after = meta.value("after", "");
        if (!read_f32_le(in, vec))
            throw FormatError("truncated vector data in " + path.string());
        store.add(std::move(c), vec);
    }
    // Anything after the last entry means the file does not match its header.
    if (in.peek() != std::ifstream::traits_type::eof())
        throw FormatError("trailing bytes in store file: " + path.string());
    return store;
}

} // namespace imgfact
