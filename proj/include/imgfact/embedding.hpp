#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace imgfact {

// Text embedding service. Implementations must tolerate concurrent calls.
// Throws EmbeddingError when the backend fails or returns vectors of
// inconsistent dimension.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<std::vector<float>>
    embed(const std::vector<std::string>& texts) = 0;
    virtual std::string model() const = 0;
};

struct EmbeddingConfig {
    std::string model = "mxbai-embed-large-v1";
    std::string endpoint;                               // e.g. "https://host:port"
    std::string api_key_env = "IMGFACT_EMBED_API_KEY"; // name of the env var
    int timeout_s = 60;
};

// OpenAI-style /v1/embeddings client.
std::unique_ptr<EmbeddingProvider>
make_http_embedding_provider(const EmbeddingConfig& cfg);

// Replays recorded embeddings from a JSON object mapping text -> vector.
// Unknown texts raise EmbeddingError.
std::unique_ptr<EmbeddingProvider>
make_replay_embedding_provider(const std::filesystem::path& json_file);

} // namespace imgfact
