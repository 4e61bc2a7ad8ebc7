// Replay providers serve recorded responses from JSON fixtures so the whole
// pipeline runs offline and deterministically. Fixture layout:
//
//   embeddings.json  {"<text>": [floats], ...}
//   ris.json         {"<image url or path>": [{"link","thumbnail","title"}]}
//   scrape.json      {"<url>": "<markdown>"} or {"<url>": {"markdown","raw_html"}}
//   dates.json       {"<url>": "YYYY-MM-DD" | null}
//   thumbs.json      {"<url>": {"media_type","b64"}}
//   llm.json         {"<claim_id>": {"text","input_tokens","output_tokens"}}

#include <fstream>
#include <mutex>

#include <json.hpp>

#include "imgfact/base64.hpp"
#include "imgfact/embedding.hpp"
#include "imgfact/errors.hpp"
#include "imgfact/providers.hpp"

namespace imgfact {

using nlohmann::json;

namespace {

json load_fixture(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in)
        throw IoError(std::string(what) + " fixture missing: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(std::string(what) + " fixture is not valid JSON: " +
                          e.what());
    }
}

class ReplayEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit ReplayEmbeddingProvider(const std::filesystem::path& path)
        : table_(load_fixture(path, "embeddings")) {}

    std::vector<std::vector<float>>
    embed(const std::vector<std::string>& texts) override {
        std::vector<std::vector<float>> out;
        out.reserve(texts.size());
        for (const auto& t : texts) {
            auto it = table_.find(t);
            if (it == table_.end())
                throw EmbeddingError(
                    "replay: no recorded embedding for text of length " +
                    std::to_string(t.size()) + " starting \"" +
                    t.substr(0, 40) + "\"");
            out.push_back(it->get<std::vector<float>>());
        }
        return out;
    }

    std::string model() const override { return "replay"; }

private:
    json table_;
};

class ReplayRisProvider final : public RisProvider {
public:
    explicit ReplayRisProvider(const std::filesystem::path& path)
        : table_(load_fixture(path, "ris")) {}

    std::vector<RISResult> search(const ClaimImage& image) override {
        const std::string& key = !image.url.empty() ? image.url : image.path;
        auto it = table_.find(key);
        if (it == table_.end())
            throw ProviderError("replay: no recorded RIS result for " + key,
                                false);
        std::vector<RISResult> out;
        int rank = 1;
        for (const auto& item : *it) {
            RISResult r;
            r.url = item.value("link", "");
            r.thumbnail_url = item.value("thumbnail", "");
            r.title = item.value("title", "");
            r.rank = item.value("position", rank);
            out.push_back(std::move(r));
            ++rank;
        }
        return out;
    }

private:
    json table_;
};

class ReplayScrapeProvider final : public ScrapeProvider {
public:
    explicit ReplayScrapeProvider(const std::filesystem::path& path)
        : table_(load_fixture(path, "scrape")) {}

    ScrapedPage scrape(const std::string& url) override {
        auto it = table_.find(url);
        if (it == table_.end())
            throw ProviderError("replay: no recorded scrape for " + url,
                                false);
        ScrapedPage page;
        if (it->is_string()) {
            page.markdown = it->get<std::string>();
        } else {
            page.markdown = it->value("markdown", "");
            page.raw_html = it->value("raw_html", "");
        }
        return page;
    }

private:
    json table_;
};

class ReplayDateProvider final : public DateProvider {
public:
    explicit ReplayDateProvider(const std::filesystem::path& path)
        : table_(load_fixture(path, "dates")) {}

    std::optional<Date> estimate(const std::string& url,
                                 std::string_view) override {
        auto it = table_.find(url);
        if (it == table_.end() || it->is_null())
            return std::nullopt;
        return parse_iso_date(it->get<std::string>());
    }

private:
    json table_;
};

class ReplayThumbFetcher final : public ThumbFetcher {
public:
    explicit ReplayThumbFetcher(const std::filesystem::path& path)
        : table_(load_fixture(path, "thumbs")) {}

    Thumb fetch(const std::string& url) override {
        auto it = table_.find(url);
        if (it == table_.end())
            throw ThumbFetchError("replay: no recorded thumbnail for " + url);
        Thumb t;
        t.media_type = it->value("media_type", "image/jpeg");
        t.bytes = base64_decode(it->value("b64", ""));
        return t;
    }

private:
    json table_;
};

class ReplayLlmProvider final : public LlmProvider {
public:
    explicit ReplayLlmProvider(const std::filesystem::path& path)
        : table_(load_fixture(path, "llm")) {}

    LlmResponse complete(const std::string& request_id, const std::string&,
                         const std::vector<LlmUserPart>&) override {
        auto it = table_.find(request_id);
        if (it == table_.end())
            throw ProviderError("replay: no recorded LLM response for " +
                                    request_id,
                                false);
        LlmResponse r;
        r.text = it->value("text", "");
        r.input_tokens = it->value("input_tokens", 0L);
        r.output_tokens = it->value("output_tokens", 0L);
        return r;
    }

private:
    json table_;
};

} // namespace

std::unique_ptr<EmbeddingProvider>
make_replay_embedding_provider(const std::filesystem::path& json_file) {
    return std::make_unique<ReplayEmbeddingProvider>(json_file);
}

std::unique_ptr<RisProvider>
make_replay_ris_provider(const std::filesystem::path& json_file) {
    return std::make_unique<ReplayRisProvider>(json_file);
}

std::unique_ptr<ScrapeProvider>
make_replay_scrape_provider(const std::filesystem::path& json_file) {
    return std::make_unique<ReplayScrapeProvider>(json_file);
}

std::unique_ptr<DateProvider>
make_replay_date_provider(const std::filesystem::path& json_file) {
    return std::make_unique<ReplayDateProvider>(json_file);
}

std::unique_ptr<ThumbFetcher>
make_replay_thumb_fetcher(const std::filesystem::path& json_file) {
    return std::make_unique<ReplayThumbFetcher>(json_file);
}

std::unique_ptr<LlmProvider>
make_replay_llm_provider(const std::filesystem::path& json_file) {
    return std::make_unique<ReplayLlmProvider>(json_file);
}

} // namespace imgfact
