// Live HTTP clients for every external service the pipeline talks to.
// All of them are replaceable by the replay providers for offline runs.

#include <chrono>
#include <cstdlib>
#include <thread>

#ifdef IMGFACT_USE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <json.hpp>

#include "imgfact/base64.hpp"
#include "imgfact/datefind.hpp"
#include "imgfact/embedding.hpp"
#include "imgfact/errors.hpp"
#include "imgfact/htmlmd.hpp"
#include "imgfact/providers.hpp"

namespace imgfact {

using nlohmann::json;

void default_sleep_ms(int ms) {
    std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

namespace {

struct UrlParts {
    std::string origin;      // scheme://host[:port]
    std::string path_query;  // /path?query
};

UrlParts split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ProviderError("malformed URL: " + url, false);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

// endpoint may or may not carry the API path already
std::string with_suffix(std::string path, const std::string& suffix) {
    if (path.size() >= suffix.size() &&
        path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0)
        return path;
    if (path == "/")
        return suffix;
    if (!path.empty() && path.back() == '/')
        path.pop_back();
    return path + suffix;
}

std::string env_or_empty(const std::string& var) {
    if (var.empty())
        return "";
    const char* v = std::getenv(var.c_str());
    return v ? v : "";
}

std::string require_env(const std::string& var) {
    std::string v = env_or_empty(var);
    if (v.empty())
        throw ProviderError("environment variable " + var + " is not set",
                            false);
    return v;
}

bool retryable_status(int status) {
    return status == 408 || status == 429 || status >= 500;
}

// One POST with JSON body; classifies transport and HTTP failures.
json post_json(const std::string& origin, const std::string& path,
               const httplib::Headers& headers, const json& body,
               int timeout_s, const char* what) {
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_s);
    client.set_read_timeout(timeout_s);
    client.set_follow_location(true);
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res)
        throw ProviderError(std::string(what) + ": transport failure (" +
                                httplib::to_string(res.error()) + ")",
                            true);
    if (res->status < 200 || res->status >= 300) {
        bool retry = retryable_status(res->status);
        throw ProviderError(std::string(what) + ": HTTP " +
                                std::to_string(res->status) + " " +
                                res->body.substr(0, 200),
                            retry);
    }
    try {
        return json::parse(res->body);
    } catch (const json::exception& e) {
        throw ProviderError(std::string(what) + ": bad JSON in response: " +
                                e.what(),
                            false);
    }
}

// ---------------------------------------------------------------------------

class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(EmbeddingConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.endpoint.empty())
            throw ConfigError("embedding endpoint is not configured");
    }

    std::vector<std::vector<float>>
    embed(const std::vector<std::string>& texts) override {
        if (texts.empty())
            return {};
        json body = {{"model", cfg_.model}, {"input", texts}};
        httplib::Headers headers;
        std::string key = env_or_empty(cfg_.api_key_env);
        if (!key.empty())
            headers.emplace("Authorization", "Bearer " + key);
        auto parts = split_url(cfg_.endpoint);
        json res;
        try {
            res = post_json(parts.origin,
                            with_suffix(parts.path_query, "/v1/embeddings"),
                            headers, body, cfg_.timeout_s, "embeddings");
        } catch (const ProviderError& e) {
            throw EmbeddingError(e.what());
        }
        if (!res.contains("data") || !res["data"].is_array())
            throw EmbeddingError("embeddings: response carries no data array");
        std::vector<std::vector<float>> out;
        for (const auto& item : res["data"]) {
            if (!item.contains("embedding"))
                throw EmbeddingError("embeddings: entry without vector");
            out.push_back(item["embedding"].get<std::vector<float>>());
        }
        return out;
    }

    std::string model() const override { return cfg_.model; }

private:
    EmbeddingConfig cfg_;
};

// ---------------------------------------------------------------------------

class HttpRisProvider final : public RisProvider {
public:
    explicit HttpRisProvider(RisConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.endpoint.empty())
            throw ConfigError("RIS endpoint is not configured");
    }

    std::vector<RISResult> search(const ClaimImage& image) override {
        if (image.url.empty())
            throw ProviderError(
                "reverse image search needs a public image URL", false);
        httplib::Headers headers{{"X-API-KEY", require_env(cfg_.api_key_env)}};
        auto parts = split_url(cfg_.endpoint);
        json res = post_json(parts.origin, parts.path_query, headers,
                             json{{"url", image.url}}, cfg_.timeout_s, "ris");

        // Accept either {"results": [...]} or the {"organic": [...]} shape
        // common among search APIs
        const json* items = nullptr;
        if (res.contains("results") && res["results"].is_array())
            items = &res["results"];
        else if (res.contains("organic") && res["organic"].is_array())
            items = &res["organic"];
        else
            throw ProviderError("ris: response has no result list", false);

        std::vector<RISResult> out;
        int rank = 1;
        for (const auto& item : *items) {
            RISResult r;
            r.url = item.value("link", item.value("url", ""));
            r.thumbnail_url =
                item.value("thumbnail", item.value("thumbnailUrl", ""));
            r.title = item.value("title", "");
            r.rank = item.value("position", rank);
            if (r.url.empty())
                continue;
            out.push_back(std::move(r));
            ++rank;
            if (out.size() >= cfg_.max_results)
                break;
        }
        return out;
    }

private:
    RisConfig cfg_;
};

// ---------------------------------------------------------------------------

class HttpScrapeProvider final : public ScrapeProvider {
public:
    explicit HttpScrapeProvider(ScrapeConfig cfg) : cfg_(std::move(cfg)) {}

    ScrapedPage scrape(const std::string& url) override {
        httplib::Headers headers{
            {"Authorization", "Bearer " + require_env(cfg_.api_key_env)}};
        auto parts = split_url(cfg_.endpoint);
        json body = {{"url", url}, {"formats", json::array({"markdown", "rawHtml"})}};
        json res;
        try {
            res = post_json(parts.origin, parts.path_query, headers, body,
                            cfg_.timeout_s, "scrape");
        } catch (const ProviderError& e) {
            // Scraping-protected pages surface as 403 from the backend; that
            // is a discard signal, not a pipeline failure.
            if (std::string(e.what()).find("HTTP 403") != std::string::npos)
                return {};
            throw;
        }
        ScrapedPage page;
        const json& data = res.contains("data") ? res["data"] : res;
        page.markdown = data.value("markdown", "");
        page.raw_html = data.value("rawHtml", data.value("html", ""));
        return page;
    }

private:
    ScrapeConfig cfg_;
};

// Plain fetch plus readability-style conversion; the free alternative.
class BuiltinScrapeProvider final : public ScrapeProvider {
public:
    explicit BuiltinScrapeProvider(int timeout_s) : timeout_s_(timeout_s) {}

    ScrapedPage scrape(const std::string& url) override {
        auto parts = split_url(url);
        httplib::Client client(parts.origin);
        client.set_connection_timeout(timeout_s_);
        client.set_read_timeout(timeout_s_);
        client.set_follow_location(true);
        auto res = client.Get(parts.path_query);
        if (!res)
            throw ProviderError("scrape: transport failure for " + url, true);
        if (res->status == 403 || res->status == 451)
            return {}; // protected page -> discard signal
        if (res->status < 200 || res->status >= 300)
            throw ProviderError("scrape: HTTP " + std::to_string(res->status) +
                                    " for " + url,
                                retryable_status(res->status));
        ScrapedPage page;
        page.raw_html = res->body;
        page.markdown = html_to_markdown(page.raw_html);
        return page;
    }

private:
    int timeout_s_;
};

// ---------------------------------------------------------------------------

class HeuristicDateProvider final : public DateProvider {
public:
    std::optional<Date> estimate(const std::string& url,
                                 std::string_view raw_page) override {
        return find_publication_date(url, raw_page);
    }
};

// ---------------------------------------------------------------------------

class HttpThumbFetcher final : public ThumbFetcher {
public:
    explicit HttpThumbFetcher(int timeout_s) : timeout_s_(timeout_s) {}

    Thumb fetch(const std::string& url) override {
        UrlParts parts;
        try {
            parts = split_url(url);
        } catch (const ProviderError& e) {
            throw ThumbFetchError(e.what());
        }
        httplib::Client client(parts.origin);
        client.set_connection_timeout(timeout_s_);
        client.set_read_timeout(timeout_s_);
        client.set_follow_location(true);
        auto res = client.Get(parts.path_query);
        if (!res || res->status < 200 || res->status >= 300)
            throw ThumbFetchError("thumbnail fetch failed for " + url);
        Thumb t;
        t.bytes.assign(res->body.begin(), res->body.end());
        auto it = res->headers.find("Content-Type");
        t.media_type = it != res->headers.end() ? it->second : "image/jpeg";
        if (auto semi = t.media_type.find(';'); semi != std::string::npos)
            t.media_type = t.media_type.substr(0, semi);
        return t;
    }

private:
    int timeout_s_;
};

// ---------------------------------------------------------------------------

class HttpLlmProvider final : public LlmProvider {
public:
    explicit HttpLlmProvider(LlmConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.endpoint.empty())
            throw ConfigError("LLM endpoint is not configured");
    }

    LlmResponse complete(const std::string& request_id,
                         const std::string& system_prompt,
                         const std::vector<LlmUserPart>& parts) override {
        json content = json::array();
        for (const auto& part : parts) {
            if (part.kind == LlmUserPart::Kind::Text) {
                content.push_back({{"type", "text"}, {"text", part.text}});
            } else {
                content.push_back(
                    {{"type", "image_url"},
                     {"image_url",
                      {{"url", "data:" + part.media_type + ";base64," +
                                   part.image_b64}}}});
            }
        }
        json body = {
            {"model", cfg_.model},
            {"messages",
             json::array({json{{"role", "system"}, {"content", system_prompt}},
                          json{{"role", "user"}, {"content", content}}})},
            {"max_completion_tokens", cfg_.max_output_tokens},
            {"user", request_id},
        };
        httplib::Headers headers{
            {"Authorization", "Bearer " + require_env(cfg_.api_key_env)}};
        auto parts_url = split_url(cfg_.endpoint);
        json res;
        try {
            res = post_json(parts_url.origin,
                            with_suffix(parts_url.path_query,
                                        "/v1/chat/completions"),
                            headers, body, cfg_.timeout_s, "llm");
        } catch (const ProviderError& e) {
            std::string msg = e.what();
            if (msg.find("context_length") != std::string::npos ||
                msg.find("maximum context") != std::string::npos)
                throw ContextOverflow(msg);
            throw;
        }
        LlmResponse out;
        try {
            out.text = res.at("choices").at(0).at("message").at("content");
        } catch (const json::exception&) {
            throw ProviderError("llm: response carries no message content",
                                false);
        }
        if (res.contains("usage")) {
            out.input_tokens = res["usage"].value("prompt_tokens", 0L);
            out.output_tokens = res["usage"].value("completion_tokens", 0L);
        }
        return out;
    }

private:
    LlmConfig cfg_;
};

} // namespace

std::unique_ptr<EmbeddingProvider>
make_http_embedding_provider(const EmbeddingConfig& cfg) {
    return std::make_unique<HttpEmbeddingProvider>(cfg);
}

std::unique_ptr<RisProvider> make_http_ris_provider(const RisConfig& cfg) {
    return std::make_unique<HttpRisProvider>(cfg);
}

std::unique_ptr<ScrapeProvider>
make_http_scrape_provider(const ScrapeConfig& cfg) {
    return std::make_unique<HttpScrapeProvider>(cfg);
}

std::unique_ptr<ScrapeProvider> make_builtin_scrape_provider(int timeout_s) {
    return std::make_unique<BuiltinScrapeProvider>(timeout_s);
}

std::unique_ptr<DateProvider> make_heuristic_date_provider() {
    return std::make_unique<HeuristicDateProvider>();
}

std::unique_ptr<ThumbFetcher> make_http_thumb_fetcher(int timeout_s) {
    return std::make_unique<HttpThumbFetcher>(timeout_s);
}

std::unique_ptr<LlmProvider> make_http_llm_provider(const LlmConfig& cfg) {
    return std::make_unique<HttpLlmProvider>(cfg);
}

} // namespace imgfact
