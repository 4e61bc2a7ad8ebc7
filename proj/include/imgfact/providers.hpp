#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "imgfact/dates.hpp"
#include "imgfact/errors.hpp"
#include "imgfact/types.hpp"

namespace imgfact {

// ---------------------------------------------------------------------------
// Reverse image search

struct RISResult {
    std::string url;           // web page containing a similar image
    std::string thumbnail_url; // the matched image on that page
    std::string title;         // may be empty
    int rank = 0;              // provider order, unique per search
};

// Lens-style reverse image search. Empty result lists are a legitimate
// outcome, distinct from ProviderError.
class RisProvider {
public:
    virtual ~RisProvider() = default;
    virtual std::vector<RISResult> search(const ClaimImage& image) = 0;
};

// ---------------------------------------------------------------------------
// Page scraping

// markdown == "" signals a scraping-protected or empty page, a discard
// signal rather than an error. raw_html is kept when the backend provides
// it so publication dates can be estimated from the original markup.
struct ScrapedPage {
    std::string markdown;
    std::string raw_html;
};

class ScrapeProvider {
public:
    virtual ~ScrapeProvider() = default;
    virtual ScrapedPage scrape(const std::string& url) = 0;
};

// ---------------------------------------------------------------------------
// Publication dates

class DateProvider {
public:
    virtual ~DateProvider() = default;
    virtual std::optional<Date> estimate(const std::string& url,
                                         std::string_view raw_page) = 0;
};

// ---------------------------------------------------------------------------
// Thumbnails

struct Thumb {
    std::vector<std::uint8_t> bytes;
    std::string media_type;

    bool operator==(const Thumb&) const = default;
};

class ThumbFetcher {
public:
    virtual ~ThumbFetcher() = default;
    // Throws ThumbFetchError; callers degrade to evidence without an image.
    virtual Thumb fetch(const std::string& url) = 0;
};

// ---------------------------------------------------------------------------
// Multimodal LLM

struct LlmUserPart {
    enum class Kind { Text, Image };
    Kind kind = Kind::Text;
    std::string text;       // Text parts
    std::string image_b64;  // Image parts, standard base64
    std::string media_type; // Image parts
};

struct LlmResponse {
    std::string text;
    long input_tokens = 0;
    long output_tokens = 0;
};

// Chat-completion style multimodal API: one system prompt plus an ordered
// multipart user message. request_id identifies the claim for batch demux
// and replay lookup. Implementations must tolerate concurrent calls.
class LlmProvider {
public:
    virtual ~LlmProvider() = default;
    virtual LlmResponse complete(const std::string& request_id,
                                 const std::string& system_prompt,
                                 const std::vector<LlmUserPart>& parts) = 0;
};

// ---------------------------------------------------------------------------
// Configuration & factories

struct RisConfig {
    std::string endpoint; // e.g. "https://host/lens"
    std::string api_key_env = "IMGFACT_RIS_API_KEY";
    std::size_t max_results = 30;
    int timeout_s = 30;
};

struct ScrapeConfig {
    std::string endpoint; // scraping API; empty -> built-in fetch+readability
    std::string api_key_env = "IMGFACT_SCRAPE_API_KEY";
    int timeout_s = 60;
};

struct LlmConfig {
    std::string model = "gpt-5.1";
    std::string endpoint; // e.g. "https://api.host" ( /v1/chat/completions )
    std::string api_key_env = "IMGFACT_LLM_API_KEY";
    long max_output_tokens = 4096;
    int timeout_s = 300;
};

std::unique_ptr<RisProvider> make_http_ris_provider(const RisConfig& cfg);
std::unique_ptr<ScrapeProvider> make_http_scrape_provider(const ScrapeConfig& cfg);
// GET + readability conversion, no external service.
std::unique_ptr<ScrapeProvider> make_builtin_scrape_provider(int timeout_s = 30);
// Local heuristics over the raw page.
std::unique_ptr<DateProvider> make_heuristic_date_provider();
std::unique_ptr<ThumbFetcher> make_http_thumb_fetcher(int timeout_s = 30);
std::unique_ptr<LlmProvider> make_http_llm_provider(const LlmConfig& cfg);

// Replay providers read recorded JSON fixtures; see the fixture layout in
// the README. Unknown keys raise ProviderError (not retryable).
std::unique_ptr<RisProvider>
make_replay_ris_provider(const std::filesystem::path& json_file);
std::unique_ptr<ScrapeProvider>
make_replay_scrape_provider(const std::filesystem::path& json_file);
std::unique_ptr<DateProvider>
make_replay_date_provider(const std::filesystem::path& json_file);
std::unique_ptr<ThumbFetcher>
make_replay_thumb_fetcher(const std::filesystem::path& json_file);
std::unique_ptr<LlmProvider>
make_replay_llm_provider(const std::filesystem::path& json_file);

// ---------------------------------------------------------------------------
// Retry policy for transient provider failures

struct RetryPolicy {
    int max_attempts = 3;
    int base_delay_ms = 250; // doubled after each retryable failure
    // injectable for tests; defaults to a real sleep
    std::function<void(int)> sleeper;
};

// Runs fn, retrying on retryable ProviderError with exponential backoff.
// Rethrows the last error when attempts are exhausted; fatal errors
// propagate immediately.
template <typename Fn>
auto with_retries(const RetryPolicy& policy, Fn&& fn) -> decltype(fn());

void default_sleep_ms(int ms);

template <typename Fn>
auto with_retries(const RetryPolicy& policy, Fn&& fn) -> decltype(fn()) {
    int delay = policy.base_delay_ms;
    int attempts = policy.max_attempts > 0 ? policy.max_attempts : 1;
    for (int attempt = 1;; ++attempt) {
        try {
            return fn();
        } catch (const ProviderError& e) {
            if (!e.retryable() || attempt >= attempts)
                throw;
            if (policy.sleeper)
                policy.sleeper(delay);
            else
                default_sleep_ms(delay);
            delay *= 2;
        }
    }
}

} // namespace imgfact
