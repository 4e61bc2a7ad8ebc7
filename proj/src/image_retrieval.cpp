#include "imgfact/image_retrieval.hpp"

#include <condition_variable>
#include <future>

#include "imgfact/errors.hpp"

namespace imgfact {

namespace {

// Minimal counting semaphore; keeps the scrape fan-out bounded.
class Permits {
public:
    explicit Permits(int n) : count_(n > 0 ? n : 1) {}

    void acquire() {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return count_ > 0; });
        --count_;
    }
    void release() {
        {
            std::lock_guard lock(mu_);
            ++count_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int count_;
};

struct PermitGuard {
    Permits& permits;
    explicit PermitGuard(Permits& p) : permits(p) { permits.acquire(); }
    ~PermitGuard() { permits.release(); }
};

} // namespace

ImageSourceSet filter_and_cap(const std::vector<ScrapedCandidate>& results,
                              const Date& claim_date, int image_index,
                              std::size_t cap) {
    if (cap < 1)
        throw ConfigError("filter_and_cap: cap must be >= 1");
    ImageSourceSet set;
    set.image_index = image_index;
    for (const auto& cand : results) {
        if (cand.markdown.empty())
            continue;
        // strict inequality: same-day evidence stays
        if (cand.page_date && *cand.page_date > claim_date)
            continue;
        set.sources.push_back(
            ImageSource{cand.ris, cand.markdown, cand.page_date, image_index});
        if (set.sources.size() >= cap)
            break;
    }
    return set;
}

ImageRetrievalOutcome retrieve_image_sources(const Claim& claim,
                                             RisProvider& ris,
                                             ScrapeProvider& scraper,
                                             DateProvider& dater,
                                             const ImageRetrievalOptions& opts) {
    ImageRetrievalOutcome outcome;
    if (claim.images.empty())
        return outcome;

    Permits permits(opts.scrape_permits);
    std::mutex mu; // guards the counters and error list

    struct PerImage {
        ImageSourceSet set;
        std::optional<std::string> error;
    };

    auto process_image = [&](int image_index) -> PerImage {
        PerImage result;
        result.set.image_index = image_index;
        const ClaimImage& image =
            claim.images[static_cast<std::size_t>(image_index - 1)];

        std::vector<RISResult> hits;
        try {
            hits = with_retries(opts.retry, [&] { return ris.search(image); });
            {
                std::lock_guard lock(mu);
                ++outcome.ris_searches;
            }
        } catch (const ProviderError& e) {
            result.error = "image " + std::to_string(image_index) +
                           ": ris: " + e.what();
            return result;
        }
        if (hits.size() > opts.max_ris_results)
            hits.resize(opts.max_ris_results);

        // Ranked waves: scrape up to `permits` candidates concurrently,
        // evaluate in rank order, stop once `cap` survivors exist. Bounded
        // overshoot of one wave keeps per-page charges near the minimum.
        std::vector<ScrapedCandidate> candidates;
        std::size_t survivors = 0;
        std::size_t wave =
            static_cast<std::size_t>(opts.scrape_permits > 0
                                         ? opts.scrape_permits
                                         : 1);
        for (std::size_t at = 0;
             at < hits.size() && survivors < opts.cap; at += wave) {
            std::size_t n = std::min(wave, hits.size() - at);
            std::vector<std::future<ScrapedCandidate>> futures;
            futures.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
                const RISResult& hit = hits[at + i];
                futures.push_back(std::async(std::launch::async, [&, hit] {
                    PermitGuard guard(permits);
                    ScrapedPage page = with_retries(
                        opts.retry, [&] { return scraper.scrape(hit.url); });
                    {
                        std::lock_guard lock(mu);
                        ++outcome.scraped_pages;
                    }
                    ScrapedCandidate cand;
                    cand.ris = hit;
                    cand.markdown = page.markdown;
                    std::string_view date_input = !page.raw_html.empty()
                                                      ? page.raw_html
                                                      : page.markdown;
                    cand.page_date = dater.estimate(hit.url, date_input);
                    return cand;
                }));
            }
            for (auto& f : futures) {
                try {
                    ScrapedCandidate cand = f.get();
                    bool keep = !cand.markdown.empty() &&
                                !(cand.page_date &&
                                  *cand.page_date > claim.date);
                    if (keep)
                        ++survivors;
                    candidates.push_back(std::move(cand));
                } catch (const ProviderError& e) {
                    std::lock_guard lock(mu);
                    outcome.errors.push_back(
                        "image " + std::to_string(image_index) +
                        ": scrape: " + e.what());
                }
            }
        }
        result.set = filter_and_cap(candidates, claim.date, image_index,
                                    opts.cap);
        return result;
    };

    std::vector<std::future<PerImage>> image_futures;
    image_futures.reserve(claim.images.size());
    for (std::size_t i = 0; i < claim.images.size(); ++i)
        image_futures.push_back(std::async(
            std::launch::async, process_image, static_cast<int>(i + 1)));

    for (auto& f : image_futures) {
        PerImage r = f.get();
        if (r.error) {
            std::lock_guard lock(mu);
            outcome.errors.push_back(*r.error);
        }
        outcome.sets.push_back(std::move(r.set));
    }
    return outcome;
}

Thumb ThumbnailCache::get(const std::string& url, ThumbFetcher& fetcher) {
    {
        std::lock_guard lock(mu_);
        auto it = cache_.find(url);
        if (it != cache_.end())
            return it->second;
    }
    Thumb t = fetcher.fetch(url); // outside the lock; may be slow
    std::lock_guard lock(mu_);
    auto [it, _] = cache_.emplace(url, std::move(t));
    return it->second;
}

std::size_t ThumbnailCache::size() const {
    std::lock_guard lock(mu_);
    return cache_.size();
}

} // namespace imgfact
