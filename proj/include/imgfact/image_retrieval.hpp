#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "imgfact/providers.hpp"
#include "imgfact/types.hpp"

namespace imgfact {

// One scraped RIS hit for a specific claim image. markdown is non-empty;
// page_date, when known, is not after the claim date (both enforced by
// filter_and_cap).
struct ImageSource {
    RISResult ris;
    std::string markdown;
    std::optional<Date> page_date;
    int image_index = 0; // 1-based claim image this contextualizes
};

struct ImageSourceSet {
    int image_index = 0;
    std::vector<ImageSource> sources; // <= cap, in RIS rank order
};

// A scraped candidate before filtering.
struct ScrapedCandidate {
    RISResult ris;
    std::string markdown;
    std::optional<Date> page_date;
};

// Drops empty-markdown entries and entries dated strictly after the claim;
// undated entries are kept. Keeps RIS order, truncates to cap.
ImageSourceSet filter_and_cap(const std::vector<ScrapedCandidate>& results,
                              const Date& claim_date, int image_index,
                              std::size_t cap = 9);

struct ImageRetrievalOptions {
    std::size_t cap = 9;
    std::size_t max_ris_results = 30;
    int scrape_permits = 4; // concurrent scrapes, global across images
    RetryPolicy retry;
};

struct ImageRetrievalOutcome {
    std::vector<ImageSourceSet> sets; // one per claim image, index order
    std::vector<std::string> errors;  // per-image provider failures
    long ris_searches = 0;            // completed searches (billable)
    long scraped_pages = 0;           // scrape calls made (billable)
};

// Runs the RIS -> scrape -> date -> filter chain for every claim image.
// Images are processed concurrently; scraping proceeds through ranked
// waves sized by the permit count and stops scheduling once `cap`
// survivors exist, so at most one wave is scraped beyond the need. A
// failing image contributes an empty set and an error record without
// aborting the others.
ImageRetrievalOutcome retrieve_image_sources(const Claim& claim,
                                             RisProvider& ris,
                                             ScrapeProvider& scraper,
                                             DateProvider& dater,
                                             const ImageRetrievalOptions& opts = {});

// URL-keyed cache so each cited thumbnail is fetched once per run.
class ThumbnailCache {
public:
    // Fetches through `fetcher` on miss; rethrows ThumbFetchError.
    Thumb get(const std::string& url, ThumbFetcher& fetcher);
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::map<std::string, Thumb> cache_;
};

} // namespace imgfact
