#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "imgfact/config.hpp"
#include "imgfact/money.hpp"

namespace imgfact {

// Per-claim billing record. total is always the exact decimal sum of the
// three components.
struct CostEntry {
    std::string claim_id;
    long ris_searches = 0;
    long scraped_pages = 0;
    long input_tokens = 0;
    long output_tokens = 0;
    Money ris_usd;
    Money scrape_usd;
    Money llm_usd;
    Money total;
};

CostEntry make_cost_entry(const std::string& claim_id, long ris_searches,
                          long scraped_pages, long input_tokens,
                          long output_tokens, const PriceTable& prices);

nlohmann::json cost_entry_to_json(const CostEntry& e);
CostEntry cost_entry_from_json(const nlohmann::json& j);

struct CostAggregate {
    long claims = 0;
    long ris_searches = 0;
    long scraped_pages = 0;
    long input_tokens = 0;
    long output_tokens = 0;
    Money ris_usd;
    Money scrape_usd;
    Money llm_usd;
    Money total;                  // exact sum over entries
    Money llm_usd_discounted;     // informational, floor rounding
    Money total_discounted;
};

// Thread-safe accumulator, persisted as JSON lines.
class CostLedger {
public:
    void add(CostEntry entry);
    std::vector<CostEntry> entries() const;
    CostAggregate aggregate(int llm_discount_percent = 0) const;

    void save_jsonl(const std::filesystem::path& path) const;
    static std::vector<CostEntry> load_jsonl(const std::filesystem::path& path);

private:
    mutable std::mutex mu_;
    std::vector<CostEntry> entries_;
};

CostAggregate aggregate_entries(const std::vector<CostEntry>& entries,
                                int llm_discount_percent = 0);

} // namespace imgfact
