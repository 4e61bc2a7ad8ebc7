#include "imgfact/cost.hpp"

#include <algorithm>
#include <fstream>

#include "imgfact/errors.hpp"

namespace imgfact {

using nlohmann::json;

CostEntry make_cost_entry(const std::string& claim_id, long ris_searches,
                          long scraped_pages, long input_tokens,
                          long output_tokens, const PriceTable& prices) {
    CostEntry e;
    e.claim_id = claim_id;
    e.ris_searches = ris_searches;
    e.scraped_pages = scraped_pages;
    e.input_tokens = input_tokens;
    e.output_tokens = output_tokens;
    e.ris_usd = prices.ris_per_search.times(ris_searches);
    e.scrape_usd = prices.scrape_per_page.times(scraped_pages);
    e.llm_usd = prices.llm_input_per_token.times(input_tokens) +
                prices.llm_output_per_token.times(output_tokens);
    e.total = e.ris_usd + e.scrape_usd + e.llm_usd;
    return e;
}

json cost_entry_to_json(const CostEntry& e) {
    return json{
        {"claim_id", e.claim_id},
        {"ris_searches", e.ris_searches},
        {"scraped_pages", e.scraped_pages},
        {"input_tokens", e.input_tokens},
        {"output_tokens", e.output_tokens},
        {"ris_usd", e.ris_usd.str()},
        {"scrape_usd", e.scrape_usd.str()},
        {"llm_usd", e.llm_usd.str()},
        {"total_usd", e.total.str()},
    };
}

CostEntry cost_entry_from_json(const json& j) {
    CostEntry e;
    e.claim_id = j.value("claim_id", "");
    e.ris_searches = j.value("ris_searches", 0L);
    e.scraped_pages = j.value("scraped_pages", 0L);
    e.input_tokens = j.value("input_tokens", 0L);
    e.output_tokens = j.value("output_tokens", 0L);
    e.ris_usd = Money::parse(j.value("ris_usd", "0"));
    e.scrape_usd = Money::parse(j.value("scrape_usd", "0"));
    e.llm_usd = Money::parse(j.value("llm_usd", "0"));
    e.total = Money::parse(j.value("total_usd", "0"));
    return e;
}

void CostLedger::add(CostEntry entry) {
    std::lock_guard lock(mu_);
    entries_.push_back(std::move(entry));
}

std::vector<CostEntry> CostLedger::entries() const {
    std::lock_guard lock(mu_);
    return entries_;
}

CostAggregate CostLedger::aggregate(int llm_discount_percent) const {
    return aggregate_entries(entries(), llm_discount_percent);
}

CostAggregate aggregate_entries(const std::vector<CostEntry>& entries,
                                int llm_discount_percent) {
    CostAggregate agg;
    for (const auto& e : entries) {
        ++agg.claims;
        agg.ris_searches += e.ris_searches;
        agg.scraped_pages += e.scraped_pages;
        agg.input_tokens += e.input_tokens;
        agg.output_tokens += e.output_tokens;
        agg.ris_usd += e.ris_usd;
        agg.scrape_usd += e.scrape_usd;
        agg.llm_usd += e.llm_usd;
        agg.total += e.total;
    }
    int keep = 100 - llm_discount_percent;
    agg.llm_usd_discounted =
        Money::from_nanos(agg.llm_usd.nanos() * keep / 100);
    agg.total_discounted =
        agg.ris_usd + agg.scrape_usd + agg.llm_usd_discounted;
    return agg;
}

void CostLedger::save_jsonl(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot write ledger: " + path.string());
    auto snapshot = entries();
    std::sort(snapshot.begin(), snapshot.end(),
              [](const CostEntry& a, const CostEntry& b) {
                  return a.claim_id < b.claim_id;
              });
    for (const auto& e : snapshot)
        out << cost_entry_to_json(e).dump() << "\n";
}

std::vector<CostEntry> CostLedger::load_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open ledger: " + path.string());
    std::vector<CostEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        try {
            entries.push_back(cost_entry_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw FormatError("bad ledger line: " + std::string(e.what()));
        }
    }
    return entries;
}

} // namespace imgfact
