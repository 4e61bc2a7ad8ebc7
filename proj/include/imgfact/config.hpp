#pragma once

#include <filesystem>
#include <string>

#include "imgfact/bm25.hpp"
#include "imgfact/embedding.hpp"
#include "imgfact/money.hpp"
#include "imgfact/providers.hpp"
#include "imgfact/retrieval.hpp"
#include "imgfact/store.hpp"
#include "imgfact/types.hpp"

namespace imgfact {

struct PriceTable {
    Money ris_per_search = Money::parse("0.003");
    Money scrape_per_page = Money::parse("0.006");
    // No baked-in model pricing: both token prices must come from config.
    Money llm_input_per_token;
    Money llm_output_per_token;
    // informational percentage applied to LLM costs in reports (batch
    // discounts); raw totals stay exact
    int llm_discount_percent = 0;
};

struct PipelineConfig {
    // datasets
    std::filesystem::path claims_path;
    std::filesystem::path train_path;
    std::filesystem::path knowledge_store_dir; // <claim_id>.jsonl files
    std::filesystem::path store_dir;           // <claim_id>.vstore files
    std::filesystem::path out_dir;

    // prompt assets
    std::filesystem::path template_qa_path;
    std::filesystem::path template_declarative_path;

    ChunkingParams chunking;
    RetrievalParams retrieval;
    Bm25Params bm25;
    std::size_t fewshot_claims = 3;

    std::size_t image_cap = 9;
    std::size_t max_ris_results = 30;
    std::size_t max_source_chars = 6000;

    EvidenceFormatMode mode = EvidenceFormatMode::QuestionPlusAnswer;

    PriceTable prices;

    std::size_t parallelism = 2; // concurrent claims
    int scrape_permits = 4;
    int retry_max_attempts = 3;
    int retry_base_delay_ms = 250;

    EmbeddingConfig embedding;
    RisConfig ris;
    ScrapeConfig scrape;
    LlmConfig llm;

    // Relative paths in the file resolve against its directory.
    // Throws ConfigError / IoError / FormatError.
    static PipelineConfig load(const std::filesystem::path& path);

    void validate() const; // throws ConfigError
};

} // namespace imgfact
