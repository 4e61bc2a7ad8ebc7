#include "imgfact/config.hpp"

#include <fstream>

#include <json.hpp>

#include "imgfact/errors.hpp"

namespace imgfact {

using nlohmann::json;

namespace {

Money parse_price(const json& v, const char* what) {
    if (v.is_string())
        return Money::parse(v.get<std::string>());
    if (v.is_number())
        return Money::from_double(v.get<double>());
    throw ConfigError(std::string("price ") + what +
                      " must be a decimal string or number");
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
    if (p.empty())
        return {};
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

} // namespace

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config: " + path.string());
    json doc;
    try {
        doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw FormatError("config is not valid JSON: " + std::string(e.what()));
    }

    PipelineConfig cfg;
    const auto base = path.parent_path();

    cfg.claims_path = resolve(base, doc.value("claims", ""));
    cfg.train_path = resolve(base, doc.value("train_set", ""));
    cfg.knowledge_store_dir = resolve(base, doc.value("knowledge_store_dir", ""));
    cfg.store_dir = resolve(base, doc.value("store_dir", ""));
    cfg.out_dir = resolve(base, doc.value("out_dir", "out"));
    cfg.template_qa_path =
        resolve(base, doc.value("template_qa", "assets/prompt_qa.v1.txt"));
    cfg.template_declarative_path = resolve(
        base,
        doc.value("template_declarative", "assets/prompt_declarative.v1.txt"));

    if (doc.contains("chunking")) {
        const auto& c = doc["chunking"];
        cfg.chunking.max_len = c.value("max_chars", cfg.chunking.max_len);
        cfg.chunking.context_window =
            c.value("context_window", cfg.chunking.context_window);
        cfg.chunking.embed_batch =
            c.value("embed_batch", cfg.chunking.embed_batch);
    }
    if (doc.contains("retrieval")) {
        const auto& r = doc["retrieval"];
        cfg.retrieval.k = r.value("k", cfg.retrieval.k);
        cfg.retrieval.l = r.value("l", cfg.retrieval.l);
        cfg.retrieval.lambda = r.value("lambda", cfg.retrieval.lambda);
    }
    if (doc.contains("fewshot")) {
        const auto& f = doc["fewshot"];
        cfg.bm25.k1 = f.value("k1", cfg.bm25.k1);
        cfg.bm25.b = f.value("b", cfg.bm25.b);
        cfg.fewshot_claims = f.value("n_claims", cfg.fewshot_claims);
    }
    cfg.image_cap = doc.value("image_cap", cfg.image_cap);
    cfg.max_ris_results = doc.value("max_ris_results", cfg.max_ris_results);
    cfg.max_source_chars = doc.value("max_source_chars", cfg.max_source_chars);

    if (doc.contains("mode")) {
        auto m = mode_from_string(doc["mode"]);
        if (!m)
            throw ConfigError("unknown evidence mode: " +
                              doc["mode"].dump());
        cfg.mode = *m;
    }

    if (!doc.contains("prices"))
        throw ConfigError("config lacks the prices table");
    const auto& p = doc["prices"];
    if (p.contains("ris_per_search_usd"))
        cfg.prices.ris_per_search =
            parse_price(p["ris_per_search_usd"], "ris_per_search_usd");
    if (p.contains("scrape_per_page_usd"))
        cfg.prices.scrape_per_page =
            parse_price(p["scrape_per_page_usd"], "scrape_per_page_usd");
    if (!p.contains("llm_input_per_token_usd") ||
        !p.contains("llm_output_per_token_usd"))
        throw ConfigError(
            "prices must define llm_input_per_token_usd and "
            "llm_output_per_token_usd; there is no built-in model pricing");
    cfg.prices.llm_input_per_token =
        parse_price(p["llm_input_per_token_usd"], "llm_input_per_token_usd");
    cfg.prices.llm_output_per_token =
        parse_price(p["llm_output_per_token_usd"], "llm_output_per_token_usd");
    cfg.prices.llm_discount_percent =
        p.value("llm_discount_percent", cfg.prices.llm_discount_percent);

    cfg.parallelism = doc.value("parallelism", cfg.parallelism);
    cfg.scrape_permits = doc.value("scrape_permits", cfg.scrape_permits);
    cfg.retry_max_attempts = doc.value("retry_max_attempts", cfg.retry_max_attempts);
    cfg.retry_base_delay_ms = doc.value("retry_base_delay_ms", cfg.retry_base_delay_ms);

    if (doc.contains("embedding")) {
        const auto& e = doc["embedding"];
        cfg.embedding.model = e.value("model", cfg.embedding.model);
        cfg.embedding.endpoint = e.value("endpoint", cfg.embedding.endpoint);
        cfg.embedding.api_key_env = e.value("api_key_env", cfg.embedding.api_key_env);
        cfg.embedding.timeout_s = e.value("timeout_s", cfg.embedding.timeout_s);
    }
    if (doc.contains("ris")) {
        const auto& r = doc["ris"];
        cfg.ris.endpoint = r.value("endpoint", cfg.ris.endpoint);
        cfg.ris.api_key_env = r.value("api_key_env", cfg.ris.api_key_env);
        cfg.ris.max_results = cfg.max_ris_results;
        cfg.ris.timeout_s = r.value("timeout_s", cfg.ris.timeout_s);
    }
    if (doc.contains("scrape")) {
        const auto& s = doc["scrape"];
        cfg.scrape.endpoint = s.value("endpoint", cfg.scrape.endpoint);
        cfg.scrape.api_key_env = s.value("api_key_env", cfg.scrape.api_key_env);
        cfg.scrape.timeout_s = s.value("timeout_s", cfg.scrape.timeout_s);
    }
    if (doc.contains("llm")) {
        const auto& l = doc["llm"];
        cfg.llm.model = l.value("model", cfg.llm.model);
        cfg.llm.endpoint = l.value("endpoint", cfg.llm.endpoint);
        cfg.llm.api_key_env = l.value("api_key_env", cfg.llm.api_key_env);
        cfg.llm.max_output_tokens = l.value("max_output_tokens", cfg.llm.max_output_tokens);
        cfg.llm.timeout_s = l.value("timeout_s", cfg.llm.timeout_s);
    }

    cfg.validate();
    return cfg;
}

void PipelineConfig::validate() const {
    retrieval.validate();
    bm25.validate();
    if (parallelism < 1)
        throw ConfigError("parallelism must be >= 1");
    if (scrape_permits < 1)
        throw ConfigError("scrape_permits must be >= 1");
    if (image_cap < 1)
        throw ConfigError("image_cap must be >= 1");
    if (chunking.max_len < 1)
        throw ConfigError("chunking max_chars must be >= 1");
    if (prices.ris_per_search < Money{} || prices.scrape_per_page < Money{} ||
        prices.llm_input_per_token < Money{} ||
        prices.llm_output_per_token < Money{})
        throw ConfigError("prices must be non-negative");
    if (prices.llm_discount_percent < 0 || prices.llm_discount_percent > 100)
        throw ConfigError("llm_discount_percent must be in 0..100");
}

} // namespace imgfact
