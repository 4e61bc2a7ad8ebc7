#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "imgfact/bm25.hpp"
#include "imgfact/config.hpp"
#include "imgfact/cost.hpp"
#include "imgfact/generation.hpp"
#include "imgfact/prompt.hpp"

namespace imgfact {

// ---------------------------------------------------------------------------
// Inputs

// Claims file: JSON array of {claim_id, claim, author, date, medium,
// images:[{path|url, media_type?}]}. Image paths resolve against the file's
// directory; bytes are loaded eagerly.
std::vector<Claim> load_claims(const std::filesystem::path& path);

// Knowledge store for one claim: <dir>/<claim_id>.jsonl with one
// {"url", "text"} (or "url2text": [...]) object per line.
std::vector<SourceDocument>
load_knowledge_store(const std::filesystem::path& dir,
                     const std::string& claim_id);

// ---------------------------------------------------------------------------
// Providers

struct Providers {
    std::unique_ptr<EmbeddingProvider> embedding;
    std::unique_ptr<RisProvider> ris;
    std::unique_ptr<ScrapeProvider> scrape;
    std::unique_ptr<DateProvider> dater;
    std::unique_ptr<ThumbFetcher> thumbs;
    std::unique_ptr<LlmProvider> llm;
};

Providers make_live_providers(const PipelineConfig& cfg);
// Reads {embeddings,ris,scrape,dates,thumbs,llm}.json from fixture_dir.
Providers make_replay_providers(const std::filesystem::path& fixture_dir);

// ---------------------------------------------------------------------------
// Outputs

struct Diagnostics {
    std::vector<std::string> warnings;
    std::vector<std::string> errors;
    long text_ms = 0;
    long image_ms = 0;
    long llm_ms = 0;
};

struct ClaimOutput {
    std::string claim_id;
    bool failed = false;
    std::string failure; // set when failed
    std::vector<std::string> questions;
    std::vector<EvidenceText> evidence;
    std::optional<Verdict> verdict;
    std::string justification;
    Diagnostics diagnostics;
};

// Full per-claim record, diagnostics included.
nlohmann::json claim_output_to_json(const ClaimOutput& out);
// Submission element: schema fields only, no diagnostics or timings, so
// replayed runs are byte-identical.
nlohmann::json claim_output_to_submission_json(const ClaimOutput& out);

// ---------------------------------------------------------------------------
// Journal: append-only JSON lines {claim_id, status, hash}, flushed per
// entry so an abrupt kill never loses completed claims.

class Journal {
public:
    explicit Journal(const std::filesystem::path& path);

    bool contains(const std::string& claim_id) const;
    std::size_t size() const;
    void record(const std::string& claim_id, bool failed,
                const std::string& output_hash);

private:
    std::filesystem::path path_;
    std::set<std::string> done_;
    mutable std::mutex mu_;
};

// ---------------------------------------------------------------------------
// Orchestration

struct RunContext {
    PipelineConfig config;
    Providers providers;
    std::vector<TrainExample> train_corpus;
    std::unique_ptr<Bm25Index> fewshot_index;
    PromptTemplate prompt_template;
    std::unique_ptr<ThumbnailCache> thumb_cache;
    RetryPolicy retry;
};

// Loads the train corpus and the prompt template matching config.mode.
RunContext make_run_context(PipelineConfig cfg, Providers providers);

// The full per-claim flow: text and image retrieval in parallel, one LLM
// call (plus at most one retry after a malformed response), parsing,
// thumbnails, format conversion and cost accounting. Claim-level problems
// land in the output record; only unexpected exceptions escape.
ClaimOutput run_claim(const Claim& claim, RunContext& ctx, CostEntry& cost);

struct RunOptions {
    std::filesystem::path submission_path; // default out_dir/submission.json
    std::size_t parallelism = 0;           // 0 -> config value
    // testing hook: hard-exit (as if killed) after this many completed
    // claims; 0 disables
    std::size_t halt_after = 0;
};

struct BatchResult {
    std::size_t completed = 0; // processed in this run
    std::size_t skipped = 0;   // journaled by an earlier run
    std::size_t failed = 0;    // failure records among all outputs
    bool all_accounted = false;
    std::filesystem::path submission_path;
    std::filesystem::path ledger_path;
};

BatchResult run_batch(const std::vector<Claim>& claims, RunContext& ctx,
                      const RunOptions& opts = {});

// ---------------------------------------------------------------------------
// Scoring

struct ScoreReport {
    std::size_t claims = 0;
    std::size_t correct_verdicts = 0;
    double verdict_accuracy = 0.0;
    // only when external evidence scores are supplied (the evidence judge
    // itself is out of scope)
    std::optional<double> combined_score;
    std::map<std::string, std::size_t> gold_label_counts;
    std::map<std::string, std::size_t> predicted_label_counts;
    std::vector<std::string> warnings;
};

// Combined score: fraction of claims with a correct verdict AND an evidence
// score of at least 0.3. Throws AlignmentError when an output claim_id has
// no gold label.
ScoreReport score_report(
    const std::vector<ClaimOutput>& outputs,
    const std::map<std::string, Verdict>& gold,
    const std::optional<std::map<std::string, double>>& evidence_scores);

nlohmann::json score_report_to_json(const ScoreReport& report);

// Loaders for the score subcommand.
std::vector<ClaimOutput> load_submission(const std::filesystem::path& path);
std::map<std::string, Verdict> load_gold(const std::filesystem::path& path);
std::map<std::string, double> load_evidence_scores(const std::filesystem::path& path);

} // namespace imgfact
