#include "imgfact/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <thread>

#include "imgfact/base64.hpp"
#include "imgfact/errors.hpp"
#include "imgfact/retrieval.hpp"

namespace imgfact {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view data) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

std::string media_type_from_path(const fs::path& p) {
    std::string ext = p.extension().string();
    for (auto& c : ext)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".jpg" || ext == ".jpeg")
        return "image/jpeg";
    if (ext == ".png")
        return "image/png";
    if (ext == ".gif")
        return "image/gif";
    if (ext == ".webp")
        return "image/webp";
    return "application/octet-stream";
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw IoError("cannot read file: " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_atomic(const fs::path& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot write " + tmp.string());
        out << text;
        out.flush();
        if (!out)
            throw IoError("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

long ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
}

} // namespace

// ---------------------------------------------------------------------------
// Inputs

std::vector<Claim> load_claims(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open claims file: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("claims file is not valid JSON: " +
                          std::string(e.what()));
    }
    if (!doc.is_array())
        throw FormatError("claims file must be a JSON array");

    const fs::path base = path.parent_path();
    std::vector<Claim> claims;
    for (const auto& item : doc) {
        Claim c;
        c.claim_id = item.value("claim_id", "");
        if (c.claim_id.empty())
            throw FormatError("claim without claim_id in " + path.string());
        c.text = item.value("claim", "");
        c.author = item.value("author", "");
        c.medium = item.value("medium", "");
        auto date = parse_iso_date(item.value("date", ""));
        if (!date)
            throw FormatError("claim " + c.claim_id +
                              " has no valid ISO date");
        c.date = *date;
        for (const auto& img : item.value("images", json::array())) {
            ClaimImage ci;
            ci.url = img.value("url", "");
            ci.path = img.value("path", "");
            if (!ci.path.empty()) {
                fs::path p(ci.path);
                if (!p.is_absolute())
                    p = base / p;
                ci.bytes = read_bytes(p);
                ci.media_type = img.value("media_type", media_type_from_path(p));
            } else {
                ci.media_type = img.value("media_type", "");
            }
            c.images.push_back(std::move(ci));
        }
        claims.push_back(std::move(c));
    }
    return claims;
}

std::vector<SourceDocument> load_knowledge_store(const fs::path& dir,
                                                 const std::string& claim_id) {
    fs::path path = dir / (claim_id + ".jsonl");
    std::ifstream in(path);
    if (!in)
        throw IoError("knowledge store file missing: " + path.string());
    std::vector<SourceDocument> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError("bad knowledge store line " +
                              std::to_string(line_no) + " in " + path.string() +
                              ": " + e.what());
        }
        SourceDocument doc;
        doc.url = j.value("url", "");
        if (j.contains("text")) {
            doc.text = j.value("text", "");
        } else if (j.contains("url2text") && j["url2text"].is_array()) {
            std::string text;
            for (const auto& part : j["url2text"]) {
                if (!text.empty())
                    text += "\n";
                text += part.get<std::string>();
            }
            doc.text = std::move(text);
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

// ---------------------------------------------------------------------------
// Providers

Providers make_live_providers(const PipelineConfig& cfg) {
    Providers p;
    p.embedding = make_http_embedding_provider(cfg.embedding);
    p.ris = make_http_ris_provider(cfg.ris);
    p.scrape = cfg.scrape.endpoint.empty()
                   ? make_builtin_scrape_provider(cfg.scrape.timeout_s)
                   : make_http_scrape_provider(cfg.scrape);
    p.dater = make_heuristic_date_provider();
    p.thumbs = make_http_thumb_fetcher();
    p.llm = make_http_llm_provider(cfg.llm);
    return p;
}

Providers make_replay_providers(const fs::path& dir) {
    Providers p;
    p.embedding = make_replay_embedding_provider(dir / "embeddings.json");
    p.ris = make_replay_ris_provider(dir / "ris.json");
    p.scrape = make_replay_scrape_provider(dir / "scrape.json");
    p.dater = make_replay_date_provider(dir / "dates.json");
    p.thumbs = make_replay_thumb_fetcher(dir / "thumbs.json");
    p.llm = make_replay_llm_provider(dir / "llm.json");
    return p;
}

// ---------------------------------------------------------------------------
// Output serialization

json claim_output_to_json(const ClaimOutput& out) {
    json j;
    j["claim_id"] = out.claim_id;
    if (out.failed) {
        j["failed"] = true;
        j["failure"] = out.failure;
    }
    j["questions"] = out.questions;
    json evidence = json::array();
    for (const auto& ev : out.evidence) {
        json e;
        e["text"] = ev.text;
        e["source_id"] = ev.source_id;
        if (ev.thumbnail) {
            e["image_b64"] = base64_encode(ev.thumbnail->bytes);
            e["image_media_type"] = ev.thumbnail->media_type;
        }
        evidence.push_back(std::move(e));
    }
    j["evidence"] = std::move(evidence);
    if (out.verdict)
        j["label"] = to_string(*out.verdict);
    j["justification"] = out.justification;
    j["diagnostics"] = {
        {"warnings", out.diagnostics.warnings},
        {"errors", out.diagnostics.errors},
        {"timings_ms",
         {{"text", out.diagnostics.text_ms},
          {"image", out.diagnostics.image_ms},
          {"llm", out.diagnostics.llm_ms}}},
    };
    return j;
}

json claim_output_to_submission_json(const ClaimOutput& out) {
    json j = claim_output_to_json(out);
    j.erase("diagnostics");
    return j;
}

static ClaimOutput claim_output_from_json(const json& j) {
    ClaimOutput out;
    out.claim_id = j.value("claim_id", "");
    out.failed = j.value("failed", false);
    out.failure = j.value("failure", "");
    for (const auto& q : j.value("questions", json::array()))
        out.questions.push_back(q.get<std::string>());
    for (const auto& e : j.value("evidence", json::array())) {
        EvidenceText ev;
        ev.text = e.value("text", "");
        ev.source_id = e.value("source_id", 0);
        if (e.contains("image_b64")) {
            Thumb t;
            t.bytes = base64_decode(e.value("image_b64", ""));
            t.media_type = e.value("image_media_type", "image/jpeg");
            ev.thumbnail = std::move(t);
        }
        out.evidence.push_back(std::move(ev));
    }
    if (j.contains("label"))
        out.verdict = verdict_from_string(j.value("label", ""));
    out.justification = j.value("justification", "");
    return out;
}

// ---------------------------------------------------------------------------
// Journal

Journal::Journal(const fs::path& path) : path_(path) {
    std::ifstream in(path_);
    if (!in)
        return; // fresh run
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        try {
            json j = json::parse(line);
            done_.insert(j.value("claim_id", ""));
        } catch (const json::exception&) {
            // a torn last line from a kill is expected; ignore it
        }
    }
}

bool Journal::contains(const std::string& claim_id) const {
    std::lock_guard lock(mu_);
    return done_.count(claim_id) > 0;
}

std::size_t Journal::size() const {
    std::lock_guard lock(mu_);
    return done_.size();
}

void Journal::record(const std::string& claim_id, bool failed,
                     const std::string& output_hash) {
    std::lock_guard lock(mu_);
    std::ofstream out(path_, std::ios::app);
    if (!out)
        throw IoError("cannot append to journal: " + path_.string());
    json j = {{"claim_id", claim_id},
              {"status", failed ? "failed" : "ok"},
              {"hash", output_hash}};
    out << j.dump() << "\n";
    out.flush();
    if (!out)
        throw IoError("short write to journal: " + path_.string());
    done_.insert(claim_id);
}

// ---------------------------------------------------------------------------
// Orchestration

RunContext make_run_context(PipelineConfig cfg, Providers providers) {
    RunContext ctx;
    ctx.config = std::move(cfg);
    ctx.providers = std::move(providers);
    ctx.thumb_cache = std::make_unique<ThumbnailCache>();
    ctx.train_corpus = load_train_corpus(ctx.config.train_path);
    if (ctx.train_corpus.empty())
        throw EmptyCorpus("train set " + ctx.config.train_path.string() +
                          " holds no claims");
    ctx.fewshot_index =
        std::make_unique<Bm25Index>(ctx.train_corpus, ctx.config.bm25);
    const fs::path tpl = ctx.config.mode == EvidenceFormatMode::Declarative
                             ? ctx.config.template_declarative_path
                             : ctx.config.template_qa_path;
    ctx.prompt_template = PromptTemplate::load(tpl);
    ctx.retry.max_attempts = ctx.config.retry_max_attempts;
    ctx.retry.base_delay_ms = ctx.config.retry_base_delay_ms;
    return ctx;
}

namespace {

// Text retrieval half of run_claim; failures degrade to zero text sources.
std::vector<ScoredChunk> text_sources_for(const Claim& claim, RunContext& ctx,
                                          Diagnostics& diag) {
    fs::path store_path =
        ctx.config.store_dir / (claim.claim_id + ".vstore");
    VectorStore store;
    try {
        if (fs::exists(store_path)) {
            store = load_store(store_path);
        } else {
            auto docs = load_knowledge_store(ctx.config.knowledge_store_dir,
                                             claim.claim_id);
            store = build_store(claim.claim_id, docs,
                                *ctx.providers.embedding, ctx.config.chunking);
            if (!ctx.config.store_dir.empty()) {
                fs::create_directories(ctx.config.store_dir);
                save_store(store, store_path);
            }
        }
        return retrieve_text_sources(store, claim.text,
                                     *ctx.providers.embedding,
                                     ctx.config.retrieval);
    } catch (const Error& e) {
        diag.errors.push_back(std::string("text retrieval: ") + e.what());
        return {};
    }
}

} // namespace

ClaimOutput run_claim(const Claim& claim, RunContext& ctx, CostEntry& cost) {
    ClaimOutput out;
    out.claim_id = claim.claim_id;
    Diagnostics& diag = out.diagnostics;

    ImageRetrievalOptions img_opts;
    img_opts.cap = ctx.config.image_cap;
    img_opts.max_ris_results = ctx.config.max_ris_results;
    img_opts.scrape_permits = ctx.config.scrape_permits;
    img_opts.retry = ctx.retry;

    // Image retrieval runs beside text retrieval; both must finish before
    // the prompt is built.
    auto t0 = std::chrono::steady_clock::now();
    auto image_future = std::async(std::launch::async, [&] {
        return retrieve_image_sources(claim, *ctx.providers.ris,
                                      *ctx.providers.scrape,
                                      *ctx.providers.dater, img_opts);
    });
    auto text_sources = text_sources_for(claim, ctx, diag);
    diag.text_ms = ms_since(t0);

    ImageRetrievalOutcome images;
    try {
        images = image_future.get();
    } catch (const Error& e) {
        diag.errors.push_back(std::string("image retrieval: ") + e.what());
    }
    diag.image_ms = ms_since(t0);
    for (const auto& err : images.errors)
        diag.errors.push_back(err);
    bool any_image_sources = false;
    for (const auto& set : images.sets)
        any_image_sources |= !set.sources.empty();
    if (!claim.images.empty() && !any_image_sources)
        diag.warnings.push_back("no usable image evidence for this claim");

    long input_tokens = 0, output_tokens = 0;
    try {
        std::vector<TrainExample> fewshot;
        for (std::size_t idx : ctx.fewshot_index->rank(
                 claim.text, ctx.config.fewshot_claims))
            fewshot.push_back(ctx.train_corpus[idx]);

        PromptRenderOptions render_opts;
        render_opts.max_source_chars = ctx.config.max_source_chars;
        PromptBundle bundle =
            build_prompt_bundle(ctx.prompt_template, claim, text_sources,
                                images.sets, fewshot, render_opts);

        auto llm_start = std::chrono::steady_clock::now();
        VerificationResult result;
        // one call plus at most one retry after a malformed response
        for (int attempt = 1;; ++attempt) {
            LlmResponse response = call_llm(bundle, *ctx.providers.llm,
                                            ctx.retry);
            input_tokens += response.input_tokens;
            output_tokens += response.output_tokens;
            try {
                result = parse_response(response.text, bundle.source_table);
                break;
            } catch (const Error& e) {
                if (attempt >= 2)
                    throw;
                diag.warnings.push_back(
                    std::string("malformed response, retrying once: ") +
                    e.what());
            }
        }
        diag.llm_ms = ms_since(llm_start);

        attach_thumbnails(result, bundle.source_table, *ctx.thumb_cache,
                          *ctx.providers.thumbs);
        for (const auto& w : result.warnings)
            diag.warnings.push_back(w);

        out.evidence = to_submission_evidence(result, ctx.config.mode);
        for (const auto& pair : result.qa_pairs)
            out.questions.push_back(pair.question);
        out.verdict = result.verdict;
        out.justification = result.justification;
    } catch (const Error& e) {
        out.failed = true;
        out.failure = e.what();
        out.verdict.reset();
        out.evidence.clear();
        out.questions.clear();
        diag.errors.push_back(std::string("generation: ") + e.what());
    }

    cost = make_cost_entry(claim.claim_id, images.ris_searches,
                           images.scraped_pages, input_tokens, output_tokens,
                           ctx.config.prices);
    return out;
}

BatchResult run_batch(const std::vector<Claim>& claims, RunContext& ctx,
                      const RunOptions& opts) {
    BatchResult result;
    const fs::path out_dir = ctx.config.out_dir;
    const fs::path claims_dir = out_dir / "claims";
    fs::create_directories(claims_dir);
    result.submission_path = opts.submission_path.empty()
                                 ? out_dir / "submission.json"
                                 : opts.submission_path;
    result.ledger_path = out_dir / "ledger.jsonl";

    Journal journal(out_dir / "journal.jsonl");

    // deterministic processing and output order
    std::vector<const Claim*> ordered;
    ordered.reserve(claims.size());
    for (const auto& c : claims)
        ordered.push_back(&c);
    std::sort(ordered.begin(), ordered.end(),
              [](const Claim* a, const Claim* b) {
                  return a->claim_id < b->claim_id;
              });

    // Carry over ledger entries for claims journaled by an earlier run and
    // drop orphans (a kill can land between the ledger append and the
    // journal append; the re-run would otherwise double-charge that claim).
    CostLedger ledger;
    if (fs::exists(result.ledger_path)) {
        for (auto& e : CostLedger::load_jsonl(result.ledger_path))
            if (journal.contains(e.claim_id))
                ledger.add(std::move(e));
        ledger.save_jsonl(result.ledger_path);
    }

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> completed_here{0};
    std::atomic<std::size_t> skipped{0};
    std::mutex persist_mu;
    const std::size_t workers =
        std::max<std::size_t>(1, opts.parallelism > 0 ? opts.parallelism
                                                      : ctx.config.parallelism);

    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= ordered.size())
                return;
            const Claim& claim = *ordered[i];
            if (journal.contains(claim.claim_id)) {
                skipped.fetch_add(1);
                continue;
            }
            ClaimOutput out;
            CostEntry cost;
            try {
                out = run_claim(claim, ctx, cost);
            } catch (const std::exception& e) {
                out = ClaimOutput{};
                out.claim_id = claim.claim_id;
                out.failed = true;
                out.failure = std::string("unexpected: ") + e.what();
                cost = make_cost_entry(claim.claim_id, 0, 0, 0, 0,
                                       ctx.config.prices);
            }

            std::string serialized = claim_output_to_json(out).dump(1);
            {
                std::lock_guard lock(persist_mu);
                write_text_atomic(claims_dir / (out.claim_id + ".json"),
                                  serialized);
                ledger.add(cost);
                // append the ledger line next to the journal entry so a
                // resumed run never re-charges a finished claim
                std::ofstream lf(result.ledger_path, std::ios::app);
                lf << cost_entry_to_json(cost).dump() << "\n";
                lf.flush();
                journal.record(out.claim_id, out.failed,
                               fnv1a64_hex(serialized));
            }
            std::size_t done = completed_here.fetch_add(1) + 1;
            if (opts.halt_after > 0 && done >= opts.halt_after)
                std::_Exit(137); // simulate a kill: no flushes, no cleanup
        }
    };

    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();

    result.completed = completed_here.load();
    result.skipped = skipped.load();

    // assemble the submission from the per-claim records, sorted order
    json submission = json::array();
    bool all_accounted = true;
    for (const Claim* claim : ordered) {
        fs::path p = claims_dir / (claim->claim_id + ".json");
        if (!fs::exists(p)) {
            all_accounted = false;
            continue;
        }
        std::ifstream in(p);
        json full = json::parse(in);
        if (full.value("failed", false))
            ++result.failed;
        full.erase("diagnostics");
        submission.push_back(std::move(full));
    }
    write_text_atomic(result.submission_path, submission.dump(1) + "\n");
    result.all_accounted = all_accounted;
    return result;
}

// ---------------------------------------------------------------------------
// Scoring

ScoreReport score_report(
    const std::vector<ClaimOutput>& outputs,
    const std::map<std::string, Verdict>& gold,
    const std::optional<std::map<std::string, double>>& evidence_scores) {
    ScoreReport report;
    report.claims = outputs.size();
    std::size_t combined_hits = 0;
    for (const auto& out : outputs) {
        auto it = gold.find(out.claim_id);
        if (it == gold.end())
            throw AlignmentError("no gold label for claim " + out.claim_id);
        ++report.gold_label_counts[to_string(it->second)];
        if (out.verdict)
            ++report.predicted_label_counts[to_string(*out.verdict)];
        else
            ++report.predicted_label_counts["(failed)"];

        bool correct = out.verdict && *out.verdict == it->second;
        if (correct)
            ++report.correct_verdicts;
        if (evidence_scores) {
            double score = 0.0;
            auto sit = evidence_scores->find(out.claim_id);
            if (sit != evidence_scores->end()) {
                score = sit->second;
            } else {
                report.warnings.push_back("no evidence score for claim " +
                                          out.claim_id +
                                          "; counted as 0");
            }
            if (correct && score >= 0.3)
                ++combined_hits;
        }
    }
    if (report.claims > 0) {
        report.verdict_accuracy = static_cast<double>(report.correct_verdicts) /
                                  static_cast<double>(report.claims);
        if (evidence_scores)
            report.combined_score = static_cast<double>(combined_hits) /
                                    static_cast<double>(report.claims);
    }
    return report;
}

json score_report_to_json(const ScoreReport& report) {
    json j;
    j["claims"] = report.claims;
    j["correct_verdicts"] = report.correct_verdicts;
    j["verdict_accuracy"] = report.verdict_accuracy;
    if (report.combined_score)
        j["combined_score"] = *report.combined_score;
    j["gold_label_counts"] = report.gold_label_counts;
    j["predicted_label_counts"] = report.predicted_label_counts;
    if (!report.warnings.empty())
        j["warnings"] = report.warnings;
    return j;
}

std::vector<ClaimOutput> load_submission(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open submission: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("submission is not valid JSON: " +
                          std::string(e.what()));
    }
    if (!doc.is_array())
        throw FormatError("submission must be a JSON array");
    std::vector<ClaimOutput> outputs;
    for (const auto& item : doc)
        outputs.push_back(claim_output_from_json(item));
    return outputs;
}

std::map<std::string, Verdict> load_gold(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open gold labels: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("gold file is not valid JSON: " +
                          std::string(e.what()));
    }
    std::map<std::string, Verdict> gold;
    auto put = [&](const std::string& id, const std::string& label) {
        auto v = verdict_from_string(label);
        if (!v)
            throw FormatError("gold label for " + id +
                              " is not a known verdict: " + label);
        gold[id] = *v;
    };
    if (doc.is_array()) {
        for (const auto& item : doc)
            put(item.value("claim_id", ""), item.value("label", ""));
    } else if (doc.is_object()) {
        for (const auto& [id, label] : doc.items())
            put(id, label.get<std::string>());
    } else {
        throw FormatError("gold file must be an array or object");
    }
    return gold;
}

std::map<std::string, double> load_evidence_scores(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open evidence scores: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("evidence scores file is not valid JSON: " +
                          std::string(e.what()));
    }
    std::map<std::string, double> scores;
    for (const auto& [id, v] : doc.items())
        scores[id] = v.get<double>();
    return scores;
}

} // namespace imgfact
