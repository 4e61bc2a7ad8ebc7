// imgfact -- image-text claim fact-checking pipeline.
//
// Subcommands:
//   build-store  build per-claim vector stores from the knowledge store
//   run          run the full pipeline over a claims file
//   score        score a submission against gold labels
//   cost-report  aggregate a run's cost ledger

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "imgfact/config.hpp"
#include "imgfact/errors.hpp"
#include "imgfact/pipeline.hpp"
#include "imgfact/store.hpp"

using namespace imgfact;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Providers providers_for(const PipelineConfig& cfg, const std::string& replay) {
    if (!replay.empty())
        return make_replay_providers(replay);
    return make_live_providers(cfg);
}

int cmd_build_store(const std::string& config_path, const std::string& claims_path,
                    const std::string& replay, std::size_t parallel) {
    PipelineConfig cfg = PipelineConfig::load(config_path);
    if (!claims_path.empty())
        cfg.claims_path = claims_path;
    Providers providers = providers_for(cfg, replay);
    auto claims = load_claims(cfg.claims_path);
    fs::create_directories(cfg.store_dir);

    std::atomic<std::size_t> next{0}, built{0}, skipped{0}, failed{0};
    std::mutex io_mu;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= claims.size())
                return;
            const Claim& claim = claims[i];
            fs::path path = cfg.store_dir / (claim.claim_id + ".vstore");
            if (fs::exists(path)) {
                skipped.fetch_add(1);
                continue;
            }
            try {
                auto docs = load_knowledge_store(cfg.knowledge_store_dir,
                                                 claim.claim_id);
                VectorStore store = build_store(
                    claim.claim_id, docs, *providers.embedding, cfg.chunking);
                save_store(store, path);
                built.fetch_add(1);
                std::lock_guard lock(io_mu);
                std::cout << claim.claim_id << ": " << store.size()
                          << " chunks, dim " << store.dim() << "\n";
            } catch (const Error& e) {
                failed.fetch_add(1);
                std::lock_guard lock(io_mu);
                std::cerr << claim.claim_id << ": " << e.what() << "\n";
            }
        }
    };
    std::size_t workers = std::max<std::size_t>(
        1, parallel > 0 ? parallel : cfg.parallelism);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();

    std::cout << "built " << built.load() << ", skipped " << skipped.load()
              << ", failed " << failed.load() << "\n";
    return failed.load() == 0 ? 0 : 1;
}

int cmd_run(const std::string& config_path, const std::string& claims_path,
            const std::string& out_path, const std::string& mode,
            const std::string& replay, std::size_t parallel,
            std::size_t halt_after) {
    PipelineConfig cfg = PipelineConfig::load(config_path);
    if (!claims_path.empty())
        cfg.claims_path = claims_path;
    if (!mode.empty()) {
        auto m = mode_from_string(mode);
        if (!m) {
            std::cerr << "unknown mode: " << mode << "\n";
            return 2;
        }
        cfg.mode = *m;
    }
    Providers providers = providers_for(cfg, replay);
    RunContext ctx = make_run_context(std::move(cfg), std::move(providers));
    auto claims = load_claims(ctx.config.claims_path);

    RunOptions opts;
    if (!out_path.empty())
        opts.submission_path = out_path;
    opts.parallelism = parallel;
    opts.halt_after = halt_after;

    BatchResult result = run_batch(claims, ctx, opts);
    std::cout << "claims: " << claims.size() << " (completed "
              << result.completed << ", resumed/skipped " << result.skipped
              << ", failure records " << result.failed << ")\n"
              << "submission: " << result.submission_path.string() << "\n"
              << "ledger: " << result.ledger_path.string() << "\n";
    return result.all_accounted ? 0 : 1;
}

int cmd_score(const std::string& submission_path, const std::string& gold_path,
              const std::string& scores_path, const std::string& out_path) {
    auto outputs = load_submission(submission_path);
    auto gold = load_gold(gold_path);
    std::optional<std::map<std::string, double>> scores;
    if (!scores_path.empty())
        scores = load_evidence_scores(scores_path);
    ScoreReport report = score_report(outputs, gold, scores);
    json j = score_report_to_json(report);
    std::cout << j.dump(1) << "\n";
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << j.dump(1) << "\n";
    }
    return 0;
}

int cmd_cost_report(const std::string& config_path, const std::string& ledger_path,
                    int discount_override) {
    std::string path = ledger_path;
    int discount = discount_override;
    if (!config_path.empty()) {
        PipelineConfig cfg = PipelineConfig::load(config_path);
        if (path.empty())
            path = (cfg.out_dir / "ledger.jsonl").string();
        if (discount < 0)
            discount = cfg.prices.llm_discount_percent;
    }
    if (path.empty()) {
        std::cerr << "need --ledger or --config\n";
        return 2;
    }
    if (discount < 0)
        discount = 0;

    auto entries = CostLedger::load_jsonl(path);
    CostAggregate agg = aggregate_entries(entries, discount);
    json j = {
        {"claims", agg.claims},
        {"ris_searches", agg.ris_searches},
        {"scraped_pages", agg.scraped_pages},
        {"input_tokens", agg.input_tokens},
        {"output_tokens", agg.output_tokens},
        {"ris_usd", agg.ris_usd.str()},
        {"scrape_usd", agg.scrape_usd.str()},
        {"llm_usd", agg.llm_usd.str()},
        {"total_usd", agg.total.str()},
        {"llm_discount_percent", discount},
        {"llm_usd_discounted", agg.llm_usd_discounted.str()},
        {"total_usd_discounted", agg.total_discounted.str()},
    };
    if (agg.claims > 0)
        j["avg_usd_per_claim"] =
            Money::from_nanos(agg.total.nanos() / agg.claims).str();
    std::cout << j.dump(1) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"image-text claim fact-checking pipeline"};
    app.require_subcommand(1);

    std::string config_path, claims_path, out_path, mode, replay;
    std::string submission_path, gold_path, scores_path, ledger_path;
    std::size_t parallel = 0, halt_after = 0;
    int discount = -1;

    auto* build = app.add_subcommand("build-store",
                                     "build per-claim vector stores");
    build->add_option("--config", config_path, "config JSON")->required();
    build->add_option("--claims", claims_path, "claims JSON (overrides config)");
    build->add_option("--replay", replay, "fixture dir; replay all providers");
    build->add_option("--parallel", parallel, "claim-level parallelism");

    auto* run = app.add_subcommand("run", "run the pipeline");
    run->add_option("--config", config_path, "config JSON")->required();
    run->add_option("--claims", claims_path, "claims JSON (overrides config)");
    run->add_option("--out", out_path, "submission output path");
    run->add_option("--mode", mode,
                    "evidence format: answer_only|qa|declarative");
    run->add_option("--replay", replay, "fixture dir; replay all providers");
    run->add_option("--parallel", parallel, "claim-level parallelism");
    run->add_option("--halt-after", halt_after,
                    "testing: exit abruptly after N completed claims")
        ->group(""); // hidden
    auto* score = app.add_subcommand("score", "score a submission");
    score->add_option("--submission", submission_path, "submission JSON")
        ->required();
    score->add_option("--gold", gold_path, "gold labels JSON")->required();
    score->add_option("--evidence-scores", scores_path,
                      "external per-claim evidence scores JSON");
    score->add_option("--out", out_path, "write the report JSON here");

    auto* cost = app.add_subcommand("cost-report", "aggregate a cost ledger");
    cost->add_option("--config", config_path, "config JSON");
    cost->add_option("--ledger", ledger_path, "ledger JSONL path");
    cost->add_option("--discount-percent", discount,
                     "override the LLM discount percentage");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed())
            return cmd_build_store(config_path, claims_path, replay, parallel);
        if (run->parsed())
            return cmd_run(config_path, claims_path, out_path, mode, replay,
                           parallel, halt_after);
        if (score->parsed())
            return cmd_score(submission_path, gold_path, scores_path, out_path);
        if (cost->parsed())
            return cmd_cost_report(config_path, ledger_path, discount);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
