#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cactus/commands.hpp"

using cactus::cli::RunConfig;
using cactus::cli::Stage;

int main(int argc, char** argv) {
    CLI::App app{"cactus: CBT counseling dialogue synthesis and evaluation"};
    app.fallthrough();
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::string backend;
    int retry_attempts = 0;
    long retry_base_delay_ms = 0;
    std::vector<double> weights;

    // The config file loads first (below); flags given on the command line
    // then override individual values.
    app.add_option("--config", config_path,
                   "configuration file (INI, key/value with sections)");

    app.add_option("--seed", cfg.seed, "seed for all randomness");
    app.add_option("--concurrency", cfg.concurrency, "max in-flight LLM calls");
    app.add_option("--out-dir", cfg.out_dir, "stage file directory");
    auto* opt_backend =
        app.add_option("--backend", backend, "chat backend kind: mock or http");
    app.add_option("--fixtures", cfg.fixtures_path, "mock fixture JSONL");

    app.add_option("--base-url", cfg.base_url, "chat-completions base URL");
    app.add_option("--api-key-env", cfg.api_key_env,
                   "environment variable holding the API key");
    app.add_option("--timeout-s", cfg.timeout_s, "per-call timeout");
    auto* opt_retry_attempts =
        app.add_option("--retry-max-attempts", retry_attempts, "retry attempts");
    auto* opt_retry_delay = app.add_option("--retry-base-delay-ms",
                                           retry_base_delay_ms, "base backoff delay");

    app.add_option("--model-generator", cfg.generator_model, "generation model");
    app.add_option("--model-filter-judge", cfg.filter_judge_model,
                   "CTRS judge for filtering");
    app.add_option("--model-eval-judge", cfg.eval_judge_model,
                   "CTRS/PANAS judge for evaluation");
    app.add_option("--model-client", cfg.client_model, "AI client model");
    app.add_option("--model-counselor", cfg.counselor_model,
                   "default counselor under evaluation");

    app.add_option("--gen-temperature", cfg.gen_temperature,
                   "generation temperature");
    app.add_option("--judge-temperature", cfg.judge_temperature,
                   "judge temperature");
    app.add_option("--form-max-tokens", cfg.form_max_tokens,
                   "max tokens for forms/plans/selections");
    app.add_option("--script-max-tokens", cfg.script_max_tokens,
                   "max tokens for scripts");

    app.add_option("--min-utterances", cfg.bounds.min_utterances,
                   "basic filter lower bound");
    app.add_option("--max-utterances", cfg.bounds.max_utterances,
                   "basic filter upper bound");
    app.add_option("--ctrs-threshold", cfg.ctrs_threshold,
                   "CTRS mean keep threshold");
    app.add_option("--cap-exchanges", cfg.cap_exchanges, "session exchange cap");

    app.add_option("--weights", weights,
                   "attitude weights: positive neutral negative")
        ->expected(3);

    app.add_option("--seeds", cfg.seeds_path, "seed corpus JSONL");
    app.add_option("--prompts-dir", cfg.prompts_dir,
                   "template directory overriding the built-ins");
    app.add_option("--exemplars", cfg.exemplars_path,
                   "suitability few-shot exemplars JSONL");
    app.add_option("--occupations", cfg.occupations_path,
                   "occupation keyword table JSONL");

    auto* gen = app.add_subcommand("generate", "run the synthesis pipeline");
    std::string stage = "all";
    gen->add_option("--stage", stage,
                    "all|suitability|intake|techniques|plan|dialogue");

    auto* filt = app.add_subcommand("filter", "two-stage quality filter");

    auto* ev = app.add_subcommand("eval", "run counselor evaluation sessions");
    std::string testset;
    std::vector<std::string> counselors;
    ev->add_option("--testset", testset,
                   "profile JSONL (150 profiles -> 450 instances)")
        ->required();
    ev->add_option("--counselor", counselors, "counselor model label (repeatable)");

    auto* st = app.add_subcommand("stats", "dataset statistics from kept bundles");
    std::string bundles;
    st->add_option("--bundles", bundles,
                   "bundle JSONL (default <out-dir>/cactus.jsonl)");

    auto* cmp = app.add_subcommand("compare", "head-to-head judgment report");
    std::string judgments;
    cmp->add_option("--judgments", judgments, "judgment JSONL")->required();

    // Apply the config file before CLI11 writes flag values over it.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                cactus::cli::load_config_file(argv[i + 1], cfg);
            } catch (const cactus::Error& e) {
                std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
                return 1;
            }
            break;
        }
    }

    CLI11_PARSE(app, argc, argv);

    if (opt_backend->count() > 0) {
        if (backend == "http") {
            cfg.backend_kind = cactus::llm::BackendKind::Http;
        } else if (backend == "mock") {
            cfg.backend_kind = cactus::llm::BackendKind::Mock;
        } else {
            std::cerr << "unknown backend '" << backend << "' (use mock or http)\n";
            return 1;
        }
    }
    if (opt_retry_attempts->count() > 0) cfg.retry.max_attempts = retry_attempts;
    if (opt_retry_delay->count() > 0)
        cfg.retry.base_delay = std::chrono::milliseconds(retry_base_delay_ms);
    if (!weights.empty()) {
        cfg.weights.positive = weights[0];
        cfg.weights.neutral = weights[1];
        cfg.weights.negative = weights[2];
    }

    try {
        if (gen->parsed()) {
            auto s = cactus::cli::stage_from_string(stage);
            if (!s) {
                std::cerr << "unknown stage '" << stage << "'\n";
                return 1;
            }
            return cactus::cli::cmd_generate(cfg, *s, std::cout);
        }
        if (filt->parsed()) return cactus::cli::cmd_filter(cfg, std::cout);
        if (ev->parsed())
            return cactus::cli::cmd_eval(cfg, counselors, testset, std::cout);
        if (st->parsed()) {
            if (bundles.empty()) bundles = cfg.path("cactus.jsonl");
            return cactus::cli::cmd_stats(cfg, bundles, std::cout);
        }
        if (cmp->parsed()) return cactus::cli::cmd_compare(cfg, judgments, std::cout);
    } catch (const cactus::Error& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
