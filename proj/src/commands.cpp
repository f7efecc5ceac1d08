#include "cactus/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include "cactus/jsonl.hpp"

namespace cactus::cli {

using nlohmann::json;

std::optional<Stage> stage_from_string(std::string_view name) {
    std::string n = text::normalize(name);
    if (n == "all") return Stage::All;
    if (n == "suitability") return Stage::Suitability;
    if (n == "intake") return Stage::Intake;
    if (n == "techniques") return Stage::Techniques;
    if (n == "plan") return Stage::Plan;
    if (n == "dialogue") return Stage::Dialogue;
    return std::nullopt;
}

llm::BackendSpec RunConfig::backend_spec(const std::string& model_id) const {
    llm::BackendSpec spec;
    spec.kind = backend_kind;
    spec.base_url = base_url;
    spec.api_key_env = api_key_env;
    spec.fixture_path = fixtures_path;
    spec.model_id = model_id;
    spec.timeout_s = timeout_s;
    return spec;
}

prompts::TemplateCatalog RunConfig::catalog() const {
    if (prompts_dir.empty()) return prompts::TemplateCatalog::builtin();
    return prompts::TemplateCatalog::load_dir(prompts_dir);
}

std::string RunConfig::timestamp() const {
    if (backend_kind == llm::BackendKind::Mock) return "1970-01-01T00:00:00Z";
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string RunConfig::path(const std::string& file) const {
    return (std::filesystem::path(out_dir) / file).string();
}

namespace {

std::string config_key(std::string_view section, std::string_view key) {
    std::string full;
    if (!section.empty()) {
        full += text::normalize(section);
        full += '.';
    }
    std::string k = text::lower(text::trim(key));
    std::replace(k.begin(), k.end(), '-', '_');
    full += k;
    return full;
}

long long config_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw Error("config", "config key '" + key + "' wants an integer, got '" +
                                  value + "'");
    }
}

double config_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw Error("config", "config key '" + key + "' wants a number, got '" +
                                  value + "'");
    }
}

} // namespace

void load_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw Error("config", "cannot open config file " + path);

    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"seed", [&](const std::string& k, const std::string& v) {
             cfg.seed = static_cast<uint64_t>(config_int(k, v));
         }},
        {"concurrency", [&](const std::string& k, const std::string& v) {
             cfg.concurrency = static_cast<int>(config_int(k, v));
         }},
        {"out_dir", [&](const std::string&, const std::string& v) { cfg.out_dir = v; }},
        {"backend", [&](const std::string& k, const std::string& v) {
             if (v == "mock") cfg.backend_kind = llm::BackendKind::Mock;
             else if (v == "http") cfg.backend_kind = llm::BackendKind::Http;
             else throw Error("config", "config key '" + k +
                                            "' wants mock or http, got '" + v + "'");
         }},
        {"fixtures", [&](const std::string&, const std::string& v) {
             cfg.fixtures_path = v;
         }},
        {"gateway.base_url", [&](const std::string&, const std::string& v) {
             cfg.base_url = v;
         }},
        {"gateway.api_key_env", [&](const std::string&, const std::string& v) {
             cfg.api_key_env = v;
         }},
        {"gateway.timeout_s", [&](const std::string& k, const std::string& v) {
             cfg.timeout_s = config_double(k, v);
         }},
        {"gateway.retry_max_attempts", [&](const std::string& k, const std::string& v) {
             cfg.retry.max_attempts = static_cast<int>(config_int(k, v));
         }},
        {"gateway.retry_base_delay_ms", [&](const std::string& k, const std::string& v) {
             cfg.retry.base_delay = std::chrono::milliseconds(config_int(k, v));
         }},
        {"models.generator", [&](const std::string&, const std::string& v) {
             cfg.generator_model = v;
         }},
        {"models.filter_judge", [&](const std::string&, const std::string& v) {
             cfg.filter_judge_model = v;
         }},
        {"models.eval_judge", [&](const std::string&, const std::string& v) {
             cfg.eval_judge_model = v;
         }},
        {"models.client", [&](const std::string&, const std::string& v) {
             cfg.client_model = v;
         }},
        {"models.counselor", [&](const std::string&, const std::string& v) {
             cfg.counselor_model = v;
         }},
        {"sampling.gen_temperature", [&](const std::string& k, const std::string& v) {
             cfg.gen_temperature = config_double(k, v);
         }},
        {"sampling.judge_temperature", [&](const std::string& k, const std::string& v) {
             cfg.judge_temperature = config_double(k, v);
         }},
        {"sampling.form_max_tokens", [&](const std::string& k, const std::string& v) {
             cfg.form_max_tokens = static_cast<int>(config_int(k, v));
         }},
        {"sampling.script_max_tokens", [&](const std::string& k, const std::string& v) {
             cfg.script_max_tokens = static_cast<int>(config_int(k, v));
         }},
        {"limits.min_utterances", [&](const std::string& k, const std::string& v) {
             cfg.bounds.min_utterances = static_cast<int>(config_int(k, v));
         }},
        {"limits.max_utterances", [&](const std::string& k, const std::string& v) {
             cfg.bounds.max_utterances = static_cast<int>(config_int(k, v));
         }},
        {"limits.ctrs_threshold", [&](const std::string& k, const std::string& v) {
             cfg.ctrs_threshold = config_double(k, v);
         }},
        {"limits.cap_exchanges", [&](const std::string& k, const std::string& v) {
             cfg.cap_exchanges = static_cast<int>(config_int(k, v));
         }},
        {"weights.positive", [&](const std::string& k, const std::string& v) {
             cfg.weights.positive = config_double(k, v);
         }},
        {"weights.neutral", [&](const std::string& k, const std::string& v) {
             cfg.weights.neutral = config_double(k, v);
         }},
        {"weights.negative", [&](const std::string& k, const std::string& v) {
             cfg.weights.negative = config_double(k, v);
         }},
        {"paths.seeds", [&](const std::string&, const std::string& v) {
             cfg.seeds_path = v;
         }},
        {"paths.prompts_dir", [&](const std::string&, const std::string& v) {
             cfg.prompts_dir = v;
         }},
        {"paths.exemplars", [&](const std::string&, const std::string& v) {
             cfg.exemplars_path = v;
         }},
        {"paths.occupations", [&](const std::string&, const std::string& v) {
             cfg.occupations_path = v;
         }},
    };

    std::string section;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = text::trim(line);
        if (trimmed.empty() || trimmed[0] == '#' || trimmed[0] == ';') continue;
        if (trimmed.front() == '[') {
            if (trimmed.back() != ']')
                throw Error("config", path + ":" + std::to_string(line_no) +
                                          ": malformed section header");
            section = text::trim(trimmed.substr(1, trimmed.size() - 2));
            continue;
        }
        size_t eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw Error("config", path + ":" + std::to_string(line_no) +
                                      ": expected key = value");
        const std::string key = config_key(section, trimmed.substr(0, eq));
        const std::string value = text::trim(trimmed.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end())
            throw Error("config", path + ":" + std::to_string(line_no) +
                                      ": unknown config key '" + key + "'");
        it->second(key, value);
    }
}

namespace {

uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

json stage_meta(const RunConfig& cfg, const std::string& model, double temperature) {
    return json{{"model_id", model},
                {"temperature", temperature},
                {"timestamp", cfg.timestamp()}};
}

void print_header(const RunConfig& cfg, std::ostream& out, const char* command) {
    out << "[" << command << "] seed=" << cfg.seed
        << " concurrency=" << cfg.concurrency << " out_dir=" << cfg.out_dir << "\n";
}

// Ordered id -> payload view of a stage file.
struct StageFileView {
    std::vector<std::string> order;
    std::map<std::string, json> payloads;
};

StageFileView read_stage_file(const std::string& path) {
    StageFileView view;
    jsonl::for_each(path, [&](size_t, const json& j) {
        std::string id = j.at("id").get<std::string>();
        view.order.push_back(id);
        view.payloads[id] = j.at("payload");
    });
    return view;
}

struct StageOutcome {
    size_t inputs = 0;
    size_t cached = 0;
    size_t produced = 0;
    size_t failed = 0;
};

// Runs `process` over every input id not yet present in `out_path` (or in
// `also_done`), with bounded concurrency, appending results in input order.
// `process` may return nullopt to drop a record silently (the caller records
// it elsewhere); failures land in the stage failures file and are retried on
// the next run.
template <typename Item>
StageOutcome run_stage(const RunConfig& cfg, std::ostream& out,
                       const std::string& stage_name, const std::string& out_path,
                       const std::vector<Item>& items,
                       const std::function<std::string(const Item&)>& id_of,
                       const std::function<std::optional<json>(const Item&)>& process,
                       const json& meta,
                       const std::set<std::string>& also_done = {}) {
    StageOutcome outcome;
    outcome.inputs = items.size();

    auto done = jsonl::existing_ids(out_path);
    done.insert(also_done.begin(), also_done.end());

    std::vector<size_t> pending;
    for (size_t i = 0; i < items.size(); ++i) {
        if (done.count(id_of(items[i]))) ++outcome.cached;
        else pending.push_back(i);
    }

    std::vector<std::optional<json>> payloads(pending.size());
    std::vector<std::optional<std::string>> errors(pending.size());
    llm::run_tasks(pending.size(), cfg.concurrency, [&](size_t k) {
        try {
            payloads[k] = process(items[pending[k]]);
        } catch (const std::exception& e) {
            errors[k] = e.what();
        }
    });

    jsonl::Writer writer(out_path);
    std::optional<jsonl::Writer> failures;
    for (size_t k = 0; k < pending.size(); ++k) {
        const std::string id = id_of(items[pending[k]]);
        if (payloads[k]) {
            writer.write(json{{"id", id}, {"payload", *payloads[k]}, {"meta", meta}});
            ++outcome.produced;
        } else if (errors[k]) {
            if (!failures) failures.emplace(cfg.path(stage_name + "_failures.jsonl"));
            failures->write(json{{"id", id}, {"stage", stage_name},
                                 {"error", *errors[k]}});
            ++outcome.failed;
        }
    }

    out << "stage " << stage_name << ": " << outcome.inputs << " inputs, "
        << outcome.cached << " cached, " << outcome.produced << " produced, "
        << outcome.failed << " failed\n";
    return outcome;
}

} // namespace

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

namespace {

struct GenerateEnv {
    std::shared_ptr<llm::ChatBackend> backend;
    prompts::TemplateCatalog catalog;
    std::vector<pipeline::SuitabilityExemplar> exemplars;

    pipeline::StageContext context(const RunConfig& cfg, int max_tokens) const {
        return pipeline::StageContext{*backend, catalog,
                                      pipeline::GenParams{cfg.generator_model,
                                                          cfg.gen_temperature,
                                                          max_tokens},
                                      cfg.retry};
    }
};

bool wants(Stage requested, Stage stage) {
    return requested == Stage::All || requested == stage;
}

} // namespace

int cmd_generate(const RunConfig& cfg, Stage stage, std::ostream& out) {
    print_header(cfg, out, "generate");
    std::filesystem::create_directories(cfg.out_dir);

    GenerateEnv env;
    env.backend = llm::make_backend(cfg.backend_spec(cfg.generator_model));
    env.catalog = cfg.catalog();
    env.exemplars = cfg.exemplars_path.empty()
                        ? pipeline::default_suitability_exemplars()
                        : pipeline::load_suitability_exemplars(cfg.exemplars_path);

    size_t total_failed = 0;

    if (wants(stage, Stage::Suitability)) {
        pipeline::IngestReport report;
        auto seeds = pipeline::ingest_seed_records(cfg.seeds_path, &report);
        for (const auto& issue : report.issues)
            out << "seeds:" << issue.line << ": skipped (" << issue.message << ")\n";

        auto unsuitable_ids = jsonl::existing_ids(cfg.path("unsuitable.jsonl"));
        auto ctx = env.context(cfg, cfg.form_max_tokens);
        std::mutex unsuitable_mutex;
        std::map<std::string, std::string> newly_unsuitable;
        auto outcome = run_stage<SeedRecord>(
            cfg, out, "suitability", cfg.path("suitable.jsonl"), seeds,
            [](const SeedRecord& s) { return s.id; },
            [&](const SeedRecord& s) -> std::optional<json> {
                auto verdict = pipeline::classify_suitability(ctx, s, env.exemplars);
                if (!verdict.suitable) {
                    std::lock_guard<std::mutex> lock(unsuitable_mutex);
                    newly_unsuitable.emplace(s.id, verdict.reason);
                    return std::nullopt;
                }
                return json(s);
            },
            stage_meta(cfg, cfg.generator_model, cfg.gen_temperature),
            unsuitable_ids);
        if (!newly_unsuitable.empty()) {
            jsonl::Writer unsuitable(cfg.path("unsuitable.jsonl"));
            for (const auto& [id, reason] : newly_unsuitable)
                unsuitable.write(json{{"id", id}, {"reason", reason}});
            out << "stage suitability: " << newly_unsuitable.size()
                << " seeds screened out\n";
        }
        total_failed += outcome.failed;
    }

    if (wants(stage, Stage::Intake)) {
        auto suitable = read_stage_file(cfg.path("suitable.jsonl"));
        std::vector<SeedRecord> seeds;
        for (const auto& id : suitable.order)
            seeds.push_back(suitable.payloads.at(id).get<SeedRecord>());
        auto ctx = env.context(cfg, cfg.form_max_tokens);
        auto outcome = run_stage<SeedRecord>(
            cfg, out, "intake", cfg.path("intake.jsonl"), seeds,
            [](const SeedRecord& s) { return s.id; },
            [&](const SeedRecord& s) -> json {
                return json{{"intake_form",
                             pipeline::generate_intake_form(ctx, s)}};
            },
            stage_meta(cfg, cfg.generator_model, cfg.gen_temperature));
        total_failed += outcome.failed;
    }

    if (wants(stage, Stage::Techniques)) {
        auto suitable = read_stage_file(cfg.path("suitable.jsonl"));
        std::vector<SeedRecord> seeds;
        for (const auto& id : suitable.order)
            seeds.push_back(suitable.payloads.at(id).get<SeedRecord>());
        auto ctx = env.context(cfg, cfg.form_max_tokens);
        auto outcome = run_stage<SeedRecord>(
            cfg, out, "techniques", cfg.path("techniques.jsonl"), seeds,
            [](const SeedRecord& s) { return s.id; },
            [&](const SeedRecord& s) -> json {
                auto picks = pipeline::select_techniques(ctx, s);
                json names = json::array();
                for (auto t : picks) names.push_back(std::string(to_string(t)));
                return json{{"techniques", std::move(names)}};
            },
            stage_meta(cfg, cfg.generator_model, cfg.gen_temperature));
        total_failed += outcome.failed;
    }

    struct PlanInput {
        std::string id;
        IntakeForm intake;
        CbtTechnique technique;
    };

    if (wants(stage, Stage::Plan)) {
        auto intake = read_stage_file(cfg.path("intake.jsonl"));
        auto techniques = read_stage_file(cfg.path("techniques.jsonl"));
        std::vector<PlanInput> inputs;
        for (const auto& id : intake.order) {
            auto it = techniques.payloads.find(id);
            if (it == techniques.payloads.end()) continue;
            PlanInput in;
            in.id = id;
            in.intake = intake.payloads.at(id).at("intake_form").get<IntakeForm>();
            // Planning keys on the first-ranked technique; all three stay on file.
            auto first = it->second.at("techniques").at(0).get<std::string>();
            in.technique = technique_from_string(first).value();
            inputs.push_back(std::move(in));
        }
        auto ctx = env.context(cfg, cfg.form_max_tokens);
        auto outcome = run_stage<PlanInput>(
            cfg, out, "plan", cfg.path("plans.jsonl"), inputs,
            [](const PlanInput& in) { return in.id; },
            [&](const PlanInput& in) -> json {
                return json(pipeline::generate_plan(ctx, in.intake, in.technique,
                                                    in.id));
            },
            stage_meta(cfg, cfg.generator_model, cfg.gen_temperature));
        total_failed += outcome.failed;
    }

    struct ScriptInput {
        std::string id;
        IntakeForm intake;
        CounselingPlan plan;
        Attitude attitude;
    };

    if (wants(stage, Stage::Dialogue)) {
        auto intake = read_stage_file(cfg.path("intake.jsonl"));
        auto plans = read_stage_file(cfg.path("plans.jsonl"));
        std::vector<ScriptInput> inputs;
        for (const auto& id : plans.order) {
            auto it = intake.payloads.find(id);
            if (it == intake.payloads.end()) continue;
            ScriptInput in;
            in.id = id;
            in.intake = it->second.at("intake_form").get<IntakeForm>();
            in.plan = plans.payloads.at(id).get<CounselingPlan>();
            in.attitude = pipeline::assign_attitude(cfg.seed, fnv1a64(id), cfg.weights);
            inputs.push_back(std::move(in));
        }
        auto ctx = env.context(cfg, cfg.script_max_tokens);
        auto outcome = run_stage<ScriptInput>(
            cfg, out, "dialogue", cfg.path("dialogues_raw.jsonl"), inputs,
            [](const ScriptInput& in) { return in.id; },
            [&](const ScriptInput& in) -> json {
                std::string script = pipeline::generate_script_text(
                    ctx, in.intake, in.plan, in.attitude, in.id);
                return json{{"attitude", std::string(to_string(in.attitude))},
                            {"script", std::move(script)}};
            },
            stage_meta(cfg, cfg.generator_model, cfg.gen_temperature));
        total_failed += outcome.failed;
    }

    out << "generate done; per-record failures: " << total_failed << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// filter
// ---------------------------------------------------------------------------

int cmd_filter(const RunConfig& cfg, std::ostream& out) {
    print_header(cfg, out, "filter");
    std::filesystem::create_directories(cfg.out_dir);

    struct RawDialogue {
        std::string id;
        std::string attitude;
        std::string script;
    };
    std::vector<RawDialogue> raw;
    jsonl::for_each(cfg.path("dialogues_raw.jsonl"), [&](size_t, const json& j) {
        RawDialogue r;
        r.id = j.at("id").get<std::string>();
        const auto& payload = j.at("payload");
        r.attitude = payload.value("attitude", "");
        r.script = payload.at("script").get<std::string>();
        raw.push_back(std::move(r));
    });
    if (raw.empty())
        throw pipeline::PipelineError(pipeline::PipelineError::Kind::EmptyInput,
                                      "dialogues_raw.jsonl holds no records");

    const std::string scored_path = cfg.path("dialogues_scored.jsonl");
    const std::string quarantine_path = cfg.path("quarantine.jsonl");
    auto processed = jsonl::existing_ids(scored_path);
    {
        auto quarantined = jsonl::existing_ids(quarantine_path);
        processed.insert(quarantined.begin(), quarantined.end());
    }

    // Structural pass over unprocessed records.
    struct Survivor {
        size_t raw_index;
        Dialogue dialogue;
    };
    std::vector<Survivor> survivors;
    std::vector<std::pair<std::string, filter::FilterDecision>> basic_drops;
    for (size_t i = 0; i < raw.size(); ++i) {
        if (processed.count(raw[i].id)) continue;
        try {
            Dialogue d = parse_dialogue(raw[i].script, raw[i].id);
            auto decision = filter::basic_filter(d, cfg.bounds);
            if (decision.keep) survivors.push_back({i, std::move(d)});
            else basic_drops.emplace_back(raw[i].id, decision);
        } catch (const DialogueParseError& e) {
            filter::FilterDecision decision;
            decision.reason = filter::DropReason::Malformed;
            decision.detail = e.what();
            basic_drops.emplace_back(raw[i].id, decision);
        }
    }

    // CTRS pass, judge model per config.
    auto judge = llm::make_backend(cfg.backend_spec(cfg.filter_judge_model));
    auto catalog = cfg.catalog();
    judging::JudgeParams judge_params;
    judge_params.model_id = cfg.filter_judge_model;
    judge_params.temperature = cfg.judge_temperature;
    judge_params.catalog = &catalog;
    judge_params.retry = cfg.retry;

    std::vector<std::optional<CtrsScore>> scores(survivors.size());
    std::vector<std::string> score_errors(survivors.size());
    llm::run_tasks(survivors.size(), cfg.concurrency, [&](size_t k) {
        try {
            scores[k] = filter::score_ctrs(*judge, survivors[k].dialogue, judge_params);
        } catch (const std::exception& e) {
            score_errors[k] = e.what();
        }
    });

    // Upstream stage payloads for bundle assembly (when present).
    auto try_read = [&](const std::string& file) -> StageFileView {
        if (!std::filesystem::exists(cfg.path(file))) return {};
        return read_stage_file(cfg.path(file));
    };
    auto suitable = try_read("suitable.jsonl");
    auto intake = try_read("intake.jsonl");
    auto techniques = try_read("techniques.jsonl");
    auto plans = try_read("plans.jsonl");

    jsonl::Writer quarantine(quarantine_path);
    for (const auto& [id, decision] : basic_drops)
        quarantine.write(json{{"id", id},
                              {"stage", "basic"},
                              {"reason", std::string(to_string(decision.reason))},
                              {"detail", decision.detail}});

    jsonl::Writer scored(scored_path);
    std::optional<jsonl::Writer> bundles;
    std::optional<jsonl::Writer> failures;
    size_t score_failures = 0;
    for (size_t k = 0; k < survivors.size(); ++k) {
        const auto& r = raw[survivors[k].raw_index];
        if (!scores[k]) {
            if (!failures) failures.emplace(cfg.path("filter_failures.jsonl"));
            failures->write(json{{"id", r.id}, {"stage", "ctrs"},
                                 {"error", score_errors[k]}});
            ++score_failures;
            continue;
        }
        const CtrsScore& score = *scores[k];
        const double mean = filter::ctrs_mean(score);
        const bool keep = filter::ctrs_keep(score, cfg.ctrs_threshold);
        scored.write(json{{"id", r.id},
                          {"scores", score},
                          {"mean", mean},
                          {"decision", keep ? "keep" : "drop"}});
        if (!keep) {
            quarantine.write(json{{"id", r.id},
                                  {"stage", "ctrs"},
                                  {"reason", "below_threshold"},
                                  {"detail", "mean " + std::to_string(mean)}});
            continue;
        }
        if (!bundles) bundles.emplace(cfg.path("cactus.jsonl"));
        json bundle{{"id", r.id},
                    {"attitude", r.attitude},
                    {"dialogue", survivors[k].dialogue},
                    {"ctrs", json{{"scores", score}, {"mean", mean}}}};
        if (auto it = suitable.payloads.find(r.id); it != suitable.payloads.end())
            bundle["seed"] = it->second;
        if (auto it = intake.payloads.find(r.id); it != intake.payloads.end())
            bundle["intake_form"] = it->second.at("intake_form");
        if (auto it = techniques.payloads.find(r.id); it != techniques.payloads.end())
            bundle["techniques"] = it->second.at("techniques");
        if (auto it = plans.payloads.find(r.id); it != plans.payloads.end())
            bundle["plan"] = it->second;
        bundles->write(bundle);
    }

    // Retention over the whole corpus (prior runs included), derived from the
    // final state of the stage files.
    size_t basic_dropped = 0, ctrs_dropped = 0, ctrs_kept = 0;
    jsonl::for_each(quarantine_path, [&](size_t, const json& j) {
        if (j.at("stage") == "basic") ++basic_dropped;
        else ++ctrs_dropped;
    });
    jsonl::for_each(scored_path, [&](size_t, const json& j) {
        if (j.at("decision") == "keep") ++ctrs_kept;
    });
    filter::StageCounts counts;
    counts.input = raw.size();
    counts.basic_kept = counts.input - basic_dropped;
    counts.ctrs_kept = ctrs_kept;
    auto stats = filter::filter_report(counts);
    out << stats.render_text();
    out << "quarantined: " << (basic_dropped + ctrs_dropped)
        << ", scoring failures: " << score_failures << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

int cmd_eval(const RunConfig& cfg, const std::vector<std::string>& counselor_models,
             const std::string& testset_path, std::ostream& out) {
    print_header(cfg, out, "eval");
    std::filesystem::create_directories(cfg.out_dir);

    auto profiles = eval::load_profiles(testset_path);
    auto instances = eval::build_testset(profiles);
    if (instances.empty())
        throw eval::EvalError(eval::EvalError::Kind::EmptyInput,
                              "testset has no profiles");
    out << "testset: " << profiles.size() << " profiles, " << instances.size()
        << " instances\n";

    std::vector<std::string> counselors =
        counselor_models.empty() ? std::vector<std::string>{cfg.counselor_model}
                                 : counselor_models;

    auto backend = llm::make_backend(cfg.backend_spec(cfg.counselor_model));
    auto catalog = cfg.catalog();

    const std::string sessions_path = cfg.path("sessions.jsonl");
    const std::string scores_path = cfg.path("scores.jsonl");
    size_t failures_total = 0;

    for (const auto& counselor : counselors) {
        eval::SessionParams params;
        params.cap_exchanges = cfg.cap_exchanges;
        params.temperature = cfg.gen_temperature;
        params.counselor_model = counselor;
        params.client_model = cfg.client_model;
        params.catalog = &catalog;
        params.retry = cfg.retry;

        auto outcome = run_stage<EvalInstance>(
            cfg, out, "sessions", sessions_path, instances,
            [&](const EvalInstance& inst) {
                return counselor + "|" + inst.instance_id();
            },
            [&](const EvalInstance& inst) -> json {
                auto session = eval::run_session(*backend, *backend, inst, params);
                return json{
                    {"instance_id", inst.instance_id()},
                    {"counselor", counselor},
                    {"attitude", std::string(to_string(inst.attitude))},
                    {"transcript", render_dialogue(session.dialogue)},
                    {"ended_by", std::string(to_string(session.ended_by))},
                    {"exchanges", session.exchanges},
                    {"truncated", session.dialogue.truncated}};
            },
            stage_meta(cfg, counselor, cfg.gen_temperature));
        failures_total += outcome.failed;
    }

    // Scoring pass over every stored session of the requested counselors.
    struct StoredSession {
        std::string id;
        eval::Session session;
    };
    std::vector<StoredSession> stored;
    std::map<std::string, const EvalInstance*> by_instance_id;
    for (const auto& inst : instances) by_instance_id[inst.instance_id()] = &inst;
    jsonl::for_each(sessions_path, [&](size_t, const json& j) {
        const auto& payload = j.at("payload");
        const std::string counselor = payload.at("counselor").get<std::string>();
        if (std::find(counselors.begin(), counselors.end(), counselor) ==
            counselors.end())
            return;
        auto it = by_instance_id.find(payload.at("instance_id").get<std::string>());
        if (it == by_instance_id.end()) return;
        StoredSession s;
        s.id = j.at("id").get<std::string>();
        s.session.instance = *it->second;
        s.session.counselor_label = counselor;
        s.session.dialogue =
            parse_dialogue(payload.at("transcript").get<std::string>(),
                           it->second->instance_id());
        s.session.dialogue.truncated = payload.value("truncated", false);
        s.session.exchanges = payload.value("exchanges", 0);
        s.session.ended_by = payload.at("ended_by") == "cap"
                                 ? eval::EndReason::Cap
                                 : eval::EndReason::EndToken;
        stored.push_back(std::move(s));
    });

    judging::JudgeParams judge_params;
    judge_params.model_id = cfg.eval_judge_model;
    judge_params.temperature = cfg.judge_temperature;
    judge_params.catalog = &catalog;
    judge_params.retry = cfg.retry;

    auto outcome = run_stage<StoredSession>(
        cfg, out, "scores", scores_path, stored,
        [](const StoredSession& s) { return s.id; },
        [&](const StoredSession& s) -> json {
            CtrsScore ctrs = eval::evaluate_ctrs(*backend, s.session, judge_params);
            eval::PanasPair panas =
                eval::evaluate_panas(*backend, s.session, judge_params);
            return json{{"instance_id", s.session.instance.instance_id()},
                        {"counselor", s.session.counselor_label},
                        {"attitude",
                         std::string(to_string(s.session.instance.attitude))},
                        {"truncated", s.session.dialogue.truncated},
                        {"ctrs", ctrs},
                        {"panas", json{{"pre", panas.pre},
                                       {"post", panas.post},
                                       {"delta_positive", panas.delta_positive},
                                       {"delta_negative", panas.delta_negative}}}};
        },
        stage_meta(cfg, cfg.eval_judge_model, cfg.judge_temperature));
    failures_total += outcome.failed;

    // Aggregate every stored score for the requested counselors.
    std::vector<eval::ScoredSession> scored_sessions;
    jsonl::for_each(scores_path, [&](size_t, const json& j) {
        const auto& payload = j.at("payload");
        const std::string counselor = payload.at("counselor").get<std::string>();
        if (std::find(counselors.begin(), counselors.end(), counselor) ==
            counselors.end())
            return;
        eval::ScoredSession s;
        s.instance_id = payload.at("instance_id").get<std::string>();
        s.counselor_label = counselor;
        s.attitude =
            attitude_from_string(payload.at("attitude").get<std::string>()).value();
        s.truncated = payload.value("truncated", false);
        s.ctrs = payload.at("ctrs").get<CtrsScore>();
        const auto& panas = payload.at("panas");
        s.panas = eval::PanasPair::of(panas.at("pre").get<PanasSheet>(),
                                      panas.at("post").get<PanasSheet>());
        scored_sessions.push_back(std::move(s));
    });
    if (!scored_sessions.empty()) {
        auto tables = eval::aggregate(scored_sessions);
        out << tables.render_text();
        std::ofstream report(cfg.path("report.json"), std::ios::trunc);
        report << json(tables).dump(2) << "\n";
    }
    out << "eval done; per-record failures: " << failures_total << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

namespace {

struct OccupationTable {
    // Priority-ordered (category, keywords) rows; first match wins.
    std::vector<std::pair<std::string, std::vector<std::string>>> rows;
    std::string fallback = "Miscellaneous/Other";

    std::string classify(std::string_view occupation) const {
        const std::string norm = " " + text::normalize(occupation) + " ";
        for (const auto& [category, keywords] : rows) {
            for (const auto& keyword : keywords) {
                if (norm.find(" " + keyword + " ") != std::string::npos)
                    return category;
            }
        }
        return fallback;
    }
};

OccupationTable builtin_occupation_table() {
    OccupationTable table;
    table.rows = {
        {"Healthcare",
         {"nurse", "doctor", "physician", "therapist", "dentist", "surgeon",
          "paramedic", "pharmacist", "veterinarian", "caregiver"}},
        {"Education",
         {"teacher", "professor", "tutor", "educator", "instructor", "principal",
          "lecturer"}},
        {"Student",
         {"student", "undergraduate", "graduate", "pupil", "phd candidate"}},
        {"Arts/Entertainment",
         {"artist", "musician", "actor", "actress", "writer", "designer",
          "photographer", "dancer", "singer", "painter", "illustrator"}},
        {"Service/Retail",
         {"waiter", "waitress", "barista", "cashier", "retail", "salesperson",
          "server", "clerk", "receptionist", "bartender", "chef", "cook",
          "hairdresser"}},
        {"Skilled Trades/Labor",
         {"electrician", "plumber", "carpenter", "mechanic", "welder",
          "construction", "farmer", "driver", "machinist", "landscaper",
          "technician"}},
        {"Professional",
         {"engineer", "researcher", "scientist", "analyst", "accountant",
          "lawyer", "manager", "consultant", "developer", "programmer",
          "architect", "banker", "economist"}},
    };
    return table;
}

OccupationTable load_occupation_table(const std::string& path) {
    OccupationTable table;
    jsonl::for_each(path, [&](size_t, const json& j) {
        table.rows.emplace_back(j.at("category").get<std::string>(),
                                j.at("keywords").get<std::vector<std::string>>());
    });
    return table;
}

std::string age_bucket(const std::optional<int>& years) {
    if (!years) return "unknown";
    int decade = (*years / 10) * 10;
    return std::to_string(decade) + "-" + std::to_string(decade + 9);
}

std::string gender_bucket(std::string_view gender) {
    std::string n = text::normalize(gender);
    if (n == "female" || n == "woman" || n == "f") return "Female";
    if (n == "male" || n == "man" || n == "m") return "Male";
    return "Unknown";
}

void print_distribution(std::ostream& out, const std::string& group,
                        const std::vector<std::pair<std::string, size_t>>& counts,
                        size_t total) {
    for (const auto& [key, count] : counts) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f",
                      100.0 * static_cast<double>(count) /
                          static_cast<double>(total));
        out << group << " | " << key << " | " << buf << "\n";
    }
}

} // namespace

int cmd_stats(const RunConfig& cfg, const std::string& bundles_path,
              std::ostream& out) {
    print_header(cfg, out, "stats");

    OccupationTable occupations = cfg.occupations_path.empty()
                                      ? builtin_occupation_table()
                                      : load_occupation_table(cfg.occupations_path);

    size_t total = 0;
    std::map<std::string, size_t> by_attitude, by_gender, by_age, by_occupation,
        by_pattern;
    jsonl::for_each(bundles_path, [&](size_t, const json& j) {
        ++total;
        if (j.contains("attitude")) ++by_attitude[j.at("attitude").get<std::string>()];
        if (j.contains("intake_form")) {
            IntakeForm form = j.at("intake_form").get<IntakeForm>();
            ++by_gender[gender_bucket(form.gender)];
            ++by_age[age_bucket(form.age_years())];
            ++by_occupation[occupations.classify(form.occupation)];
        }
        if (j.contains("seed")) {
            for (const auto& p : j.at("seed").at("patterns"))
                ++by_pattern[p.get<std::string>()];
        }
    });
    if (total == 0)
        throw eval::EvalError(eval::EvalError::Kind::EmptyInput,
                              bundles_path + " holds no bundles");

    out << "bundles: " << total << "\n";

    auto ordered = [](const std::map<std::string, size_t>& m,
                      const std::vector<std::string>& preferred) {
        std::vector<std::pair<std::string, size_t>> rows;
        for (const auto& key : preferred) {
            auto it = m.find(key);
            if (it != m.end()) rows.emplace_back(it->first, it->second);
        }
        for (const auto& [key, count] : m) {
            if (std::find(preferred.begin(), preferred.end(), key) ==
                preferred.end())
                rows.emplace_back(key, count);
        }
        return rows;
    };

    print_distribution(out, "attitude",
                       ordered(by_attitude, {"positive", "neutral", "negative"}),
                       total);
    if (!by_gender.empty())
        print_distribution(out, "gender",
                           ordered(by_gender, {"Female", "Male", "Unknown"}), total);
    if (!by_age.empty())
        print_distribution(out, "age_group", ordered(by_age, {}), total);
    if (!by_occupation.empty()) {
        std::vector<std::string> cat_order;
        for (const auto& [category, keywords] : occupations.rows) {
            (void)keywords;
            cat_order.push_back(category);
        }
        cat_order.push_back(occupations.fallback);
        print_distribution(out, "occupation", ordered(by_occupation, cat_order),
                           total);
    }
    if (!by_pattern.empty()) {
        size_t pattern_total = 0;
        for (const auto& [key, count] : by_pattern) pattern_total += count;
        std::vector<std::string> pattern_order;
        for (auto p : kAllPatternKinds)
            pattern_order.push_back(std::string(to_string(p)));
        print_distribution(out, "pattern", ordered(by_pattern, pattern_order),
                           pattern_total);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

int cmd_compare(const RunConfig& cfg, const std::string& judgments_path,
                std::ostream& out) {
    print_header(cfg, out, "compare");

    std::vector<eval::Judgment> judgments;
    jsonl::for_each(judgments_path, [&](size_t line, const json& j) {
        eval::Judgment judgment;
        judgment.item_id = j.at("item_id").get<std::string>();
        judgment.criterion = j.at("criterion").get<std::string>();
        auto outcome = eval::outcome_from_string(j.at("outcome").get<std::string>());
        if (!outcome)
            throw Error("bad_outcome", judgments_path + ":" + std::to_string(line) +
                                           ": unknown outcome");
        judgment.outcome = *outcome;
        judgments.push_back(std::move(judgment));
    });

    auto report = eval::head_to_head(judgments);
    out << report.render_text();
    return 0;
}

} // namespace cactus::cli
