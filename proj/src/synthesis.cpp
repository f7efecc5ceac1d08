#include "cactus/synthesis.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "cactus/jsonl.hpp"

namespace cactus::pipeline {

using nlohmann::json;

namespace {

std::string kind_code(PipelineError::Kind k) {
    switch (k) {
        case PipelineError::Kind::Io: return "io";
        case PipelineError::Kind::EmptyInput: return "empty_input";
        case PipelineError::Kind::SectionMissing: return "section_missing";
        case PipelineError::Kind::NoSteps: return "no_steps";
        case PipelineError::Kind::BadVerdict: return "bad_verdict";
    }
    return "pipeline_error";
}

llm::ChatRequest make_request(const StageContext& ctx, std::string prompt,
                              std::string scenario, int max_tokens) {
    llm::ChatRequest req;
    req.model_id = ctx.params.model_id;
    req.temperature = ctx.params.temperature;
    req.max_tokens = max_tokens;
    req.scenario = std::move(scenario);
    req.messages = {{llm::Role::User, std::move(prompt)}};
    return req;
}

// Completion with one repair round for stage-level parse failures.
template <typename ParseFn>
auto complete_and_parse(const StageContext& ctx, llm::ChatRequest req,
                        std::string_view repair_instruction, ParseFn parse) {
    std::string reply = llm::complete(ctx.backend, req, ctx.retry);
    try {
        return parse(reply);
    } catch (const Error&) {
        req.messages.push_back({llm::Role::Assistant, reply});
        req.messages.push_back({llm::Role::User, std::string(repair_instruction)});
        reply = llm::complete(ctx.backend, req, ctx.retry);
        return parse(reply);
    }
}

std::string patterns_text(const SeedRecord& seed) {
    std::string out;
    for (size_t i = 0; i < seed.patterns.size(); ++i) {
        if (i) out += ", ";
        out += display_name(seed.patterns[i]);
    }
    return out;
}

} // namespace

PipelineError::PipelineError(Kind kind, const std::string& message)
    : Error(kind_code(kind), message), kind_(kind) {}

// ---------------------------------------------------------------------------
// Seed ingestion
// ---------------------------------------------------------------------------

std::vector<SeedRecord> ingest_seed_records(const std::string& path,
                                            IngestReport* report) {
    std::ifstream in(path);
    if (!in) throw PipelineError(PipelineError::Kind::Io, "cannot open " + path);

    IngestReport local;
    IngestReport& rep = report ? *report : local;
    std::vector<SeedRecord> records;
    std::set<std::string> seen_ids;

    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++rep.total_lines;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            rep.issues.push_back({line_no, "invalid JSON"});
            continue;
        }
        try {
            SeedRecord record = j.get<SeedRecord>();
            record.validate();
            if (!seen_ids.insert(record.id).second) {
                rep.issues.push_back({line_no, "duplicate id '" + record.id + "'"});
                continue;
            }
            records.push_back(std::move(record));
            ++rep.accepted;
        } catch (const std::exception& e) {
            rep.issues.push_back({line_no, e.what()});
        }
    }

    if (records.empty())
        throw PipelineError(PipelineError::Kind::EmptyInput,
                            path + " yielded no valid seed records");
    return records;
}

// ---------------------------------------------------------------------------
// Suitability screening
// ---------------------------------------------------------------------------

std::vector<SuitabilityExemplar> load_suitability_exemplars(const std::string& path) {
    std::vector<SuitabilityExemplar> exemplars;
    jsonl::for_each(path, [&](size_t, const json& j) {
        SuitabilityExemplar e;
        e.thought = j.at("thought").get<std::string>();
        e.suitable = j.at("suitable").get<bool>();
        e.reason = j.value("reason", "");
        exemplars.push_back(std::move(e));
    });
    if (exemplars.empty())
        throw PipelineError(PipelineError::Kind::EmptyInput,
                            path + " holds no exemplars");
    return exemplars;
}

const std::vector<SuitabilityExemplar>& default_suitability_exemplars() {
    static const std::vector<SuitabilityExemplar> exemplars = {
        {"I failed my driving test twice. I will never be able to drive.", true, ""},
        {"My coworkers went to lunch without me; everyone must hate me.", true, ""},
        {"The voices keep telling me my neighbors planted cameras in my walls.",
         false, "describes auditory hallucinations and paranoid delusions"},
        {"I am certain the government broadcasts my thoughts on the radio.", false,
         "describes delusional beliefs"},
        {"I keep replaying the presentation I ruined; I'm useless at my job.", true,
         ""},
        {"I hear my dead brother's voice ordering me to hurt myself at night.",
         false, "describes hallucinations with acute risk of harm"},
    };
    return exemplars;
}

std::string exemplars_text(const std::vector<SuitabilityExemplar>& exemplars) {
    std::ostringstream out;
    for (const auto& e : exemplars) {
        out << "Thought: " << e.thought << "\n";
        out << "Answer: " << (e.suitable ? "Suitable" : "Unsuitable: " + e.reason)
            << "\n\n";
    }
    return out.str();
}

namespace {

Suitability parse_verdict(const std::string& reply) {
    const std::string norm = text::lower(text::trim(reply));
    size_t pos = norm.find("unsuitable");
    if (pos != std::string::npos) {
        Suitability s;
        s.suitable = false;
        size_t colon = reply.find(':', pos);
        s.reason = colon == std::string::npos
                       ? "unspecified"
                       : text::trim(reply.substr(colon + 1));
        if (s.reason.empty()) s.reason = "unspecified";
        return s;
    }
    if (norm.find("suitable") != std::string::npos) return {true, ""};
    throw PipelineError(PipelineError::Kind::BadVerdict,
                        "verdict not recognized: " + reply.substr(0, 80));
}

} // namespace

Suitability classify_suitability(const StageContext& ctx, const SeedRecord& seed,
                                 const std::vector<SuitabilityExemplar>& exemplars) {
    prompts::Bindings bindings{{"exemplars", exemplars_text(exemplars)},
                               {"thought", seed.thought}};
    auto req = make_request(
        ctx, ctx.catalog.render(prompts::TemplateId::SuitabilityFilter, bindings),
        "suitability:" + seed.id, ctx.params.max_tokens);
    return complete_and_parse(
        ctx, std::move(req),
        "Answer with exactly one line: \"Suitable\" or \"Unsuitable: <reason>\".",
        [](const std::string& reply) { return parse_verdict(reply); });
}

// ---------------------------------------------------------------------------
// Intake form
// ---------------------------------------------------------------------------

namespace {

// Alias table: normalized heading text -> section index.
const std::unordered_map<std::string, int>& intake_heading_aliases() {
    static const std::unordered_map<std::string, int> aliases = [] {
        std::unordered_map<std::string, int> m;
        const auto& headings = intake_section_headings();
        for (int i = 0; i < kIntakeSectionCount; ++i)
            m.emplace(text::normalize(headings[i]), i);
        m.emplace("reason for seeking help", 8);
        m.emplace("reason for seeking", 8);
        m.emplace("reasons for seeking counseling", 8);
        m.emplace("past history including medical history", 9);
        m.emplace("past history", 9);
        m.emplace("occupational functioning", 10);
        m.emplace("occupational functioning level", 10);
        m.emplace("academic occupational functioning", 10);
        m.emplace("interpersonal relationship", 11);
        m.emplace("social support", 13);
        return m;
    }();
    return aliases;
}

std::string strip_heading_markup(std::string_view s) {
    std::string t = text::trim(s);
    size_t b = 0, e = t.size();
    while (b < e && (t[b] == '*' || t[b] == '#' || t[b] == '-' || t[b] == '>')) ++b;
    // Enumerated headings: "3. Gender" / "3) Gender".
    size_t d = b;
    while (d < e && std::isdigit(static_cast<unsigned char>(t[d]))) ++d;
    if (d > b && d < e && (t[d] == '.' || t[d] == ')')) b = d + 1;
    while (e > b && (t[e - 1] == '*' || t[e - 1] == '#')) --e;
    return text::trim(t.substr(b, e - b));
}

} // namespace

IntakeForm parse_intake_form(std::string_view completion) {
    IntakeForm form;
    auto fields = form.sections();

    int current = -1;
    for (const auto& line : text::split_lines(completion)) {
        const auto& aliases = intake_heading_aliases();
        size_t colon = line.find(':');
        int section = -1;
        std::string value;
        if (colon != std::string::npos) {
            auto it = aliases.find(
                text::normalize(strip_heading_markup(line.substr(0, colon))));
            if (it != aliases.end()) {
                section = it->second;
                value = text::trim(line.substr(colon + 1));
                // Trailing bold close of "**Heading:**".
                while (!value.empty() && (value.front() == '*' || value.front() == '_'))
                    value.erase(value.begin());
                value = text::trim(value);
            }
        }
        if (section < 0) {
            auto it = aliases.find(text::normalize(strip_heading_markup(line)));
            if (it != aliases.end()) section = it->second;
        }

        if (section >= 0) {
            current = section;
            if (!value.empty()) {
                if (!fields[current]->empty()) *fields[current] += " ";
                *fields[current] += value;
            }
            continue;
        }
        if (current >= 0) {
            std::string cont = text::trim(line);
            if (cont.empty()) continue;
            if (!fields[current]->empty()) *fields[current] += " ";
            *fields[current] += cont;
        }
    }

    const auto& names = intake_section_names();
    for (int i = 0; i < kIntakeSectionCount; ++i) {
        if (fields[i]->empty())
            throw PipelineError(PipelineError::Kind::SectionMissing,
                                "intake form section '" + std::string(names[i]) +
                                    "' is missing");
    }
    return form;
}

IntakeForm generate_intake_form(const StageContext& ctx, const SeedRecord& seed) {
    prompts::Bindings bindings{{"persona", seed.persona},
                               {"thought", seed.thought}};
    auto req = make_request(
        ctx, ctx.catalog.render(prompts::TemplateId::IntakeForm, bindings),
        "intake:" + seed.id, ctx.params.max_tokens);
    return complete_and_parse(
        ctx, std::move(req),
        "Rewrite the whole form and include every required section heading.",
        [](const std::string& reply) { return parse_intake_form(reply); });
}

// ---------------------------------------------------------------------------
// Technique selection and planning
// ---------------------------------------------------------------------------

std::vector<CbtTechnique> select_techniques(const StageContext& ctx,
                                            const SeedRecord& seed) {
    prompts::Bindings bindings{
        {"thought", seed.thought},
        {"patterns", patterns_text(seed)},
        {"reframed_thought", seed.reframed_thought},
        {"technique_catalog", prompts::technique_catalog_text()}};
    auto req = make_request(
        ctx, ctx.catalog.render(prompts::TemplateId::TechniqueSelection, bindings),
        "techniques:" + seed.id, ctx.params.max_tokens);
    return complete_and_parse(
        ctx, std::move(req),
        "Reply as a numbered list of exactly three technique names from the "
        "catalog, nothing else.",
        [](const std::string& reply) {
            return prompts::parse_technique_selection(reply);
        });
}

std::vector<std::string> parse_plan_steps(std::string_view completion) {
    std::vector<std::string> steps;
    for (const auto& line : text::split_lines(completion)) {
        std::string trimmed = text::trim(line);
        size_t d = 0;
        while (d < trimmed.size() && std::isdigit(static_cast<unsigned char>(trimmed[d])))
            ++d;
        if (d > 0 && d < trimmed.size() && (trimmed[d] == '.' || trimmed[d] == ')')) {
            std::string body = text::trim(trimmed.substr(d + 1));
            steps.push_back(body);
            continue;
        }
        if (!steps.empty() && !trimmed.empty()) {
            if (!steps.back().empty()) steps.back() += " ";
            steps.back() += trimmed;
        }
    }
    steps.erase(std::remove_if(steps.begin(), steps.end(),
                               [](const std::string& s) { return s.empty(); }),
                steps.end());
    if (steps.empty())
        throw PipelineError(PipelineError::Kind::NoSteps,
                            "completion has no numbered plan steps");
    return steps;
}

CounselingPlan generate_plan(const StageContext& ctx, const IntakeForm& intake,
                             CbtTechnique technique, const std::string& record_id) {
    prompts::Bindings bindings{
        {"intake_form", intake.to_text()},
        {"technique", std::string(display_name(technique))},
        {"technique_description", std::string(description(technique))}};
    auto req = make_request(
        ctx, ctx.catalog.render(prompts::TemplateId::PlanGeneration, bindings),
        "plan:" + record_id, ctx.params.max_tokens);

    CounselingPlan plan;
    plan.technique = technique;
    plan.steps = complete_and_parse(
        ctx, std::move(req),
        "Respond only as numbered plan steps (\"1.\", \"2.\", ...).",
        [](const std::string& reply) { return parse_plan_steps(reply); });
    return plan;
}

// ---------------------------------------------------------------------------
// Attitude assignment
// ---------------------------------------------------------------------------

Attitude assign_attitude(uint64_t seed, uint64_t index,
                         const AttitudeWeights& weights) {
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                      static_cast<uint32_t>(index),
                      static_cast<uint32_t>(index >> 32)};
    std::mt19937 rng(seq);
    // 53-bit uniform draw in [0, 1), arithmetic pinned for reproducibility.
    const uint64_t hi = rng() >> 5;   // 27 bits
    const uint64_t lo = rng() >> 6;   // 26 bits
    const double u = (static_cast<double>(hi) * 67108864.0 + static_cast<double>(lo)) /
                     9007199254740992.0;

    const double total = weights.positive + weights.neutral + weights.negative;
    const double p_pos = weights.positive / total;
    const double p_neu = weights.neutral / total;
    if (u < p_pos) return Attitude::Positive;
    if (u < p_pos + p_neu) return Attitude::Neutral;
    return Attitude::Negative;
}

// ---------------------------------------------------------------------------
// Script generation
// ---------------------------------------------------------------------------

namespace {

std::string plan_text_with_technique(const CounselingPlan& plan) {
    return "Technique: " + std::string(display_name(plan.technique)) + "\n" +
           plan.to_text();
}

} // namespace

std::string generate_script_text(const StageContext& ctx, const IntakeForm& intake,
                                 const CounselingPlan& plan, Attitude attitude,
                                 const std::string& record_id) {
    prompts::Bindings bindings{
        {"intake_form", intake.to_text()},
        {"plan", plan_text_with_technique(plan)},
        {"attitude", std::string(to_string(attitude))},
        {"attitude_behaviors", prompts::attitude_behaviors_text(attitude)}};
    auto req = make_request(
        ctx, ctx.catalog.render(prompts::TemplateId::ScriptDialogue, bindings),
        "script:" + record_id, ctx.params.max_tokens);
    return llm::complete(ctx.backend, req, ctx.retry);
}

Dialogue generate_script(const StageContext& ctx, const IntakeForm& intake,
                         const CounselingPlan& plan, Attitude attitude,
                         const std::string& record_id) {
    return parse_dialogue(generate_script_text(ctx, intake, plan, attitude, record_id),
                          record_id);
}

// ---------------------------------------------------------------------------
// Selection analysis
// ---------------------------------------------------------------------------

std::map<CbtTechnique, double> technique_distribution(
    const std::vector<std::vector<CbtTechnique>>& selections) {
    if (selections.empty())
        throw PipelineError(PipelineError::Kind::EmptyInput, "no selections");
    std::map<CbtTechnique, size_t> counts;
    size_t total = 0;
    for (const auto& s : selections) {
        if (s.empty()) continue;
        ++counts[s.front()];
        ++total;
    }
    if (total == 0)
        throw PipelineError(PipelineError::Kind::EmptyInput,
                            "selections carry no techniques");
    std::map<CbtTechnique, double> proportions;
    for (const auto& [technique, count] : counts)
        proportions[technique] =
            static_cast<double>(count) / static_cast<double>(total);
    return proportions;
}

} // namespace cactus::pipeline
