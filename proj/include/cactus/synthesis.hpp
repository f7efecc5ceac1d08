#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cactus/dialogue.hpp"
#include "cactus/gateway.hpp"
#include "cactus/model.hpp"
#include "cactus/prompts.hpp"

namespace cactus::pipeline {

class PipelineError : public Error {
public:
    enum class Kind { Io, EmptyInput, SectionMissing, NoSteps, BadVerdict };

    PipelineError(Kind kind, const std::string& message);

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// ---------------------------------------------------------------------------
// Seed ingestion
// ---------------------------------------------------------------------------

struct IngestReport {
    struct Issue {
        size_t line;
        std::string message;
    };
    size_t total_lines = 0;
    size_t accepted = 0;
    std::vector<Issue> issues;
};

// Reads one SeedRecord per line; malformed lines are reported and skipped.
// Throws Io when the file cannot be read and EmptyInput when no line yields
// a record. Duplicate ids are reported and skipped.
std::vector<SeedRecord> ingest_seed_records(const std::string& path,
                                            IngestReport* report = nullptr);

// ---------------------------------------------------------------------------
// LLM-backed stage operations
// ---------------------------------------------------------------------------

struct GenParams {
    std::string model_id = "gpt-4o";
    double temperature = 0.7;
    int max_tokens = 1024;
};

struct StageContext {
    llm::ChatBackend& backend;
    const prompts::TemplateCatalog& catalog;
    GenParams params;
    llm::RetryPolicy retry;
};

struct SuitabilityExemplar {
    std::string thought;
    bool suitable = true;
    std::string reason;
};

// JSONL of {thought, suitable, reason?}.
std::vector<SuitabilityExemplar> load_suitability_exemplars(const std::string& path);
const std::vector<SuitabilityExemplar>& default_suitability_exemplars();
std::string exemplars_text(const std::vector<SuitabilityExemplar>& exemplars);

struct Suitability {
    bool suitable = false;
    std::string reason;  // set when unsuitable
};

// Few-shot screening call. Verdict lines outside the Suitable/Unsuitable
// grammar raise BadVerdict.
Suitability classify_suitability(const StageContext& ctx, const SeedRecord& seed,
                                 const std::vector<SuitabilityExemplar>& exemplars);

// Parses the 14 intake sections from a completion. Throws SectionMissing
// naming the first absent section.
IntakeForm parse_intake_form(std::string_view completion);

// Renders the intake template, completes, parses; retries once with a
// repair instruction before surfacing SectionMissing.
IntakeForm generate_intake_form(const StageContext& ctx, const SeedRecord& seed);

// Top-3 technique selection keyed on thought, patterns and reframed thought;
// one repair retry around parse_technique_selection.
std::vector<CbtTechnique> select_techniques(const StageContext& ctx,
                                            const SeedRecord& seed);

// Numbered plan-step lines ("N. ..."); continuation lines attach to the
// step above. Throws NoSteps when nothing matches.
std::vector<std::string> parse_plan_steps(std::string_view completion);

CounselingPlan generate_plan(const StageContext& ctx, const IntakeForm& intake,
                             CbtTechnique technique, const std::string& record_id);

// ---------------------------------------------------------------------------
// Attitude assignment
// ---------------------------------------------------------------------------

struct AttitudeWeights {
    double positive = 35.55;
    double neutral = 34.47;
    double negative = 29.98;
};

// Deterministic weighted draw; the same (seed, index) always yields the
// same attitude, independent of processing order.
Attitude assign_attitude(uint64_t seed, uint64_t index,
                         const AttitudeWeights& weights = {});

// ---------------------------------------------------------------------------
// Script generation
// ---------------------------------------------------------------------------

// Raw completion of the script prompt, unparsed (the quality filter decides
// what survives).
std::string generate_script_text(const StageContext& ctx, const IntakeForm& intake,
                                 const CounselingPlan& plan, Attitude attitude,
                                 const std::string& record_id);

// Script generation plus parse; dialogue parse errors propagate.
Dialogue generate_script(const StageContext& ctx, const IntakeForm& intake,
                         const CounselingPlan& plan, Attitude attitude,
                         const std::string& record_id);

// ---------------------------------------------------------------------------
// Selection analysis
// ---------------------------------------------------------------------------

// Proportions of first-choice techniques; values sum to 1.
std::map<CbtTechnique, double> technique_distribution(
    const std::vector<std::vector<CbtTechnique>>& selections);

} // namespace cactus::pipeline
