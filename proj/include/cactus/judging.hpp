#pragma once

#include <functional>
#include <string>

#include "cactus/dialogue.hpp"
#include "cactus/gateway.hpp"
#include "cactus/model.hpp"
#include "cactus/prompts.hpp"

namespace cactus::judging {

struct JudgeParams {
    std::string model_id = "gpt-4o";
    double temperature = 0.0;
    int max_tokens = 1024;
    const prompts::TemplateCatalog* catalog = nullptr;  // nullptr → builtin
    llm::RetryPolicy retry;
};

const prompts::TemplateCatalog& catalog_of(const JudgeParams& params);

// One completion plus at most one repair round: when parsing fails, the
// judge is re-asked with the reformat instruction appended; the second
// parse error is the caller's.
std::string complete_with_repair(
    llm::ChatBackend& backend, llm::ChatRequest request,
    const llm::RetryPolicy& retry,
    const std::function<void(const std::string&)>& try_parse);

// CtrsJudge at the configured temperature over a rendered transcript.
CtrsScore judge_ctrs(llm::ChatBackend& judge, const Dialogue& dialogue,
                     const JudgeParams& params, const std::string& scenario);

// PanasJudge for one phase ("before"/"after" wording comes from `stage`).
PanasSheet judge_panas(llm::ChatBackend& judge, const IntakeForm& intake,
                       const std::string& stage, const std::string& transcript,
                       const JudgeParams& params, const std::string& scenario);

} // namespace cactus::judging
