#include "cactus/judging.hpp"

namespace cactus::judging {

const prompts::TemplateCatalog& catalog_of(const JudgeParams& params) {
    return params.catalog ? *params.catalog : prompts::TemplateCatalog::builtin();
}

std::string complete_with_repair(
    llm::ChatBackend& backend, llm::ChatRequest request,
    const llm::RetryPolicy& retry,
    const std::function<void(const std::string&)>& try_parse) {
    std::string reply = llm::complete(backend, request, retry);
    try {
        try_parse(reply);
        return reply;
    } catch (const prompts::JudgeParseError&) {
        request.messages.push_back({llm::Role::Assistant, reply});
        request.messages.push_back(
            {llm::Role::User, std::string(prompts::reformat_instruction())});
        reply = llm::complete(backend, request, retry);
        try_parse(reply);
        return reply;
    }
}

CtrsScore judge_ctrs(llm::ChatBackend& judge, const Dialogue& dialogue,
                     const JudgeParams& params, const std::string& scenario) {
    prompts::Bindings bindings{{"transcript", render_dialogue(dialogue)}};
    llm::ChatRequest req;
    req.model_id = params.model_id;
    req.temperature = params.temperature;
    req.max_tokens = params.max_tokens;
    req.scenario = scenario;
    req.messages = {{llm::Role::User,
                     catalog_of(params).render(prompts::TemplateId::CtrsJudge,
                                               bindings)}};

    CtrsScore score;
    complete_with_repair(judge, std::move(req), params.retry,
                         [&](const std::string& reply) {
                             score = prompts::parse_ctrs_scores(reply);
                         });
    return score;
}

PanasSheet judge_panas(llm::ChatBackend& judge, const IntakeForm& intake,
                       const std::string& stage, const std::string& transcript,
                       const JudgeParams& params, const std::string& scenario) {
    prompts::Bindings bindings{{"intake_form", intake.to_text()},
                               {"stage", stage},
                               {"transcript", transcript}};
    llm::ChatRequest req;
    req.model_id = params.model_id;
    req.temperature = params.temperature;
    req.max_tokens = params.max_tokens;
    req.scenario = scenario;
    req.messages = {{llm::Role::User,
                     catalog_of(params).render(prompts::TemplateId::PanasJudge,
                                               bindings)}};

    PanasSheet sheet;
    complete_with_repair(judge, std::move(req), params.retry,
                         [&](const std::string& reply) {
                             sheet = prompts::parse_panas_scores(reply);
                         });
    return sheet;
}

} // namespace cactus::judging
