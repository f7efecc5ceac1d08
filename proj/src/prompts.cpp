#include "cactus/prompts.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cactus::prompts {

const std::array<TemplateId, kTemplateCount> kAllTemplateIds = {
    TemplateId::SuitabilityFilter, TemplateId::IntakeForm,
    TemplateId::TechniqueSelection, TemplateId::PlanGeneration,
    TemplateId::ScriptDialogue,    TemplateId::AiClient,
    TemplateId::CtrsJudge,         TemplateId::PanasJudge,
};

std::string_view to_string(TemplateId id) {
    switch (id) {
        case TemplateId::SuitabilityFilter: return "suitability_filter";
        case TemplateId::IntakeForm: return "intake_form";
        case TemplateId::TechniqueSelection: return "technique_selection";
        case TemplateId::PlanGeneration: return "plan_generation";
        case TemplateId::ScriptDialogue: return "script_dialogue";
        case TemplateId::AiClient: return "ai_client";
        case TemplateId::CtrsJudge: return "ctrs_judge";
        case TemplateId::PanasJudge: return "panas_judge";
    }
    return "unknown";
}

std::string template_file_name(TemplateId id) {
    return std::string(to_string(id)) + ".txt";
}

std::optional<TemplateId> template_from_string(std::string_view name) {
    for (auto id : kAllTemplateIds) {
        if (name == to_string(id)) return id;
    }
    return std::nullopt;
}

namespace {

std::string kind_code(TemplateError::Kind k) {
    switch (k) {
        case TemplateError::Kind::MissingBinding: return "missing_binding";
        case TemplateError::Kind::UnknownPlaceholder: return "unknown_placeholder";
        case TemplateError::Kind::BadTemplate: return "bad_template";
    }
    return "template_error";
}

// ---------------------------------------------------------------------------
// Built-in template texts. The shipped prompts/ directory mirrors these; a
// test keeps them in sync.
// ---------------------------------------------------------------------------

constexpr std::string_view kSuitabilityFilterText =
    R"(You screen negative automatic thoughts before they are used to build
counseling role-play material. The counseling approach is cognitive
behavioral therapy aimed at mild depression and anxiety. A thought is
"Unsuitable" when it points to a severe mental disorder that this approach
cannot address, such as delusions, auditory hallucinations, psychosis, or
acute risk of harm. Otherwise it is "Suitable".

Annotated examples:
{exemplars}

Now classify the following thought.
Thought: {thought}

Answer with exactly one line: either "Suitable" or "Unsuitable: <short reason>".
)";

constexpr std::string_view kIntakeFormText =
    R"(You are helping prepare a counseling role-play. Write the intake form a
new client would fill out before their first session. Invent realistic,
internally consistent details grounded in the persona and the recurring
thought below, and write in the client's own voice where it fits.

Persona: {persona}
The client's recurring thought: {thought}

Fill out every section, using exactly these headings:
Name:
Age:
Gender:
Occupation:
Education:
Marital Status:
Family Details:
Presenting Problem:
Reason for Seeking Counseling:
Past History (including medical history):
Academic/occupational functioning level:
Interpersonal relationships:
Daily life:
Social Support System:

The Presenting Problem section must describe the situation behind the
client's recurring thought: when it started, what triggers it, and how it
has progressed. Write "unknown" for anything that cannot reasonably be
inferred.
)";

constexpr std::string_view kTechniqueSelectionText =
    R"(You are an experienced CBT counselor preparing for a session.

The client's negative thought: {thought}
Identified thinking patterns: {patterns}
The balanced thought the client should reach: {reframed_thought}

The available CBT techniques are:
{technique_catalog}

Select the top three techniques, in order of fit, that would best guide the
client from the negative thought to the balanced thought. Reply as a numbered
list of exactly three technique names and nothing else:
1. <technique name>
2. <technique name>
3. <technique name>
)";

constexpr std::string_view kPlanGenerationText =
    R"(You are an experienced CBT counselor. Using the client's intake form
below, draft a step-by-step plan for the upcoming session built around the
chosen technique.

Intake form:
{intake_form}

Chosen technique: {technique}
What it does: {technique_description}

Write the counseling plan as a numbered list of steps ("1.", "2.", ...).
Each step names the move and briefly explains how it will be carried out
with this client.
)";

constexpr std::string_view kScriptDialogueText =
    R"(Write the full transcript of a counseling session between a counselor
and a client, following the plan below. The counselor works with cognitive
behavioral therapy and guides the client toward discovering a more balanced
view themselves rather than handing one over. The client behaves according
to the attitude notes.

Client intake form:
{intake_form}

Counseling plan:
{plan}

The client's attitude toward counseling is {attitude}. During the session
the client will:
{attitude_behaviors}

Rules for the transcript:
- Every message is a single line starting with "Counselor:" or "Client:".
- The counselor speaks first and the speakers strictly alternate.
- Produce a complete session of roughly 20 to 35 messages that works through
  the plan and reaches a natural close.
- The client describes their experience in everyday words and never labels
  their own thinking patterns with clinical terms.
)";

constexpr std::string_view kAiClientText =
    R"(You are role-playing a counseling client in an ongoing session. Stay in
character and never mention being an AI. Describe your experiences in
everyday language, not clinical vocabulary.

Your intake form:
{intake_form}

Your attitude toward counseling is {attitude}. In this session you:
{attitude_behaviors}

The conversation so far:
{transcript}

Reply with your next message only, without any speaker prefix. When you feel
the session has reached its natural end, reply with [END] instead of a
message.
)";

constexpr std::string_view kCtrsJudgeText =
    R"(You are rating the counselor's performance in the session below with the
Cognitive Therapy Rating Scale. Score each criterion with an integer from 0
(poor) to 6 (excellent).

General counseling skills:
- Understanding: how accurately the counselor grasped the client's issues.
- Interpersonal Effectiveness: how well the counselor maintained a
  therapeutic relationship with the client.
- Collaboration: how far the counselor engaged the client in shared
  goal-setting and decision-making.

CBT-specific skills:
- Guided Discovery: how effectively the counselor used guided discovery to
  foster the client's own reflection.
- Focus: how well the counselor identified and worked on the key cognitions
  that need to change.
- Strategy: how appropriate the counselor's strategy for promoting change in
  the client's problematic thoughts was.

Session transcript:
{transcript}

Respond with exactly six lines, one per criterion, in the form
"criterion: score":
Understanding: <0-6>
Interpersonal Effectiveness: <0-6>
Collaboration: <0-6>
Guided Discovery: <0-6>
Focus: <0-6>
Strategy: <0-6>
)";

constexpr std::string_view kPanasJudgeText =
    R"(You are assessing a counseling client's emotional state {stage} using
the Positive and Negative Affect Schedule. From the material below, infer how
strongly the client experiences each feeling on a scale from 1 (very slightly
or not at all) to 5 (extremely).

Client intake form:
{intake_form}

Session transcript:
{transcript}

Respond with exactly twenty lines, one per item, in the form "item: rating":
Interested: <1-5>
Excited: <1-5>
Strong: <1-5>
Enthusiastic: <1-5>
Proud: <1-5>
Alert: <1-5>
Inspired: <1-5>
Determined: <1-5>
Attentive: <1-5>
Active: <1-5>
Distressed: <1-5>
Upset: <1-5>
Guilty: <1-5>
Scared: <1-5>
Hostile: <1-5>
Irritable: <1-5>
Ashamed: <1-5>
Nervous: <1-5>
Jittery: <1-5>
Afraid: <1-5>
)";

std::string_view builtin_text(TemplateId id) {
    switch (id) {
        case TemplateId::SuitabilityFilter: return kSuitabilityFilterText;
        case TemplateId::IntakeForm: return kIntakeFormText;
        case TemplateId::TechniqueSelection: return kTechniqueSelectionText;
        case TemplateId::PlanGeneration: return kPlanGenerationText;
        case TemplateId::ScriptDialogue: return kScriptDialogueText;
        case TemplateId::AiClient: return kAiClientText;
        case TemplateId::CtrsJudge: return kCtrsJudgeText;
        case TemplateId::PanasJudge: return kPanasJudgeText;
    }
    return {};
}

bool is_placeholder_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

} // namespace

TemplateError::TemplateError(Kind kind, const std::string& name,
                             const std::string& message)
    : Error(kind_code(kind), message), kind_(kind), name_(name) {}

const TemplateCatalog& TemplateCatalog::builtin() {
    static const TemplateCatalog catalog = [] {
        TemplateCatalog c;
        for (auto id : kAllTemplateIds) c.texts_[id] = std::string(builtin_text(id));
        return c;
    }();
    return catalog;
}

TemplateCatalog TemplateCatalog::load_dir(const std::string& dir) {
    TemplateCatalog catalog = builtin();
    for (auto id : kAllTemplateIds) {
        auto path = std::filesystem::path(dir) / template_file_name(id);
        std::ifstream in(path);
        if (!in) continue;
        std::ostringstream buf;
        buf << in.rdbuf();
        catalog.texts_[id] = buf.str();
    }
    return catalog;
}

const std::string& TemplateCatalog::text(TemplateId id) const {
    return texts_.at(id);
}

std::set<std::string> TemplateCatalog::placeholders(TemplateId id) const {
    const std::string& t = text(id);
    std::set<std::string> names;
    for (size_t i = 0; i < t.size(); ++i) {
        if (t[i] != '{') continue;
        if (i + 1 < t.size() && t[i + 1] == '{') {
            ++i;
            continue;
        }
        size_t j = t.find('}', i + 1);
        if (j == std::string::npos)
            throw TemplateError(TemplateError::Kind::BadTemplate,
                                std::string(to_string(id)),
                                "unterminated placeholder");
        names.insert(t.substr(i + 1, j - i - 1));
        i = j;
    }
    return names;
}

std::string TemplateCatalog::render(TemplateId id, const Bindings& bindings) const {
    const std::string& t = text(id);
    std::string out;
    out.reserve(t.size());
    std::set<std::string> used;

    for (size_t i = 0; i < t.size(); ++i) {
        char c = t[i];
        if (c == '{') {
            if (i + 1 < t.size() && t[i + 1] == '{') {
                out.push_back('{');
                ++i;
                continue;
            }
            size_t j = t.find('}', i + 1);
            if (j == std::string::npos)
                throw TemplateError(TemplateError::Kind::BadTemplate,
                                    std::string(to_string(id)),
                                    "unterminated placeholder");
            std::string name = t.substr(i + 1, j - i - 1);
            if (name.empty() ||
                !std::all_of(name.begin(), name.end(), is_placeholder_char))
                throw TemplateError(TemplateError::Kind::BadTemplate, name,
                                    "invalid placeholder name '" + name + "'");
            auto it = bindings.find(name);
            if (it == bindings.end())
                throw TemplateError(TemplateError::Kind::MissingBinding, name,
                                    "no binding for placeholder '" + name + "'");
            out += it->second;
            used.insert(name);
            i = j;
        } else if (c == '}' && i + 1 < t.size() && t[i + 1] == '}') {
            out.push_back('}');
            ++i;
        } else {
            out.push_back(c);
        }
    }

    for (const auto& [name, value] : bindings) {
        (void)value;
        if (!used.count(name))
            throw TemplateError(TemplateError::Kind::UnknownPlaceholder, name,
                                "binding '" + name + "' matches no placeholder");
    }
    return out;
}

std::string render_template(TemplateId id, const Bindings& bindings) {
    return TemplateCatalog::builtin().render(id, bindings);
}

std::string technique_catalog_text() {
    std::ostringstream out;
    for (auto t : kAllCbtTechniques) {
        out << "- " << display_name(t) << ": " << description(t) << "\n";
    }
    return out.str();
}

std::string attitude_behaviors_text(Attitude a) {
    std::ostringstream out;
    for (const auto& b : attitude_behaviors(a)) out << "- " << b << "\n";
    return out.str();
}

std::string_view reformat_instruction() {
    return "Respond only as `criterion: integer` lines.";
}

} // namespace cactus::prompts
