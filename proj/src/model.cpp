#include "cactus/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace cactus {

namespace text {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string normalize(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (unsigned char c : s) {
        if (std::isalnum(c)) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            pending_space = true;
        }
    }
    return out;
}

std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> lines;
    size_t start = 0;
    while (start <= s.size()) {
        size_t nl = s.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.emplace_back(s.substr(start));
            break;
        }
        std::string_view line = s.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        start = nl + 1;
    }
    return lines;
}

} // namespace text

// ---------------------------------------------------------------------------
// PatternKind
// ---------------------------------------------------------------------------

const std::array<PatternKind, kPatternKindCount> kAllPatternKinds = {
    PatternKind::Catastrophizing,     PatternKind::DiscountingThePositive,
    PatternKind::Labeling,            PatternKind::MentalFiltering,
    PatternKind::MindReading,         PatternKind::FortuneTelling,
    PatternKind::Personalization,     PatternKind::AllOrNothingThinking,
    PatternKind::Overgeneralization,  PatternKind::ShouldStatements,
};

namespace {

struct PatternInfo {
    std::string_view canonical;
    std::string_view display;
};

constexpr std::array<PatternInfo, kPatternKindCount> kPatternInfo = {{
    {"catastrophizing", "Catastrophizing"},
    {"discounting_the_positive", "Discounting the positive"},
    {"labeling", "Labeling"},
    {"mental_filtering", "Mental Filtering"},
    {"mind_reading", "Mind Reading"},
    {"fortune_telling", "Fortune Telling"},
    {"personalization", "Personalization"},
    {"all_or_nothing_thinking", "All-or-nothing thinking"},
    {"overgeneralization", "Overgeneralization"},
    {"should_statements", "Should statements"},
}};

} // namespace

std::string_view to_string(PatternKind k) {
    return kPatternInfo[static_cast<size_t>(k)].canonical;
}

std::string_view display_name(PatternKind k) {
    return kPatternInfo[static_cast<size_t>(k)].display;
}

std::optional<PatternKind> pattern_from_string(std::string_view s) {
    static const std::unordered_map<std::string, PatternKind> lookup = [] {
        std::unordered_map<std::string, PatternKind> m;
        for (auto k : kAllPatternKinds) {
            m.emplace(text::normalize(to_string(k)), k);
            m.emplace(text::normalize(display_name(k)), k);
        }
        // Variants seen in corpus annotations.
        m.emplace("labeling and mislabeling", PatternKind::Labeling);
        m.emplace("jumping to conclusions mind reading", PatternKind::MindReading);
        m.emplace("jumping to conclusions fortune telling", PatternKind::FortuneTelling);
        m.emplace("black and white thinking", PatternKind::AllOrNothingThinking);
        m.emplace("black and white or polarized thinking", PatternKind::AllOrNothingThinking);
        return m;
    }();
    auto it = lookup.find(text::normalize(s));
    if (it == lookup.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// CbtTechnique
// ---------------------------------------------------------------------------

const std::array<CbtTechnique, kCbtTechniqueCount> kAllCbtTechniques = {
    CbtTechnique::EfficiencyEvaluation,
    CbtTechnique::PieChartTechnique,
    CbtTechnique::AlternativePerspective,
    CbtTechnique::Decatastrophizing,
    CbtTechnique::ProsAndConsAnalysis,
    CbtTechnique::EvidenceBasedQuestioning,
    CbtTechnique::RealityTesting,
    CbtTechnique::ContinuumTechnique,
    CbtTechnique::ChangingRulesToWishes,
    CbtTechnique::BehaviorExperiment,
    CbtTechnique::ProblemSolvingSkillsTraining,
    CbtTechnique::SystematicExposure,
};

namespace {

struct TechniqueInfo {
    std::string_view canonical;
    std::string_view display;
    std::string_view description;
};

constexpr std::array<TechniqueInfo, kCbtTechniqueCount> kTechniqueInfo = {{
    {"efficiency_evaluation", "Efficiency Evaluation",
     "Assists individuals in evaluating the usefulness of their thoughts or beliefs, "
     "analyzing how practical or detrimental they are in real-life situations."},
    {"pie_chart_technique", "Pie Chart Technique",
     "Used for individuals experiencing excessive self-blame or responsibility, visually "
     "representing the contribution of various factors to a specific event or outcome."},
    {"alternative_perspective", "Alternative Perspective",
     "Involves asking clients how others might think in similar situations, encouraging "
     "consideration of different interpretations."},
    {"decatastrophizing", "Decatastrophizing",
     "Aims to reduce the tendency to imagine the worst-case scenario by evaluating the "
     "actual likelihood of the feared outcome and preparing for coping strategies."},
    {"pros_and_cons_analysis", "Pros and Cons Analysis",
     "Analyzes the advantages and disadvantages of specific thoughts or beliefs, fostering "
     "a more balanced evaluation."},
    {"evidence_based_questioning", "Evidence-Based Questioning",
     "Guides clients to find evidence supporting or contradicting their thoughts, promoting "
     "a more evidence-based approach to thinking."},
    {"reality_testing", "Reality Testing",
     "Explores how well clients' thoughts align with reality, helping them distinguish "
     "between thoughts and actual experiences."},
    {"continuum_technique", "Continuum Technique",
     "Positions clients' experiences between two extreme situations, encouraging a more "
     "nuanced evaluation of situations."},
    {"changing_rules_to_wishes", "Changing Rules to Wishes",
     "Replaces strict rules or arbitrary attitudes with realistic hopes or wishes."},
    {"behavior_experiment", "Behavior Experiment",
     "Involves trying out new behaviors in specific situations to challenge and modify "
     "negative beliefs."},
    {"problem_solving_skills_training", "Problem-Solving Skills Training",
     "Learning systematic methods for resolving problem situations. This involves "
     "identifying problems, finding possible solutions, and implementing those solutions."},
    {"systematic_exposure", "Systematic Exposure",
     "Gradual exposure to situations that cause fear or anxiety, allowing individuals to "
     "experience anxiety while learning how to manage it."},
}};

} // namespace

std::string_view to_string(CbtTechnique t) {
    return kTechniqueInfo[static_cast<size_t>(t)].canonical;
}

std::string_view display_name(CbtTechnique t) {
    return kTechniqueInfo[static_cast<size_t>(t)].display;
}

std::string_view description(CbtTechnique t) {
    return kTechniqueInfo[static_cast<size_t>(t)].description;
}

std::optional<CbtTechnique> technique_from_string(std::string_view s) {
    static const std::unordered_map<std::string, CbtTechnique> lookup = [] {
        std::unordered_map<std::string, CbtTechnique> m;
        for (auto t : kAllCbtTechniques) {
            m.emplace(text::normalize(to_string(t)), t);
            m.emplace(text::normalize(display_name(t)), t);
        }
        return m;
    }();
    auto it = lookup.find(text::normalize(s));
    if (it == lookup.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// Attitude
// ---------------------------------------------------------------------------

const std::array<Attitude, kAttitudeCount> kAllAttitudes = {
    Attitude::Positive, Attitude::Neutral, Attitude::Negative};

std::string_view to_string(Attitude a) {
    switch (a) {
        case Attitude::Positive: return "positive";
        case Attitude::Neutral: return "neutral";
        case Attitude::Negative: return "negative";
    }
    return "positive";
}

std::string_view display_name(Attitude a) {
    switch (a) {
        case Attitude::Positive: return "Positive";
        case Attitude::Neutral: return "Neutral";
        case Attitude::Negative: return "Negative";
    }
    return "Positive";
}

std::optional<Attitude> attitude_from_string(std::string_view s) {
    std::string n = text::normalize(s);
    for (auto a : kAllAttitudes) {
        if (n == to_string(a)) return a;
    }
    return std::nullopt;
}

namespace {

const std::vector<std::string> kPositiveBehaviors = {
    "High engagement and cooperation with the therapeutic process.",
    "Actively confirm understanding and ask for clarifications.",
    "Provide detailed information about thoughts, feelings, and behaviors.",
    "Make reasonable requests for additional support or resources.",
    "Extend conversations with insights or experiences.",
    "Reformulate thoughts constructively, reflect on progress and express a hopeful outlook.",
    "Open, appreciative, and proactive demeanor.",
};

const std::vector<std::string> kNegativeBehaviors = {
    "Struggle with the therapeutic process, showing resistance or defensiveness.",
    "Express confusion about the counselor's guidance.",
    "Defend current behaviors or viewpoints, and shift topics to avoid core issues.",
    "Noticeable disconnection in focus from session goals.",
    "Sarcastic responses, self-criticism, or hopelessness.",
    "Pessimistic attitude towards the ability to change or benefit from therapy.",
};

// Neutral clients show a mix of both dispositions: a fixed sample of three
// bullets from each list.
const std::vector<std::string> kNeutralBehaviors = {
    kPositiveBehaviors[0], kPositiveBehaviors[1], kPositiveBehaviors[2],
    kNegativeBehaviors[0], kNegativeBehaviors[1], kNegativeBehaviors[2],
};

} // namespace

const std::vector<std::string>& attitude_behaviors(Attitude a) {
    switch (a) {
        case Attitude::Positive: return kPositiveBehaviors;
        case Attitude::Neutral: return kNeutralBehaviors;
        case Attitude::Negative: return kNegativeBehaviors;
    }
    return kPositiveBehaviors;
}

// ---------------------------------------------------------------------------
// SeedRecord
// ---------------------------------------------------------------------------

void SeedRecord::validate() const {
    if (id.empty()) throw Error("invalid_seed", "seed record has empty id");
    if (thought.empty())
        throw Error("invalid_seed", "seed record '" + id + "' has empty thought");
    if (patterns.empty())
        throw Error("invalid_seed", "seed record '" + id + "' has no patterns");
    if (patterns.size() > 5)
        throw Error("invalid_seed", "seed record '" + id + "' has more than 5 patterns");
}

void to_json(json& j, const SeedRecord& r) {
    json patterns = json::array();
    for (auto p : r.patterns) patterns.push_back(std::string(to_string(p)));
    j = json{{"id", r.id},
             {"persona", r.persona},
             {"thought", r.thought},
             {"patterns", std::move(patterns)},
             {"reframed_thought", r.reframed_thought}};
}

void from_json(const json& j, SeedRecord& r) {
    r.id = j.at("id").get<std::string>();
    r.persona = j.value("persona", "");
    r.thought = j.at("thought").get<std::string>();
    r.reframed_thought = j.value("reframed_thought", "");
    r.patterns.clear();
    for (const auto& item : j.at("patterns")) {
        auto p = pattern_from_string(item.get<std::string>());
        if (!p)
            throw Error("invalid_seed",
                        "unknown pattern '" + item.get<std::string>() + "'");
        if (std::find(r.patterns.begin(), r.patterns.end(), *p) == r.patterns.end())
            r.patterns.push_back(*p);
    }
}

// ---------------------------------------------------------------------------
// IntakeForm
// ---------------------------------------------------------------------------

namespace {

const std::array<std::string_view, kIntakeSectionCount> kIntakeNames = {
    "name",         "age",
    "gender",       "occupation",
    "education",    "marital_status",
    "family_details", "presenting_problem",
    "reason_for_seeking", "past_history",
    "occupational_functioning", "interpersonal_relationships",
    "daily_life",   "social_support",
};

const std::array<std::string_view, kIntakeSectionCount> kIntakeHeadings = {
    "Name",           "Age",
    "Gender",         "Occupation",
    "Education",      "Marital Status",
    "Family Details", "Presenting Problem",
    "Reason for Seeking Counseling", "Past History",
    "Academic/occupational functioning level", "Interpersonal relationships",
    "Daily life",     "Social Support System",
};

} // namespace

const std::array<std::string_view, kIntakeSectionCount>& intake_section_names() {
    return kIntakeNames;
}

const std::array<std::string_view, kIntakeSectionCount>& intake_section_headings() {
    return kIntakeHeadings;
}

std::array<const std::string*, 14> IntakeForm::sections() const {
    return {&name,          &age,
            &gender,        &occupation,
            &education,     &marital_status,
            &family_details, &presenting_problem,
            &reason_for_seeking, &past_history,
            &occupational_functioning, &interpersonal_relationships,
            &daily_life,    &social_support};
}

std::array<std::string*, 14> IntakeForm::sections() {
    return {&name,          &age,
            &gender,        &occupation,
            &education,     &marital_status,
            &family_details, &presenting_problem,
            &reason_for_seeking, &past_history,
            &occupational_functioning, &interpersonal_relationships,
            &daily_life,    &social_support};
}

std::optional<int> IntakeForm::age_years() const {
    // First integer token inside the age text.
    const char* p = age.data();
    const char* end = p + age.size();
    while (p < end && !std::isdigit(static_cast<unsigned char>(*p))) ++p;
    if (p == end) return std::nullopt;
    int value = 0;
    auto [ptr, ec] = std::from_chars(p, end, value);
    (void)ptr;
    if (ec != std::errc{}) return std::nullopt;
    if (value < 10 || value > 99) return std::nullopt;
    return value;
}

std::string IntakeForm::to_text() const {
    std::ostringstream out;
    auto secs = sections();
    for (int i = 0; i < kIntakeSectionCount; ++i) {
        out << kIntakeHeadings[i] << ": " << *secs[i] << "\n";
    }
    return out.str();
}

void to_json(json& j, const IntakeForm& f) {
    j = json::object();
    auto secs = f.sections();
    for (int i = 0; i < kIntakeSectionCount; ++i) {
        j[std::string(kIntakeNames[i])] = *secs[i];
    }
    if (auto years = f.age_years()) j["age"] = *years;
}

void from_json(const json& j, IntakeForm& f) {
    auto secs = f.sections();
    for (int i = 0; i < kIntakeSectionCount; ++i) {
        const auto key = std::string(kIntakeNames[i]);
        if (!j.contains(key)) {
            *secs[i] = "unknown";
            continue;
        }
        const auto& v = j.at(key);
        if (v.is_number_integer()) {
            *secs[i] = std::to_string(v.get<int>());
        } else {
            *secs[i] = v.get<std::string>();
        }
    }
}

// ---------------------------------------------------------------------------
// CounselingPlan
// ---------------------------------------------------------------------------

std::string CounselingPlan::to_text() const {
    std::ostringstream out;
    for (size_t i = 0; i < steps.size(); ++i) {
        out << (i + 1) << ". " << steps[i] << "\n";
    }
    return out.str();
}

void to_json(json& j, const CounselingPlan& p) {
    j = json{{"technique", std::string(to_string(p.technique))}, {"steps", p.steps}};
}

void from_json(const json& j, CounselingPlan& p) {
    auto t = technique_from_string(j.at("technique").get<std::string>());
    if (!t) throw Error("invalid_plan", "unknown technique in plan");
    p.technique = *t;
    p.steps = j.at("steps").get<std::vector<std::string>>();
}

// ---------------------------------------------------------------------------
// Dialogue
// ---------------------------------------------------------------------------

std::string_view to_string(Speaker s) {
    return s == Speaker::Counselor ? "Counselor" : "Client";
}

std::optional<Speaker> speaker_from_string(std::string_view s) {
    std::string n = text::normalize(s);
    if (n == "counselor") return Speaker::Counselor;
    if (n == "client") return Speaker::Client;
    return std::nullopt;
}

bool operator==(const Utterance& a, const Utterance& b) {
    return a.speaker == b.speaker && a.text == b.text;
}

bool operator==(const Dialogue& a, const Dialogue& b) {
    return a.id == b.id && a.truncated == b.truncated && a.utterances == b.utterances;
}

void to_json(json& j, const Utterance& u) {
    j = json{{"speaker", std::string(to_string(u.speaker))}, {"text", u.text}};
}

void from_json(const json& j, Utterance& u) {
    auto sp = speaker_from_string(j.at("speaker").get<std::string>());
    if (!sp) throw Error("invalid_dialogue", "unknown speaker");
    u.speaker = *sp;
    u.text = j.at("text").get<std::string>();
}

void to_json(json& j, const Dialogue& d) {
    j = json{{"id", d.id}, {"utterances", d.utterances}, {"truncated", d.truncated}};
}

void from_json(const json& j, Dialogue& d) {
    d.id = j.value("id", "");
    d.truncated = j.value("truncated", false);
    d.utterances = j.at("utterances").get<std::vector<Utterance>>();
}

// ---------------------------------------------------------------------------
// CtrsScore
// ---------------------------------------------------------------------------

namespace {

const std::array<std::string_view, kCtrsCriterionCount> kCtrsNames = {
    "understanding", "interpersonal_effectiveness", "collaboration",
    "guided_discovery", "focus", "strategy",
};

const std::array<std::string_view, kCtrsCriterionCount> kCtrsDisplayNames = {
    "Understanding", "Interpersonal Effectiveness", "Collaboration",
    "Guided Discovery", "Focus", "Strategy",
};

} // namespace

const std::array<std::string_view, kCtrsCriterionCount>& ctrs_criterion_names() {
    return kCtrsNames;
}

const std::array<std::string_view, kCtrsCriterionCount>& ctrs_criterion_display_names() {
    return kCtrsDisplayNames;
}

std::array<int, 6> CtrsScore::values() const {
    return {understanding, interpersonal_effectiveness, collaboration,
            guided_discovery, focus, strategy};
}

int CtrsScore::sum() const {
    int total = 0;
    for (int v : values()) total += v;
    return total;
}

void CtrsScore::validate() const {
    auto vals = values();
    for (int i = 0; i < kCtrsCriterionCount; ++i) {
        if (vals[i] < 0 || vals[i] > 6)
            throw Error("out_of_range", std::string(kCtrsNames[i]) + " score " +
                                            std::to_string(vals[i]) + " outside [0,6]");
    }
}

bool operator==(const CtrsScore& a, const CtrsScore& b) {
    return a.values() == b.values();
}

void to_json(json& j, const CtrsScore& s) {
    j = json::object();
    auto vals = s.values();
    for (int i = 0; i < kCtrsCriterionCount; ++i) j[std::string(kCtrsNames[i])] = vals[i];
}

void from_json(const json& j, CtrsScore& s) {
    s.understanding = j.at("understanding").get<int>();
    s.interpersonal_effectiveness = j.at("interpersonal_effectiveness").get<int>();
    s.collaboration = j.at("collaboration").get<int>();
    s.guided_discovery = j.at("guided_discovery").get<int>();
    s.focus = j.at("focus").get<int>();
    s.strategy = j.at("strategy").get<int>();
}

// ---------------------------------------------------------------------------
// PanasSheet
// ---------------------------------------------------------------------------

namespace {

const std::array<std::string_view, kPanasItemsPerScale> kPanasPositive = {
    "interested", "excited", "strong", "enthusiastic", "proud",
    "alert", "inspired", "determined", "attentive", "active",
};

const std::array<std::string_view, kPanasItemsPerScale> kPanasNegative = {
    "distressed", "upset", "guilty", "scared", "hostile",
    "irritable", "ashamed", "nervous", "jittery", "afraid",
};

} // namespace

const std::array<std::string_view, kPanasItemsPerScale>& panas_positive_item_names() {
    return kPanasPositive;
}

const std::array<std::string_view, kPanasItemsPerScale>& panas_negative_item_names() {
    return kPanasNegative;
}

int PanasSheet::positive_sum() const {
    int total = 0;
    for (int v : positive_items) total += v;
    return total;
}

int PanasSheet::negative_sum() const {
    int total = 0;
    for (int v : negative_items) total += v;
    return total;
}

void PanasSheet::validate() const {
    for (int i = 0; i < kPanasItemsPerScale; ++i) {
        if (positive_items[i] < 1 || positive_items[i] > 5)
            throw Error("out_of_range", std::string(kPanasPositive[i]) + " rating " +
                                            std::to_string(positive_items[i]) +
                                            " outside [1,5]");
        if (negative_items[i] < 1 || negative_items[i] > 5)
            throw Error("out_of_range", std::string(kPanasNegative[i]) + " rating " +
                                            std::to_string(negative_items[i]) +
                                            " outside [1,5]");
    }
}

bool operator==(const PanasSheet& a, const PanasSheet& b) {
    return a.positive_items == b.positive_items && a.negative_items == b.negative_items;
}

void to_json(json& j, const PanasSheet& s) {
    json pos = json::object(), neg = json::object();
    for (int i = 0; i < kPanasItemsPerScale; ++i) {
        pos[std::string(kPanasPositive[i])] = s.positive_items[i];
        neg[std::string(kPanasNegative[i])] = s.negative_items[i];
    }
    j = json{{"positive_items", std::move(pos)}, {"negative_items", std::move(neg)}};
}

void from_json(const json& j, PanasSheet& s) {
    const auto& pos = j.at("positive_items");
    const auto& neg = j.at("negative_items");
    for (int i = 0; i < kPanasItemsPerScale; ++i) {
        s.positive_items[i] = pos.at(std::string(kPanasPositive[i])).get<int>();
        s.negative_items[i] = neg.at(std::string(kPanasNegative[i])).get<int>();
    }
}

// ---------------------------------------------------------------------------
// EvalInstance
// ---------------------------------------------------------------------------

std::string EvalInstance::instance_id() const {
    return profile_id + ":" + std::string(to_string(attitude));
}

void to_json(json& j, const EvalInstance& inst) {
    j = json{{"profile_id", inst.profile_id},
             {"intake_form", inst.intake_form},
             {"attitude", std::string(to_string(inst.attitude))},
             {"opening_utterance", inst.opening_utterance}};
}

void from_json(const json& j, EvalInstance& inst) {
    inst.profile_id = j.at("profile_id").get<std::string>();
    inst.intake_form = j.at("intake_form").get<IntakeForm>();
    auto a = attitude_from_string(j.at("attitude").get<std::string>());
    if (!a) throw Error("invalid_instance", "unknown attitude");
    inst.attitude = *a;
    inst.opening_utterance = j.at("opening_utterance").get<std::string>();
}

} // namespace cactus
