#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cactus/errors.hpp"

namespace cactus {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Cognitive distortion patterns (closed set of 10)
// ---------------------------------------------------------------------------

enum class PatternKind {
    Catastrophizing,
    DiscountingThePositive,
    Labeling,
    MentalFiltering,
    MindReading,
    FortuneTelling,
    Personalization,
    AllOrNothingThinking,
    Overgeneralization,
    ShouldStatements,
};

inline constexpr int kPatternKindCount = 10;
extern const std::array<PatternKind, kPatternKindCount> kAllPatternKinds;

std::string_view to_string(PatternKind k);      // canonical snake_case form
std::string_view display_name(PatternKind k);   // human-readable form

// Tolerant lookup: canonical or display form, case-insensitive, punctuation
// and "jumping to conclusions:" style qualifiers stripped.
std::optional<PatternKind> pattern_from_string(std::string_view text);

// ---------------------------------------------------------------------------
// CBT techniques (closed set of 12, each with a catalog description)
// ---------------------------------------------------------------------------

enum class CbtTechnique {
    EfficiencyEvaluation,
    PieChartTechnique,
    AlternativePerspective,
    Decatastrophizing,
    ProsAndConsAnalysis,
    EvidenceBasedQuestioning,
    RealityTesting,
    ContinuumTechnique,
    ChangingRulesToWishes,
    BehaviorExperiment,
    ProblemSolvingSkillsTraining,
    SystematicExposure,
};

inline constexpr int kCbtTechniqueCount = 12;
extern const std::array<CbtTechnique, kCbtTechniqueCount> kAllCbtTechniques;

std::string_view to_string(CbtTechnique t);     // canonical snake_case form
std::string_view display_name(CbtTechnique t);  // e.g. "Behavior Experiment"
std::string_view description(CbtTechnique t);   // catalog description text

std::optional<CbtTechnique> technique_from_string(std::string_view text);

// ---------------------------------------------------------------------------
// Client attitudes (closed set of 3, each with prompt behavior bullets)
// ---------------------------------------------------------------------------

enum class Attitude { Positive, Neutral, Negative };

inline constexpr int kAttitudeCount = 3;
extern const std::array<Attitude, kAttitudeCount> kAllAttitudes;

std::string_view to_string(Attitude a);         // "positive" / "neutral" / "negative"
std::string_view display_name(Attitude a);

std::optional<Attitude> attitude_from_string(std::string_view text);

// Behavior bullets injected into client prompts. Neutral mixes entries drawn
// from both the positive and the negative lists.
const std::vector<std::string>& attitude_behaviors(Attitude a);

// ---------------------------------------------------------------------------
// Seed records (one line of the source corpus)
// ---------------------------------------------------------------------------

struct SeedRecord {
    std::string id;
    std::string persona;
    std::string thought;            // the negative automatic thought
    std::vector<PatternKind> patterns;  // 1..5 distinct entries
    std::string reframed_thought;

    void validate() const;          // throws Error("invalid_seed", ...)
};

void to_json(json& j, const SeedRecord& r);
void from_json(const json& j, SeedRecord& r);

// ---------------------------------------------------------------------------
// Intake form (14 named sections)
// ---------------------------------------------------------------------------

struct IntakeForm {
    std::string name;
    std::string age;                // raw text; see age_years()
    std::string gender;
    std::string occupation;
    std::string education;
    std::string marital_status;
    std::string family_details;
    std::string presenting_problem;
    std::string reason_for_seeking;
    std::string past_history;
    std::string occupational_functioning;
    std::string interpersonal_relationships;
    std::string daily_life;
    std::string social_support;

    // Parsed age when the section contains an integer in [10, 99].
    // Unparseable ages stay text-only rather than invalidating the form.
    std::optional<int> age_years() const;

    // Section values in declaration order; names via intake_section_names().
    std::array<const std::string*, 14> sections() const;
    std::array<std::string*, 14> sections();

    // Multi-line "Heading: value" rendering used inside prompts.
    std::string to_text() const;
};

inline constexpr int kIntakeSectionCount = 14;

// snake_case field names, declaration order.
const std::array<std::string_view, kIntakeSectionCount>& intake_section_names();
// Prompt/display headings ("Marital Status", ...), same order.
const std::array<std::string_view, kIntakeSectionCount>& intake_section_headings();

void to_json(json& j, const IntakeForm& f);
void from_json(const json& j, IntakeForm& f);

// ---------------------------------------------------------------------------
// Counseling plan
// ---------------------------------------------------------------------------

struct CounselingPlan {
    CbtTechnique technique = CbtTechnique::EfficiencyEvaluation;
    std::vector<std::string> steps;     // non-empty, numbered order

    std::string to_text() const;        // "1. step\n2. step\n..."
};

void to_json(json& j, const CounselingPlan& p);
void from_json(const json& j, CounselingPlan& p);

// ---------------------------------------------------------------------------
// Dialogues
// ---------------------------------------------------------------------------

enum class Speaker { Counselor, Client };

std::string_view to_string(Speaker s);
std::optional<Speaker> speaker_from_string(std::string_view text);

struct Utterance {
    Speaker speaker = Speaker::Counselor;
    std::string text;               // non-empty, carries no speaker prefix
};

bool operator==(const Utterance& a, const Utterance& b);

struct Dialogue {
    std::string id;
    std::vector<Utterance> utterances;  // speakers strictly alternate
    bool truncated = false;             // terminated by cap, not naturally
};

bool operator==(const Dialogue& a, const Dialogue& b);

void to_json(json& j, const Utterance& u);
void from_json(const json& j, Utterance& u);
void to_json(json& j, const Dialogue& d);
void from_json(const json& j, Dialogue& d);

// ---------------------------------------------------------------------------
// Judge scores
// ---------------------------------------------------------------------------

struct CtrsScore {
    int understanding = 0;
    int interpersonal_effectiveness = 0;
    int collaboration = 0;
    int guided_discovery = 0;
    int focus = 0;
    int strategy = 0;

    std::array<int, 6> values() const;
    int sum() const;

    void validate() const;          // every field in [0, 6]
};

inline constexpr int kCtrsCriterionCount = 6;
// snake_case criterion names, field order: three general skills then three
// CBT-specific skills.
const std::array<std::string_view, kCtrsCriterionCount>& ctrs_criterion_names();
const std::array<std::string_view, kCtrsCriterionCount>& ctrs_criterion_display_names();

bool operator==(const CtrsScore& a, const CtrsScore& b);

void to_json(json& j, const CtrsScore& s);
void from_json(const json& j, CtrsScore& s);

struct PanasSheet {
    std::array<int, 10> positive_items{};   // each 1..5
    std::array<int, 10> negative_items{};   // each 1..5

    int positive_sum() const;
    int negative_sum() const;

    void validate() const;
};

inline constexpr int kPanasItemsPerScale = 10;
const std::array<std::string_view, kPanasItemsPerScale>& panas_positive_item_names();
const std::array<std::string_view, kPanasItemsPerScale>& panas_negative_item_names();

bool operator==(const PanasSheet& a, const PanasSheet& b);

void to_json(json& j, const PanasSheet& s);
void from_json(const json& j, PanasSheet& s);

// ---------------------------------------------------------------------------
// Evaluation test-set entry
// ---------------------------------------------------------------------------

struct EvalInstance {
    std::string profile_id;
    IntakeForm intake_form;
    Attitude attitude = Attitude::Positive;
    std::string opening_utterance;

    std::string instance_id() const;    // "<profile_id>:<attitude>"
};

void to_json(json& j, const EvalInstance& inst);
void from_json(const json& j, EvalInstance& inst);

// ---------------------------------------------------------------------------
// Small string helpers shared by the parsers
// ---------------------------------------------------------------------------

namespace text {

std::string trim(std::string_view s);
std::string lower(std::string_view s);
// Lowercase, punctuation to spaces, whitespace runs collapsed to one space.
std::string normalize(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);

} // namespace text

} // namespace cactus
