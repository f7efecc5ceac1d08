#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cactus/dialogue.hpp"
#include "cactus/judging.hpp"
#include "cactus/model.hpp"

namespace cactus::eval {

class EvalError : public Error {
public:
    enum class Kind { DuplicateProfile, EmptyInput, IdMismatch };

    EvalError(Kind kind, const std::string& message);

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// ---------------------------------------------------------------------------
// Test set
// ---------------------------------------------------------------------------

struct Profile {
    std::string profile_id;
    IntakeForm intake_form;
    std::string opening_utterance;
};

// JSONL of {profile_id, intake_form, opening_utterance}.
std::vector<Profile> load_profiles(const std::string& path);

// Cartesian product of profiles x the three attitudes, ordered by
// (profile position, Positive/Neutral/Negative). Duplicate profile ids
// raise DuplicateProfile.
std::vector<EvalInstance> build_testset(const std::vector<Profile>& profiles);

// ---------------------------------------------------------------------------
// Sessions
// ---------------------------------------------------------------------------

enum class EndReason { EndToken, Cap };

std::string_view to_string(EndReason r);

struct Session {
    EvalInstance instance;
    Dialogue dialogue;            // starts with the client's opening utterance
    EndReason ended_by = EndReason::EndToken;
    std::string counselor_label;
    int exchanges = 0;            // completed (client, counselor) exchanges
};

struct SessionParams {
    int cap_exchanges = 50;
    double temperature = 0.7;     // both roles
    int max_tokens = 1024;
    std::string counselor_model = "counselor";
    std::string client_model = "gpt-3.5-turbo";
    const prompts::TemplateCatalog* catalog = nullptr;  // nullptr → builtin
    llm::RetryPolicy retry;
};

// Alternating counselor/client loop. The client opens with the instance's
// opening utterance; the loop stops when a client completion contains the
// end token (stripped from the stored utterance; a bare-token reply adds no
// utterance) or when the exchange cap is reached (dialogue marked truncated).
Session run_session(llm::ChatBackend& counselor, llm::ChatBackend& client,
                    const EvalInstance& instance, const SessionParams& params);

inline constexpr std::string_view kEndToken = "[END]";

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

CtrsScore evaluate_ctrs(llm::ChatBackend& judge, const Session& session,
                        const judging::JudgeParams& params);

struct PanasPair {
    PanasSheet pre;
    PanasSheet post;
    int delta_positive = 0;   // post.positive_sum() - pre.positive_sum()
    int delta_negative = 0;

    static PanasPair of(PanasSheet pre, PanasSheet post);
};

// Two judge calls: pre-session (intake form only) and post-session (intake
// form plus transcript).
PanasPair evaluate_panas(llm::ChatBackend& judge, const Session& session,
                         const judging::JudgeParams& params);

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

struct ScoredSession {
    std::string instance_id;
    std::string counselor_label;
    Attitude attitude = Attitude::Positive;
    bool truncated = false;
    CtrsScore ctrs;
    PanasPair panas;
};

struct CtrsRow {
    std::string label;
    std::array<double, 6> means{};
    size_t sessions = 0;
};

struct PanasRow {
    std::string label;
    Attitude attitude;
    double mean_delta_positive = 0.0;
    double mean_delta_negative = 0.0;
    size_t sessions = 0;
};

struct ReportTables {
    std::vector<CtrsRow> ctrs_rows;       // one per counselor label
    std::vector<PanasRow> panas_rows;     // label x attitude, P/N/N order
    std::map<std::string, size_t> truncated_counts;

    std::string render_text() const;      // means to 2 decimals
};

ReportTables aggregate(const std::vector<ScoredSession>& sessions);

// Machine-readable forms of the report rows.
void to_json(json& j, const CtrsRow& row);
void to_json(json& j, const PanasRow& row);
void to_json(json& j, const ReportTables& tables);

// ---------------------------------------------------------------------------
// Evaluator agreement
// ---------------------------------------------------------------------------

struct TriCorrelation {
    double r = 0.0;
    double rho = 0.0;
    double tau = 0.0;
};

struct AgreementReport {
    TriCorrelation general;   // over per-item means of the general criteria
    TriCorrelation cbt;       // over per-item means of the CBT criteria
};

void to_json(json& j, const TriCorrelation& tri);
void to_json(json& j, const AgreementReport& report);

using ScoredItems = std::vector<std::pair<std::string, CtrsScore>>;

// Aligns the two sets by item id (IdMismatch when the id sets differ) and
// correlates overall scores per skill group.
AgreementReport evaluator_agreement(const ScoredItems& expert,
                                    const ScoredItems& other);

// Per-criterion variant, keyed by criterion name.
std::map<std::string, TriCorrelation> per_criterion_agreement(
    const ScoredItems& expert, const ScoredItems& other);

// ---------------------------------------------------------------------------
// Head-to-head judgments
// ---------------------------------------------------------------------------

enum class Outcome { WinA, WinB, Tie };

std::string_view to_string(Outcome o);
std::optional<Outcome> outcome_from_string(std::string_view s);

struct Judgment {
    std::string item_id;
    std::string criterion;
    Outcome outcome = Outcome::Tie;
};

struct CriterionWinRate {
    std::string criterion;
    size_t wins_a = 0;
    size_t wins_b = 0;
    size_t ties = 0;
    double pct_a = 0.0;
    double pct_b = 0.0;
    double pct_tie = 0.0;
    std::optional<double> p_value;   // absent when every judgment tied
    bool significant = false;        // p < 0.05
};

struct WinRateReport {
    std::vector<CriterionWinRate> rows;

    std::string render_text() const;  // win/tie/lose bars plus p-values
};

// Two-sided exact sign test per criterion, ties excluded, alpha = 0.05.
WinRateReport head_to_head(const std::vector<Judgment>& judgments);

} // namespace cactus::eval
