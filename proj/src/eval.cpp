#include "cactus/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "cactus/jsonl.hpp"
#include "cactus/stats.hpp"

namespace cactus::eval {

using nlohmann::json;

namespace {

std::string kind_code(EvalError::Kind k) {
    switch (k) {
        case EvalError::Kind::DuplicateProfile: return "duplicate_profile";
        case EvalError::Kind::EmptyInput: return "empty_input";
        case EvalError::Kind::IdMismatch: return "id_mismatch";
    }
    return "eval_error";
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt2_signed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%+.2f", v);
    return buf;
}

} // namespace

EvalError::EvalError(Kind kind, const std::string& message)
    : Error(kind_code(kind), message), kind_(kind) {}

// ---------------------------------------------------------------------------
// Test set
// ---------------------------------------------------------------------------

std::vector<Profile> load_profiles(const std::string& path) {
    std::vector<Profile> profiles;
    jsonl::for_each(path, [&](size_t, const json& j) {
        Profile p;
        p.profile_id = j.at("profile_id").get<std::string>();
        p.intake_form = j.at("intake_form").get<IntakeForm>();
        p.opening_utterance = j.at("opening_utterance").get<std::string>();
        profiles.push_back(std::move(p));
    });
    return profiles;
}

std::vector<EvalInstance> build_testset(const std::vector<Profile>& profiles) {
    std::set<std::string> seen;
    for (const auto& p : profiles) {
        if (!seen.insert(p.profile_id).second)
            throw EvalError(EvalError::Kind::DuplicateProfile,
                            "duplicate profile id '" + p.profile_id + "'");
    }
    std::vector<EvalInstance> instances;
    instances.reserve(profiles.size() * kAttitudeCount);
    for (const auto& p : profiles) {
        for (auto attitude : kAllAttitudes) {
            EvalInstance inst;
            inst.profile_id = p.profile_id;
            inst.intake_form = p.intake_form;
            inst.attitude = attitude;
            inst.opening_utterance = p.opening_utterance;
            instances.push_back(std::move(inst));
        }
    }
    return instances;
}

// ---------------------------------------------------------------------------
// Sessions
// ---------------------------------------------------------------------------

std::string_view to_string(EndReason r) {
    return r == EndReason::EndToken ? "end_token" : "cap";
}

namespace {

// The counselor role is the system under evaluation; its prompt is plain
// harness text, not part of the swappable template catalog.
std::string counselor_prompt(const EvalInstance& instance,
                             const std::string& transcript) {
    std::ostringstream out;
    out << "You are a professional counselor conducting a cognitive behavioral "
           "therapy session. Help the client examine their negative thoughts "
           "and reach a more balanced view through questions and collaborative "
           "exploration rather than direct advice.\n\n";
    out << "Client intake form:\n" << instance.intake_form.to_text() << "\n";
    out << "The conversation so far:\n" << transcript << "\n\n";
    out << "Reply with the counselor's next message only, without any speaker "
           "prefix.";
    return out.str();
}

std::string strip_end_token(std::string_view reply) {
    std::string out(reply);
    size_t pos;
    while ((pos = out.find(kEndToken)) != std::string::npos)
        out.erase(pos, kEndToken.size());
    return text::trim(out);
}

} // namespace

Session run_session(llm::ChatBackend& counselor, llm::ChatBackend& client,
                    const EvalInstance& instance, const SessionParams& params) {
    const auto& catalog =
        params.catalog ? *params.catalog : prompts::TemplateCatalog::builtin();
    // The label keys mock scenarios so two counselors over one instance do
    // not share fixture ordinals.
    const std::string scenario_base =
        "session:" + params.counselor_model + "|" + instance.instance_id();

    std::string opening = text::trim(instance.opening_utterance);
    if (opening.empty())
        throw EvalError(EvalError::Kind::EmptyInput,
                        "instance " + instance.instance_id() +
                            " has no opening utterance");

    Session session;
    session.instance = instance;
    session.counselor_label = params.counselor_model;
    session.dialogue.id = instance.instance_id();
    session.dialogue.utterances.push_back({Speaker::Client, std::move(opening)});

    auto make_req = [&](const std::string& model, const std::string& scenario,
                        std::string prompt) {
        llm::ChatRequest req;
        req.model_id = model;
        req.temperature = params.temperature;
        req.max_tokens = params.max_tokens;
        req.scenario = scenario;
        req.messages = {{llm::Role::User, std::move(prompt)}};
        return req;
    };

    // A blank completion would break the non-empty-utterance invariant of the
    // stored transcript; abort the session as a resumable error instead.
    auto require_text = [&](std::string reply, const char* role) {
        std::string trimmed = text::trim(reply);
        if (trimmed.empty())
            throw Error("empty_completion",
                        std::string(role) + " returned an empty message in " +
                            instance.instance_id());
        return trimmed;
    };

    for (;;) {
        // Counselor replies to the latest client message.
        std::string transcript = render_dialogue(session.dialogue);
        std::string counselor_reply = llm::complete(
            counselor,
            make_req(params.counselor_model, scenario_base + ":counselor",
                     counselor_prompt(instance, transcript)),
            params.retry);
        session.dialogue.utterances.push_back(
            {Speaker::Counselor, require_text(counselor_reply, "counselor")});
        ++session.exchanges;

        if (session.exchanges >= params.cap_exchanges) {
            session.ended_by = EndReason::Cap;
            session.dialogue.truncated = true;
            break;
        }

        prompts::Bindings bindings{
            {"intake_form", instance.intake_form.to_text()},
            {"attitude", std::string(to_string(instance.attitude))},
            {"attitude_behaviors", prompts::attitude_behaviors_text(instance.attitude)},
            {"transcript", render_dialogue(session.dialogue)}};
        std::string client_reply = llm::complete(
            client,
            make_req(params.client_model, scenario_base + ":client",
                     catalog.render(prompts::TemplateId::AiClient, bindings)),
            params.retry);

        if (client_reply.find(kEndToken) != std::string::npos) {
            std::string residue = strip_end_token(client_reply);
            if (!residue.empty())
                session.dialogue.utterances.push_back({Speaker::Client, residue});
            session.ended_by = EndReason::EndToken;
            break;
        }
        session.dialogue.utterances.push_back(
            {Speaker::Client, require_text(client_reply, "client")});
    }
    return session;
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

CtrsScore evaluate_ctrs(llm::ChatBackend& judge, const Session& session,
                        const judging::JudgeParams& params) {
    return judging::judge_ctrs(judge, session.dialogue, params,
                               "ctrs:" + session.counselor_label + "|" +
                                   session.instance.instance_id());
}

PanasPair PanasPair::of(PanasSheet pre_sheet, PanasSheet post_sheet) {
    PanasPair pair;
    pair.pre = pre_sheet;
    pair.post = post_sheet;
    pair.delta_positive = post_sheet.positive_sum() - pre_sheet.positive_sum();
    pair.delta_negative = post_sheet.negative_sum() - pre_sheet.negative_sum();
    return pair;
}

PanasPair evaluate_panas(llm::ChatBackend& judge, const Session& session,
                         const judging::JudgeParams& params) {
    const std::string id =
        session.counselor_label + "|" + session.instance.instance_id();
    PanasSheet pre = judging::judge_panas(
        judge, session.instance.intake_form, "before the counseling session",
        "(the session has not taken place yet)", params, "panas_pre:" + id);
    PanasSheet post = judging::judge_panas(
        judge, session.instance.intake_form, "after the counseling session",
        render_dialogue(session.dialogue), params, "panas_post:" + id);
    return PanasPair::of(pre, post);
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

ReportTables aggregate(const std::vector<ScoredSession>& sessions) {
    if (sessions.empty())
        throw EvalError(EvalError::Kind::EmptyInput, "no scored sessions");

    std::vector<std::string> labels;
    for (const auto& s : sessions) {
        if (std::find(labels.begin(), labels.end(), s.counselor_label) == labels.end())
            labels.push_back(s.counselor_label);
    }

    ReportTables tables;
    for (const auto& label : labels) {
        CtrsRow row;
        row.label = label;
        std::array<long, 6> sums{};
        for (const auto& s : sessions) {
            if (s.counselor_label != label) continue;
            auto vals = s.ctrs.values();
            for (int i = 0; i < 6; ++i) sums[i] += vals[i];
            ++row.sessions;
            if (s.truncated) ++tables.truncated_counts[label];
        }
        for (int i = 0; i < 6; ++i)
            row.means[i] = static_cast<double>(sums[i]) /
                           static_cast<double>(row.sessions);
        tables.ctrs_rows.push_back(std::move(row));
        tables.truncated_counts.try_emplace(label, 0);

        for (auto attitude : kAllAttitudes) {
            PanasRow prow;
            prow.label = label;
            prow.attitude = attitude;
            long dpos = 0, dneg = 0;
            for (const auto& s : sessions) {
                if (s.counselor_label != label || s.attitude != attitude) continue;
                dpos += s.panas.delta_positive;
                dneg += s.panas.delta_negative;
                ++prow.sessions;
            }
            if (prow.sessions > 0) {
                prow.mean_delta_positive =
                    static_cast<double>(dpos) / static_cast<double>(prow.sessions);
                prow.mean_delta_negative =
                    static_cast<double>(dneg) / static_cast<double>(prow.sessions);
            }
            tables.panas_rows.push_back(std::move(prow));
        }
    }
    return tables;
}

std::string ReportTables::render_text() const {
    std::ostringstream out;
    out << "CTRS means\n";
    out << "  label";
    for (auto name : ctrs_criterion_display_names()) out << " | " << name;
    out << "\n";
    for (const auto& row : ctrs_rows) {
        out << "  " << row.label;
        for (double m : row.means) out << " | " << fmt2(m);
        out << "  (n=" << row.sessions << ")\n";
    }
    out << "PANAS mean deltas (positive / negative)\n";
    for (const auto& row : panas_rows) {
        out << "  " << row.label << " | " << display_name(row.attitude) << " | "
            << fmt2_signed(row.mean_delta_positive) << " / "
            << fmt2_signed(row.mean_delta_negative) << "  (n=" << row.sessions
            << ")\n";
    }
    out << "truncated sessions\n";
    for (const auto& [label, count] : truncated_counts)
        out << "  " << label << ": " << count << "\n";
    return out.str();
}

void to_json(json& j, const CtrsRow& row) {
    json means = json::object();
    const auto& names = ctrs_criterion_names();
    for (int c = 0; c < kCtrsCriterionCount; ++c)
        means[std::string(names[c])] = row.means[c];
    j = json{{"counselor", row.label},
             {"means", std::move(means)},
             {"sessions", row.sessions}};
}

void to_json(json& j, const PanasRow& row) {
    j = json{{"counselor", row.label},
             {"attitude", std::string(to_string(row.attitude))},
             {"mean_delta_positive", row.mean_delta_positive},
             {"mean_delta_negative", row.mean_delta_negative},
             {"sessions", row.sessions}};
}

void to_json(json& j, const ReportTables& tables) {
    j = json{{"ctrs", tables.ctrs_rows},
             {"panas", tables.panas_rows},
             {"truncated", tables.truncated_counts}};
}

// ---------------------------------------------------------------------------
// Evaluator agreement
// ---------------------------------------------------------------------------

namespace {

struct AlignedScores {
    std::vector<CtrsScore> expert;
    std::vector<CtrsScore> other;
};

AlignedScores align_by_id(const ScoredItems& expert, const ScoredItems& other) {
    if (expert.size() != other.size())
        throw stats::StatsError(stats::StatsError::Kind::LengthMismatch,
                                "expert and other score counts differ");
    std::map<std::string, CtrsScore> other_by_id;
    for (const auto& [id, score] : other) other_by_id.emplace(id, score);
    if (other_by_id.size() != other.size())
        throw stats::StatsError(stats::StatsError::Kind::LengthMismatch,
                                "duplicate item ids in other scores");

    AlignedScores aligned;
    for (const auto& [id, score] : expert) {
        auto it = other_by_id.find(id);
        if (it == other_by_id.end())
            throw stats::StatsError(stats::StatsError::Kind::LengthMismatch,
                                    "item '" + id + "' missing from other scores");
        aligned.expert.push_back(score);
        aligned.other.push_back(it->second);
    }
    return aligned;
}

double general_mean(const CtrsScore& s) {
    return (s.understanding + s.interpersonal_effectiveness + s.collaboration) / 3.0;
}

double cbt_mean(const CtrsScore& s) {
    return (s.guided_discovery + s.focus + s.strategy) / 3.0;
}

TriCorrelation correlate(const std::vector<double>& x, const std::vector<double>& y) {
    TriCorrelation tri;
    tri.r = stats::pearson(x, y);
    tri.rho = stats::spearman(x, y);
    tri.tau = stats::kendall_tau(x, y);
    return tri;
}

} // namespace

AgreementReport evaluator_agreement(const ScoredItems& expert,
                                    const ScoredItems& other) {
    AlignedScores aligned = align_by_id(expert, other);
    const size_t n = aligned.expert.size();

    std::vector<double> eg(n), og(n), ec(n), oc(n);
    for (size_t i = 0; i < n; ++i) {
        eg[i] = general_mean(aligned.expert[i]);
        og[i] = general_mean(aligned.other[i]);
        ec[i] = cbt_mean(aligned.expert[i]);
        oc[i] = cbt_mean(aligned.other[i]);
    }

    AgreementReport report;
    report.general = correlate(eg, og);
    report.cbt = correlate(ec, oc);
    return report;
}

std::map<std::string, TriCorrelation> per_criterion_agreement(
    const ScoredItems& expert, const ScoredItems& other) {
    AlignedScores aligned = align_by_id(expert, other);
    const size_t n = aligned.expert.size();

    std::map<std::string, TriCorrelation> result;
    const auto& names = ctrs_criterion_names();
    for (int c = 0; c < kCtrsCriterionCount; ++c) {
        std::vector<double> x(n), y(n);
        for (size_t i = 0; i < n; ++i) {
            x[i] = aligned.expert[i].values()[c];
            y[i] = aligned.other[i].values()[c];
        }
        result[std::string(names[c])] = correlate(x, y);
    }
    return result;
}

void to_json(json& j, const TriCorrelation& tri) {
    j = json{{"r", tri.r}, {"rho", tri.rho}, {"tau", tri.tau}};
}

void to_json(json& j, const AgreementReport& report) {
    j = json{{"general_counseling", report.general}, {"cbt_specific", report.cbt}};
}

// ---------------------------------------------------------------------------
// Head-to-head
// ---------------------------------------------------------------------------

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::WinA: return "win_a";
        case Outcome::WinB: return "win_b";
        case Outcome::Tie: return "tie";
    }
    return "tie";
}

std::optional<Outcome> outcome_from_string(std::string_view s) {
    std::string n = text::normalize(s);
    if (n == "win a" || n == "a" || n == "wina") return Outcome::WinA;
    if (n == "win b" || n == "b" || n == "winb") return Outcome::WinB;
    if (n == "tie") return Outcome::Tie;
    return std::nullopt;
}

WinRateReport head_to_head(const std::vector<Judgment>& judgments) {
    if (judgments.empty())
        throw EvalError(EvalError::Kind::EmptyInput, "no judgments");

    std::vector<std::string> criteria;
    for (const auto& j : judgments) {
        if (std::find(criteria.begin(), criteria.end(), j.criterion) == criteria.end())
            criteria.push_back(j.criterion);
    }

    WinRateReport report;
    for (const auto& criterion : criteria) {
        CriterionWinRate row;
        row.criterion = criterion;
        for (const auto& j : judgments) {
            if (j.criterion != criterion) continue;
            switch (j.outcome) {
                case Outcome::WinA: ++row.wins_a; break;
                case Outcome::WinB: ++row.wins_b; break;
                case Outcome::Tie: ++row.ties; break;
            }
        }
        const double total =
            static_cast<double>(row.wins_a + row.wins_b + row.ties);
        row.pct_a = 100.0 * static_cast<double>(row.wins_a) / total;
        row.pct_b = 100.0 * static_cast<double>(row.wins_b) / total;
        row.pct_tie = 100.0 * static_cast<double>(row.ties) / total;
        if (row.wins_a + row.wins_b > 0) {
            row.p_value = stats::sign_test_p(static_cast<long>(row.wins_a),
                                             static_cast<long>(row.wins_b));
            row.significant = *row.p_value < 0.05;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string WinRateReport::render_text() const {
    std::ostringstream out;
    for (const auto& row : rows) {
        auto bar = [](double pct) {
            return std::string(static_cast<size_t>(pct / 5.0 + 0.5), '#');
        };
        out << row.criterion << "\n";
        out << "  A   " << fmt2(row.pct_a) << "% " << bar(row.pct_a) << "\n";
        out << "  tie " << fmt2(row.pct_tie) << "% " << bar(row.pct_tie) << "\n";
        out << "  B   " << fmt2(row.pct_b) << "% " << bar(row.pct_b) << "\n";
        if (row.p_value) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4f", *row.p_value);
            out << "  p = " << buf << (row.significant ? " (significant)" : "")
                << "\n";
        } else {
            out << "  p = n/a (all ties)\n";
        }
    }
    return out.str();
}

} // namespace cactus::eval
