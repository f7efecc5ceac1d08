#include "cactus/filter.hpp"

#include <cstdio>
#include <sstream>

namespace cactus::filter {

std::string_view to_string(DropReason r) {
    switch (r) {
        case DropReason::TooShort: return "too_short";
        case DropReason::TooLong: return "too_long";
        case DropReason::Malformed: return "malformed";
    }
    return "malformed";
}

FilterDecision basic_filter(const Dialogue& d, const FilterBounds& bounds) {
    FilterDecision decision;
    decision.utterances = static_cast<int>(utterance_count(d));
    if (decision.utterances < bounds.min_utterances) {
        decision.reason = DropReason::TooShort;
        decision.detail = std::to_string(decision.utterances) + " utterances";
        return decision;
    }
    if (decision.utterances > bounds.max_utterances) {
        decision.reason = DropReason::TooLong;
        decision.detail = std::to_string(decision.utterances) + " utterances";
        return decision;
    }
    decision.keep = true;
    return decision;
}

FilterDecision basic_filter_text(std::string_view script, const FilterBounds& bounds) {
    try {
        return basic_filter(parse_dialogue(script), bounds);
    } catch (const DialogueParseError& e) {
        FilterDecision decision;
        decision.reason = DropReason::Malformed;
        decision.detail = e.what();
        return decision;
    }
}

CtrsScore score_ctrs(llm::ChatBackend& judge, const Dialogue& d,
                     const judging::JudgeParams& params) {
    return judging::judge_ctrs(judge, d, params, "ctrs:" + d.id);
}

double ctrs_mean(const CtrsScore& s) {
    return static_cast<double>(s.sum()) / 6.0;
}

bool ctrs_keep(const CtrsScore& s, double threshold) {
    return ctrs_mean(s) >= threshold;
}

namespace {

std::string pct(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

std::optional<double> ratio_pct(size_t num, size_t den) {
    if (den == 0) return std::nullopt;
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

FilterStats filter_report(const StageCounts& counts) {
    FilterStats stats;
    stats.counts = counts;
    stats.basic_retention_pct = ratio_pct(counts.basic_kept, counts.input);
    stats.ctrs_retention_pct = ratio_pct(counts.ctrs_kept, counts.basic_kept);
    stats.cumulative_pct = ratio_pct(counts.ctrs_kept, counts.input);
    stats.zero_denominator = counts.input == 0 || counts.basic_kept == 0;
    return stats;
}

std::string FilterStats::render_text() const {
    std::ostringstream out;
    auto line = [&](const char* label, size_t kept, size_t input,
                    const std::optional<double>& p) {
        out << label << ": " << kept << "/" << input << " kept";
        if (p) out << " (" << pct(*p) << "%)";
        else out << " (n/a)";
        out << "\n";
    };
    line("basic filter", counts.basic_kept, counts.input, basic_retention_pct);
    line("ctrs filter", counts.ctrs_kept, counts.basic_kept, ctrs_retention_pct);
    line("cumulative", counts.ctrs_kept, counts.input, cumulative_pct);
    if (zero_denominator) out << "warning: zero denominator, percentages omitted\n";
    return out.str();
}

} // namespace cactus::filter
