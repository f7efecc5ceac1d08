#pragma once

#include <optional>
#include <string>

#include "cactus/dialogue.hpp"
#include "cactus/judging.hpp"
#include "cactus/model.hpp"

namespace cactus::filter {

struct FilterBounds {
    int min_utterances = 20;
    int max_utterances = 35;
};

enum class DropReason { TooShort, TooLong, Malformed };

std::string_view to_string(DropReason r);

struct FilterDecision {
    bool keep = false;
    DropReason reason = DropReason::Malformed;  // meaningful when !keep
    int utterances = 0;
    std::string detail;
};

// Structural stage: keep iff the utterance count sits inside the bounds.
// Alternation held at parse time by construction.
FilterDecision basic_filter(const Dialogue& d, const FilterBounds& bounds = {});

// Same check on raw script text; parse failures yield Drop(Malformed).
FilterDecision basic_filter_text(std::string_view script,
                                 const FilterBounds& bounds = {});

// CtrsJudge scoring for one dialogue (temperature comes from params,
// default 0.0), with the standard single repair retry.
CtrsScore score_ctrs(llm::ChatBackend& judge, const Dialogue& d,
                     const judging::JudgeParams& params);

double ctrs_mean(const CtrsScore& s);

// Keep iff mean >= threshold; strictly-below is dropped.
bool ctrs_keep(const CtrsScore& s, double threshold = 5.0);

struct StageCounts {
    size_t input = 0;
    size_t basic_kept = 0;
    size_t ctrs_kept = 0;
};

struct FilterStats {
    StageCounts counts;
    // Absent when the corresponding denominator is zero.
    std::optional<double> basic_retention_pct;
    std::optional<double> ctrs_retention_pct;   // of the basic stage's output
    std::optional<double> cumulative_pct;
    bool zero_denominator = false;

    std::string render_text() const;            // percentages to 2 decimals
};

FilterStats filter_report(const StageCounts& counts);

} // namespace cactus::filter
