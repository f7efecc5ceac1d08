#include "cactus/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace cactus::prompts {

namespace {

std::string kind_code(JudgeParseError::Kind k) {
    switch (k) {
        case JudgeParseError::Kind::WrongCount: return "wrong_count";
        case JudgeParseError::Kind::UnknownTechnique: return "unknown_technique";
        case JudgeParseError::Kind::MissingCriterion: return "missing_criterion";
        case JudgeParseError::Kind::MissingItem: return "missing_item";
        case JudgeParseError::Kind::OutOfRange: return "out_of_range";
    }
    return "judge_parse_error";
}

// Length-preserving normalization so match positions map back to the input:
// letters lowered, anything else becomes a space.
std::string flatten(std::string_view s) {
    std::string out(s.size(), ' ');
    for (size_t i = 0; i < s.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (std::isalnum(c)) out[i] = static_cast<char>(std::tolower(c));
    }
    return out;
}

bool boundary_before(const std::string& flat, size_t pos) {
    return pos == 0 || flat[pos - 1] == ' ';
}

bool boundary_after(const std::string& flat, size_t end) {
    if (end >= flat.size() || flat[end] == ' ') return true;
    // Tolerate a plural 's' directly after a matched name.
    return flat[end] == 's' && (end + 1 >= flat.size() || flat[end + 1] == ' ');
}

} // namespace

JudgeParseError::JudgeParseError(Kind kind, const std::string& name, long value,
                                 const std::string& message)
    : Error(kind_code(kind), message), kind_(kind), name_(name), value_(value) {}

// ---------------------------------------------------------------------------
// Technique selection
// ---------------------------------------------------------------------------

std::vector<CbtTechnique> parse_technique_selection(std::string_view raw) {
    const std::string flat = flatten(raw);

    struct Hit {
        size_t pos;
        CbtTechnique technique;
    };
    std::vector<Hit> hits;
    for (auto t : kAllCbtTechniques) {
        const std::string needle = flatten(display_name(t));
        size_t from = 0;
        while (true) {
            size_t pos = flat.find(needle, from);
            if (pos == std::string::npos) break;
            if (boundary_before(flat, pos) && boundary_after(flat, pos + needle.size()))
                hits.push_back({pos, t});
            from = pos + 1;
        }
    }
    std::sort(hits.begin(), hits.end(),
              [](const Hit& a, const Hit& b) { return a.pos < b.pos; });

    std::vector<CbtTechnique> ordered;
    for (const auto& h : hits) {
        if (std::find(ordered.begin(), ordered.end(), h.technique) == ordered.end())
            ordered.push_back(h.technique);
    }
    if (ordered.size() == 3) return ordered;

    // A ranked line that matches no catalog name explains the failure better
    // than a bare count.
    for (const auto& line : text::split_lines(raw)) {
        std::string trimmed = text::trim(line);
        size_t d = 0;
        while (d < trimmed.size() && std::isdigit(static_cast<unsigned char>(trimmed[d])))
            ++d;
        if (d == 0 || d >= trimmed.size()) continue;
        if (trimmed[d] != '.' && trimmed[d] != ')') continue;
        std::string body = text::trim(trimmed.substr(d + 1));
        if (body.empty()) continue;
        const std::string line_flat = flatten(body);
        bool matched = false;
        for (auto t : kAllCbtTechniques) {
            if (line_flat.find(flatten(display_name(t))) != std::string::npos) {
                matched = true;
                break;
            }
        }
        if (!matched)
            throw JudgeParseError(JudgeParseError::Kind::UnknownTechnique, body, 0,
                                  "unrecognized technique '" + body + "'");
    }

    throw JudgeParseError(JudgeParseError::Kind::WrongCount, "",
                          static_cast<long>(ordered.size()),
                          "expected 3 distinct techniques, found " +
                              std::to_string(ordered.size()));
}

// ---------------------------------------------------------------------------
// Score extraction shared by CTRS and PANAS
// ---------------------------------------------------------------------------

namespace {

bool is_gap_char(char c) {
    switch (c) {
        case ' ': case '\t': case '*': case '_': case '"': case '\'':
        case '`': case ':': case '=': case '-': case '.': case ',':
        case '(': case ')': case '[': case ']': case '/': case '>':
            return true;
        default:
            return false;
    }
}

// First integer tied to any occurrence of `name` (word-bounded,
// case-insensitive): after the name, only punctuation may separate the
// value, and both must sit on one line.
std::optional<long> find_named_value(std::string_view raw, const std::string& flat,
                                     std::string_view name) {
    const std::string needle = flatten(name);
    size_t from = 0;
    while (true) {
        size_t pos = flat.find(needle, from);
        if (pos == std::string::npos) return std::nullopt;
        from = pos + 1;
        if (!boundary_before(flat, pos)) continue;
        size_t i = pos + needle.size();
        if (i < flat.size() && flat[i] != ' ') continue;  // partial word

        bool negative = false;
        size_t gap_limit = i + 24;
        while (i < raw.size() && i < gap_limit && raw[i] != '\n' && is_gap_char(raw[i])) {
            if (raw[i] == '-' && i + 1 < raw.size() &&
                std::isdigit(static_cast<unsigned char>(raw[i + 1]))) {
                negative = true;
                ++i;
                break;
            }
            ++i;
        }
        if (i >= raw.size() || !std::isdigit(static_cast<unsigned char>(raw[i])))
            continue;

        long value = 0;
        while (i < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i]))) {
            value = value * 10 + (raw[i] - '0');
            ++i;
        }
        return negative ? -value : value;
    }
}

} // namespace

CtrsScore parse_ctrs_scores(std::string_view raw) {
    const std::string flat = flatten(raw);
    const auto& names = ctrs_criterion_names();

    CtrsScore score;
    std::array<int*, 6> fields = {
        &score.understanding, &score.interpersonal_effectiveness,
        &score.collaboration, &score.guided_discovery,
        &score.focus,         &score.strategy};

    for (int i = 0; i < kCtrsCriterionCount; ++i) {
        auto value = find_named_value(raw, flat, names[i]);
        if (!value)
            throw JudgeParseError(JudgeParseError::Kind::MissingCriterion,
                                  std::string(names[i]), 0,
                                  "criterion '" + std::string(names[i]) +
                                      "' not found in judge output");
        if (*value < 0 || *value > 6)
            throw JudgeParseError(JudgeParseError::Kind::OutOfRange,
                                  std::string(names[i]), *value,
                                  "criterion '" + std::string(names[i]) + "' scored " +
                                      std::to_string(*value) + ", outside [0,6]");
        *fields[i] = static_cast<int>(*value);
    }
    return score;
}

PanasSheet parse_panas_scores(std::string_view raw) {
    const std::string flat = flatten(raw);
    PanasSheet sheet;

    auto read_scale = [&](const std::array<std::string_view, 10>& names,
                          std::array<int, 10>& out) {
        for (int i = 0; i < kPanasItemsPerScale; ++i) {
            auto value = find_named_value(raw, flat, names[i]);
            if (!value)
                throw JudgeParseError(JudgeParseError::Kind::MissingItem,
                                      std::string(names[i]), 0,
                                      "item '" + std::string(names[i]) +
                                          "' not found in judge output");
            if (*value < 1 || *value > 5)
                throw JudgeParseError(JudgeParseError::Kind::OutOfRange,
                                      std::string(names[i]), *value,
                                      "item '" + std::string(names[i]) + "' rated " +
                                          std::to_string(*value) + ", outside [1,5]");
            out[i] = static_cast<int>(*value);
        }
    };

    read_scale(panas_positive_item_names(), sheet.positive_items);
    read_scale(panas_negative_item_names(), sheet.negative_items);
    return sheet;
}

std::string format_ctrs_block(const CtrsScore& s) {
    std::ostringstream out;
    const auto& names = ctrs_criterion_names();
    auto vals = s.values();
    for (int i = 0; i < kCtrsCriterionCount; ++i)
        out << names[i] << ": " << vals[i] << "\n";
    return out.str();
}

std::string format_panas_block(const PanasSheet& s) {
    std::ostringstream out;
    const auto& pos = panas_positive_item_names();
    const auto& neg = panas_negative_item_names();
    for (int i = 0; i < kPanasItemsPerScale; ++i)
        out << pos[i] << ": " << s.positive_items[i] << "\n";
    for (int i = 0; i < kPanasItemsPerScale; ++i)
        out << neg[i] << ": " << s.negative_items[i] << "\n";
    return out.str();
}

} // namespace cactus::prompts
