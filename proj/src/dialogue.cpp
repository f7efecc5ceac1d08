#include "cactus/dialogue.hpp"

#include <cctype>
#include <sstream>

namespace cactus {

namespace {

std::string kind_code(DialogueParseError::Kind k) {
    switch (k) {
        case DialogueParseError::Kind::NoPrefixFound: return "no_prefix_found";
        case DialogueParseError::Kind::AlternationViolation: return "alternation_violation";
        case DialogueParseError::Kind::EmptyUtterance: return "empty_utterance";
    }
    return "dialogue_parse_error";
}

// Matches an optional run of markup characters, a speaker name, optional
// markup again, then a colon. Returns the speaker and the offset just past
// the colon, or nullopt when the line is a continuation.
struct PrefixMatch {
    Speaker speaker;
    size_t text_offset;
};

bool is_markup(char c) {
    return c == '*' || c == '_' || c == '#' || c == '-' || c == '>' || c == '[';
}

std::optional<PrefixMatch> match_prefix(std::string_view line) {
    size_t i = 0;
    bool leading_markup = false;
    while (i < line.size() &&
           (std::isspace(static_cast<unsigned char>(line[i])) || is_markup(line[i]))) {
        leading_markup = leading_markup || is_markup(line[i]);
        ++i;
    }

    auto word_matches = [&](std::string_view word) {
        if (line.size() - i < word.size()) return false;
        for (size_t k = 0; k < word.size(); ++k) {
            if (std::tolower(static_cast<unsigned char>(line[i + k])) != word[k])
                return false;
        }
        return true;
    };

    Speaker speaker;
    size_t name_len = 0;
    if (word_matches("counselor")) {
        speaker = Speaker::Counselor;
        name_len = 9;
    } else if (word_matches("client")) {
        speaker = Speaker::Client;
        name_len = 6;
    } else {
        return std::nullopt;
    }

    size_t j = i + name_len;
    while (j < line.size() &&
           (line[j] == '*' || line[j] == '_' || line[j] == ']' ||
            std::isspace(static_cast<unsigned char>(line[j]))))
        ++j;
    if (j >= line.size() || line[j] != ':') return std::nullopt;
    ++j;
    // "**Counselor:** Hi" closes its bold run after the colon; only strip
    // there when markup opened the prefix, so plain texts keep a leading '*'.
    if (leading_markup) {
        while (j < line.size() && (line[j] == '*' || line[j] == '_')) ++j;
    }
    return PrefixMatch{speaker, j};
}

void append_fragment(std::string& text, std::string_view fragment) {
    std::string piece = text::trim(fragment);
    if (piece.empty()) return;
    if (!text.empty()) text.push_back(' ');
    text += piece;
}

} // namespace

DialogueParseError::DialogueParseError(Kind kind, const std::string& message)
    : Error(kind_code(kind), message), kind_(kind) {}

Dialogue parse_dialogue(std::string_view script, std::string id) {
    Dialogue d;
    d.id = std::move(id);

    bool seen_prefix = false;
    for (const auto& line : text::split_lines(script)) {
        if (auto m = match_prefix(line)) {
            if (seen_prefix && d.utterances.back().text.empty()) {
                throw DialogueParseError(DialogueParseError::Kind::EmptyUtterance,
                                         "speaker line with no utterance text");
            }
            if (seen_prefix && d.utterances.back().speaker == m->speaker) {
                throw DialogueParseError(
                    DialogueParseError::Kind::AlternationViolation,
                    "consecutive utterances by " +
                        std::string(to_string(m->speaker)));
            }
            seen_prefix = true;
            Utterance u;
            u.speaker = m->speaker;
            append_fragment(u.text, line.substr(m->text_offset));
            d.utterances.push_back(std::move(u));
        } else if (seen_prefix) {
            append_fragment(d.utterances.back().text, line);
        }
        // Lines before the first prefix are preamble; skipped.
    }

    if (!seen_prefix) {
        throw DialogueParseError(DialogueParseError::Kind::NoPrefixFound,
                                 "no speaker prefix found in script");
    }
    if (d.utterances.back().text.empty()) {
        throw DialogueParseError(DialogueParseError::Kind::EmptyUtterance,
                                 "trailing speaker line with no utterance text");
    }
    return d;
}

std::string render_dialogue(const Dialogue& d) {
    std::ostringstream out;
    for (size_t i = 0; i < d.utterances.size(); ++i) {
        const auto& u = d.utterances[i];
        out << to_string(u.speaker) << ": ";
        for (char c : u.text) out << (c == '\n' ? ' ' : c);
        if (i + 1 < d.utterances.size()) out << '\n';
    }
    return out.str();
}

std::size_t utterance_count(const Dialogue& d) {
    return d.utterances.size();
}

void check_alternation(const Dialogue& d) {
    for (size_t i = 1; i < d.utterances.size(); ++i) {
        if (d.utterances[i].speaker == d.utterances[i - 1].speaker) {
            throw DialogueParseError(
                DialogueParseError::Kind::AlternationViolation,
                "utterances " + std::to_string(i - 1) + " and " + std::to_string(i) +
                    " share a speaker");
        }
    }
}

} // namespace cactus
