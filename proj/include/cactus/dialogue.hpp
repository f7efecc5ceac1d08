#pragma once

#include <string>
#include <string_view>

#include "cactus/errors.hpp"
#include "cactus/model.hpp"

namespace cactus {

class DialogueParseError : public Error {
public:
    enum class Kind { NoPrefixFound, AlternationViolation, EmptyUtterance };

    DialogueParseError(Kind kind, const std::string& message);

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// Turns raw script text into a Dialogue. A line opens a new utterance when it
// starts with "Counselor:" or "Client:" (case-insensitive, leading markup such
// as "**" or "- " tolerated); any other line continues the previous utterance.
// Text before the first prefixed line is ignored.
//
// Throws DialogueParseError:
//   NoPrefixFound        - no line carries a speaker prefix
//   AlternationViolation - two consecutive utterances share a speaker
//   EmptyUtterance       - a prefixed line ends up with no text after merging
Dialogue parse_dialogue(std::string_view script, std::string id = "");

// One "Speaker: text" line per utterance. Embedded newlines inside an
// utterance are flattened to spaces so that parse(render(d)) == d.
std::string render_dialogue(const Dialogue& d);

std::size_t utterance_count(const Dialogue& d);

// Checked at parse/session time; exposed for validating deserialized data.
void check_alternation(const Dialogue& d);

} // namespace cactus
