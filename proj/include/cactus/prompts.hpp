#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cactus/errors.hpp"
#include "cactus/model.hpp"

namespace cactus::prompts {

enum class TemplateId {
    SuitabilityFilter,
    IntakeForm,
    TechniqueSelection,
    PlanGeneration,
    ScriptDialogue,
    AiClient,
    CtrsJudge,
    PanasJudge,
};

inline constexpr int kTemplateCount = 8;
extern const std::array<TemplateId, kTemplateCount> kAllTemplateIds;

std::string_view to_string(TemplateId id);          // snake_case name
std::string template_file_name(TemplateId id);      // "<name>.txt"
std::optional<TemplateId> template_from_string(std::string_view name);

using Bindings = std::map<std::string, std::string>;

class TemplateError : public Error {
public:
    enum class Kind { MissingBinding, UnknownPlaceholder, BadTemplate };

    TemplateError(Kind kind, const std::string& name, const std::string& message);

    Kind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

private:
    Kind kind_;
    std::string name_;
};

// Template texts keyed by id. Templates are plain text with {placeholder}
// markers; "{{" and "}}" escape literal braces. Files in a directory named
// like template_file_name() override the built-in texts.
class TemplateCatalog {
public:
    static const TemplateCatalog& builtin();
    static TemplateCatalog load_dir(const std::string& dir);

    const std::string& text(TemplateId id) const;
    std::set<std::string> placeholders(TemplateId id) const;

    // Substitutes every placeholder. Throws MissingBinding when a placeholder
    // has no binding and UnknownPlaceholder when a binding has no placeholder;
    // the result carries no residual markers.
    std::string render(TemplateId id, const Bindings& bindings) const;

private:
    std::map<TemplateId, std::string> texts_;
};

// Rendering against the built-in catalog.
std::string render_template(TemplateId id, const Bindings& bindings);

// ---------------------------------------------------------------------------
// Judge / selector output parsing
// ---------------------------------------------------------------------------

class JudgeParseError : public Error {
public:
    enum class Kind {
        WrongCount,
        UnknownTechnique,
        MissingCriterion,
        MissingItem,
        OutOfRange,
    };

    JudgeParseError(Kind kind, const std::string& name, long value,
                    const std::string& message);

    Kind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }  // criterion/item
    long value() const noexcept { return value_; }              // count or score

private:
    Kind kind_;
    std::string name_;
    long value_ = 0;
};

// Exactly three distinct techniques in listed order, matched against the
// catalog case-insensitively (hyphens and spacing ignored).
std::vector<CbtTechnique> parse_technique_selection(std::string_view text);

// One integer in [0,6] per criterion; names matched case-insensitively in
// "name: n" lines, prose, or object-literal blocks. Throws MissingCriterion
// or OutOfRange naming the first offending criterion in canonical order.
CtrsScore parse_ctrs_scores(std::string_view text);

// Twenty integers in [1,5]; same matching rules as CTRS.
PanasSheet parse_panas_scores(std::string_view text);

// Canonical "name: n" blocks; parse_* of the result reproduces the value.
std::string format_ctrs_block(const CtrsScore& s);
std::string format_panas_block(const PanasSheet& s);

// "- Name: description" lines for all 12 techniques, prompt-ready.
std::string technique_catalog_text();

// "- behavior" bullet list for an attitude.
std::string attitude_behaviors_text(Attitude a);

// Instruction appended when re-asking after a failed judge parse.
std::string_view reformat_instruction();

} // namespace cactus::prompts
