#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cactus/prompts.hpp"
#include "support/sample_transcript.hpp"

using namespace cactus;
using namespace cactus::prompts;

TEST_CASE("template rendering substitutes every placeholder") {
    Bindings b{{"thought", "I always fail."},
               {"patterns", "Overgeneralization"},
               {"reframed_thought", "One setback is not a pattern."},
               {"technique_catalog", technique_catalog_text()}};
    std::string prompt = render_template(TemplateId::TechniqueSelection, b);
    CHECK(prompt.find("I always fail.") != std::string::npos);
    CHECK(prompt.find("Overgeneralization") != std::string::npos);
    CHECK(prompt.find("One setback is not a pattern.") != std::string::npos);
    CHECK(prompt.find("Behavior Experiment") != std::string::npos);
    CHECK(prompt.find('{') == std::string::npos);
    CHECK(prompt.find('}') == std::string::npos);
}

TEST_CASE("missing binding names the placeholder") {
    Bindings b{{"thought", "x"}};  // persona absent
    try {
        render_template(TemplateId::IntakeForm, b);
        FAIL("expected MissingBinding");
    } catch (const TemplateError& e) {
        CHECK(e.kind() == TemplateError::Kind::MissingBinding);
        CHECK(e.name() == "persona");
    }
}

TEST_CASE("extra binding is rejected as UnknownPlaceholder") {
    Bindings b{{"persona", "p"}, {"thought", "t"}, {"extra", "nope"}};
    try {
        render_template(TemplateId::IntakeForm, b);
        FAIL("expected UnknownPlaceholder");
    } catch (const TemplateError& e) {
        CHECK(e.kind() == TemplateError::Kind::UnknownPlaceholder);
        CHECK(e.name() == "extra");
    }
}

TEST_CASE("rendering is pure") {
    Bindings b{{"persona", "p"}, {"thought", "t"}};
    CHECK(render_template(TemplateId::IntakeForm, b) ==
          render_template(TemplateId::IntakeForm, b));
}

TEST_CASE("ctrs judge template lists all six criteria around the transcript") {
    Bindings b{{"transcript", kSampleTranscript}};
    std::string prompt = render_template(TemplateId::CtrsJudge, b);
    for (auto name : ctrs_criterion_display_names())
        CHECK(prompt.find(std::string(name)) != std::string::npos);
    CHECK(prompt.find("Hi Margaret") != std::string::npos);
}

TEST_CASE("every template id maps to exactly one text with known placeholders") {
    const auto& catalog = TemplateCatalog::builtin();
    CHECK(kAllTemplateIds.size() == 8);
    for (auto id : kAllTemplateIds) {
        CHECK(!catalog.text(id).empty());
        CHECK(!catalog.placeholders(id).empty());
    }
    CHECK(catalog.placeholders(TemplateId::TechniqueSelection) ==
          std::set<std::string>{"thought", "patterns", "reframed_thought",
                                "technique_catalog"});
    CHECK(catalog.placeholders(TemplateId::AiClient) ==
          std::set<std::string>{"intake_form", "attitude", "attitude_behaviors",
                                "transcript"});
}

TEST_CASE("shipped template files mirror the built-ins") {
    const auto& builtin = TemplateCatalog::builtin();
    for (auto id : kAllTemplateIds) {
        std::ifstream in(std::string(CACTUS_PROMPTS_DIR) + "/" +
                         template_file_name(id));
        REQUIRE_MESSAGE(in.good(), template_file_name(id));
        std::ostringstream buf;
        buf << in.rdbuf();
        CHECK(buf.str() == builtin.text(id));
    }
    auto loaded = TemplateCatalog::load_dir(CACTUS_PROMPTS_DIR);
    for (auto id : kAllTemplateIds) CHECK(loaded.text(id) == builtin.text(id));
}

TEST_CASE("template directory overrides swap prompt variants") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "cactus_prompt_override";
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "ctrs_judge.txt");
        f << "Rate it.\n{transcript}\n";
    }
    auto catalog = TemplateCatalog::load_dir(dir.string());
    CHECK(catalog.text(TemplateId::CtrsJudge) == "Rate it.\n{transcript}\n");
    // Untouched ids keep the built-in text.
    CHECK(catalog.text(TemplateId::AiClient) ==
          TemplateCatalog::builtin().text(TemplateId::AiClient));
    fs::remove_all(dir);
}

// ---------------------------------------------------------------------------
// Technique selection parsing
// ---------------------------------------------------------------------------

TEST_CASE("technique selection parses exact numbered names") {
    auto picks = parse_technique_selection(
        "1. Behavior Experiment 2. Reality Testing 3. Decatastrophizing");
    REQUIRE(picks.size() == 3);
    CHECK(picks[0] == CbtTechnique::BehaviorExperiment);
    CHECK(picks[1] == CbtTechnique::RealityTesting);
    CHECK(picks[2] == CbtTechnique::Decatastrophizing);
}

TEST_CASE("two techniques raise WrongCount(2)") {
    try {
        parse_technique_selection("1. Reality Testing\n2. Behavior Experiment");
        FAIL("expected WrongCount");
    } catch (const JudgeParseError& e) {
        CHECK(e.kind() == JudgeParseError::Kind::WrongCount);
        CHECK(e.value() == 2);
    }
}

TEST_CASE("fuzzy matching finds hyphenated names in noisy lines") {
    auto picks = parse_technique_selection(
        "Sure! Based on the reframing goal, I suggest:\n"
        "1. evidence-based questioning, because it builds evidence habits\n"
        "some unrelated commentary line\n"
        "2. Alternative Perspective\n"
        "3. Pros and Cons Analysis\n"
        "Good luck!");
    REQUIRE(picks.size() == 3);
    CHECK(picks[0] == CbtTechnique::EvidenceBasedQuestioning);
    CHECK(picks[1] == CbtTechnique::AlternativePerspective);
    CHECK(picks[2] == CbtTechnique::ProsAndConsAnalysis);
}

TEST_CASE("duplicates collapse and then fail the count") {
    try {
        parse_technique_selection(
            "1. Reality Testing\n2. Reality Testing\n3. Reality Testing");
        FAIL("expected WrongCount");
    } catch (const JudgeParseError& e) {
        CHECK(e.kind() == JudgeParseError::Kind::WrongCount);
        CHECK(e.value() == 1);
    }
}

TEST_CASE("a ranked line that matches nothing names the unknown technique") {
    try {
        parse_technique_selection(
            "1. Mindfulness Meditation\n2. Reality Testing\n3. Behavior Experiment");
        FAIL("expected UnknownTechnique");
    } catch (const JudgeParseError& e) {
        CHECK(e.kind() == JudgeParseError::Kind::UnknownTechnique);
        CHECK(e.name().find("Mindfulness") != std::string::npos);
    }
}

// ---------------------------------------------------------------------------
// CTRS / PANAS parsing
// ---------------------------------------------------------------------------

namespace {

std::string ctrs_text(int u, int i, int c, int g, int f, int s) {
    std::ostringstream out;
    out << "Understanding: " << u << "\nInterpersonal Effectiveness: " << i
        << "\nCollaboration: " << c << "\nGuided Discovery: " << g
        << "\nFocus: " << f << "\nStrategy: " << s << "\n";
    return out.str();
}

} // namespace

TEST_CASE("ctrs scores parse from name: n lines") {
    auto s = parse_ctrs_scores(ctrs_text(4, 5, 4, 4, 4, 5));
    CHECK(s == CtrsScore{4, 5, 4, 4, 4, 5});
}

TEST_CASE("ctrs scores parse from an object literal block") {
    auto s = parse_ctrs_scores(
        R"({"understanding": 5, "interpersonal_effectiveness": 6, "collaboration": 5,
            "guided_discovery": 5, "focus": 5, "strategy": 6})");
    CHECK(s == CtrsScore{5, 6, 5, 5, 5, 6});
}

TEST_CASE("ctrs parse reports the first missing criterion") {
    try {
        parse_ctrs_scores("Understanding: 4\nCollaboration: 5");
        FAIL("expected MissingCriterion");
    } catch (const JudgeParseError& e) {
        CHECK(e.kind() == JudgeParseError::Kind::MissingCriterion);
        CHECK(e.name() == "interpersonal_effectiveness");
    }
}

TEST_CASE("ctrs parse rejects out-of-range scores") {
    try {
        parse_ctrs_scores(ctrs_text(4, 5, 4, 4, 4, 7));
        FAIL("expected OutOfRange");
    } catch (const JudgeParseError& e) {
        CHECK(e.kind() == JudgeParseError::Kind::OutOfRange);
        CHECK(e.name() == "strategy");
        CHECK(e.value() == 7);
    }
    try {
        parse_ctrs_scores(ctrs_text(4, 5, -1, 4, 4, 5));
        FAIL("expected OutOfRange");
    } catch (const JudgeParseError& e) {
        CHECK(e.kind() == JudgeParseError::Kind::OutOfRange);
        CHECK(e.name() == "collaboration");
        CHECK(e.value() == -1);
    }
}

TEST_CASE("ctrs parse handles reordering, markup and rating suffixes") {
    auto s = parse_ctrs_scores(
        "Here is my assessment of the session.\n\n"
        "- **Strategy**: 5/6\n"
        "- Focus = 4\n"
        "1. Guided Discovery: 4\n"
        "Collaboration - 5\n"
        "**Interpersonal Effectiveness:** 6\n"
        "Understanding ... 4\n"
        "Overall a strong session.");
    CHECK(s == CtrsScore{4, 6, 5, 4, 4, 5});
}

TEST_CASE("panas sheets parse and sum") {
    std::ostringstream text;
    for (auto name : panas_positive_item_names()) text << name << ": 3\n";
    for (auto name : panas_negative_item_names()) text << name << ": 3\n";
    auto sheet = parse_panas_scores(text.str());
    CHECK(sheet.positive_sum() == 30);
    CHECK(sheet.negative_sum() == 30);
}

TEST_CASE("panas sheets near the observed corpus means sum as stated") {
    // Positive items summing 28 and negative 22, close to the observed
    // per-session means of 28.4 and 22.5.
    std::ostringstream text;
    int i = 0;
    for (auto name : panas_positive_item_names())
        text << name << ": " << (i++ < 8 ? 3 : 2) << "\n";
    i = 0;
    for (auto name : panas_negative_item_names())
        text << name << ": " << (i++ < 2 ? 3 : 2) << "\n";
    auto sheet = parse_panas_scores(text.str());
    CHECK(sheet.positive_sum() == 28);
    CHECK(sheet.negative_sum() == 22);
    CHECK(std::abs(sheet.positive_sum() - 28.4) < 1.0);
    CHECK(std::abs(sheet.negative_sum() - 22.5) < 1.0);
}

TEST_CASE("panas parse reports a missing item") {
    std::ostringstream text;
    for (auto name : panas_positive_item_names()) text << name << ": 3\n";
    for (auto name : panas_negative_item_names())
        if (name != "jittery") text << name << ": 2\n";
    try {
        parse_panas_scores(text.str());
        FAIL("expected MissingItem");
    } catch (const JudgeParseError& e) {
        CHECK(e.kind() == JudgeParseError::Kind::MissingItem);
        CHECK(e.name() == "jittery");
    }
}

TEST_CASE("panas parse rejects ratings outside [1,5]") {
    std::ostringstream text;
    for (auto name : panas_positive_item_names()) text << name << ": 3\n";
    for (auto name : panas_negative_item_names())
        text << name << ": " << (name == "upset" ? 0 : 2) << "\n";
    try {
        parse_panas_scores(text.str());
        FAIL("expected OutOfRange");
    } catch (const JudgeParseError& e) {
        CHECK(e.kind() == JudgeParseError::Kind::OutOfRange);
        CHECK(e.name() == "upset");
    }
}

TEST_CASE("parsers are total: arbitrary text either parses or throws a typed error") {
    std::mt19937 rng(71);
    std::uniform_int_distribution<int> len(0, 200);
    std::uniform_int_distribution<int> byte(0, 96);
    for (int trial = 0; trial < 500; ++trial) {
        std::string text;
        const int n = len(rng);
        for (int i = 0; i < n; ++i)
            text.push_back(static_cast<char>(' ' + byte(rng) % 95));
        if (trial % 4 == 0) text += "\nunderstanding: 4\nfocus: 3";
        try {
            auto s = parse_ctrs_scores(text);
            s.validate();
        } catch (const JudgeParseError&) {
        }
        try {
            auto sheet = parse_panas_scores(text);
            sheet.validate();
        } catch (const JudgeParseError&) {
        }
        try {
            parse_technique_selection(text);
        } catch (const JudgeParseError&) {
        }
    }
}

TEST_CASE("parse of format block is the identity") {
    CtrsScore score{4, 6, 5, 4, 4, 5};
    CHECK(parse_ctrs_scores(format_ctrs_block(score)) == score);

    PanasSheet sheet;
    for (int i = 0; i < 10; ++i) {
        sheet.positive_items[i] = 1 + (i * 3) % 5;
        sheet.negative_items[i] = 1 + (i * 2 + 1) % 5;
    }
    CHECK(parse_panas_scores(format_panas_block(sheet)) == sheet);
}
