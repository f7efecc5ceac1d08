#include <doctest.h>

#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cactus/dialogue.hpp"
#include "support/sample_transcript.hpp"

using namespace cactus;
using nlohmann::json;

TEST_CASE("minimal well-formed script parses") {
    auto d = parse_dialogue("Counselor: Hi\nClient: Hello");
    REQUIRE(d.utterances.size() == 2);
    CHECK(d.utterances[0].speaker == Speaker::Counselor);
    CHECK(d.utterances[0].text == "Hi");
    CHECK(d.utterances[1].speaker == Speaker::Client);
    CHECK(d.utterances[1].text == "Hello");
    CHECK(!d.truncated);
}

TEST_CASE("script with no prefixes raises NoPrefixFound") {
    CHECK_THROWS_WITH_AS(parse_dialogue("Hi there\nHow are you"),
                         doctest::Contains("no speaker prefix"),
                         DialogueParseError);
    try {
        parse_dialogue("Hi there\nHow are you");
    } catch (const DialogueParseError& e) {
        CHECK(e.kind() == DialogueParseError::Kind::NoPrefixFound);
    }
}

TEST_CASE("continuation lines merge into the previous utterance") {
    auto d = parse_dialogue("Counselor: A\nClient: B\nand more\nCounselor: C");
    REQUIRE(d.utterances.size() == 3);
    CHECK(d.utterances[1].text == "B and more");
    CHECK(d.utterances[2].text == "C");
}

TEST_CASE("consecutive same-speaker utterances violate alternation") {
    try {
        parse_dialogue("Counselor: A\nCounselor: B");
        FAIL("expected AlternationViolation");
    } catch (const DialogueParseError& e) {
        CHECK(e.kind() == DialogueParseError::Kind::AlternationViolation);
    }
}

TEST_CASE("prefix matching tolerates markup and case") {
    auto d = parse_dialogue("**Counselor:** Hi\n- CLIENT: Hello\ncounselor : Bye");
    REQUIRE(d.utterances.size() == 3);
    CHECK(d.utterances[0].text == "Hi");
    CHECK(d.utterances[1].text == "Hello");
    CHECK(d.utterances[2].speaker == Speaker::Counselor);

    // "**Counselor**: Hi" with markup closing before the colon.
    auto d2 = parse_dialogue("**Counselor**: Hi\nClient: Yo");
    CHECK(d2.utterances[0].text == "Hi");
}

TEST_CASE("preamble before the first prefix is skipped") {
    auto d = parse_dialogue("Here is the session you asked for:\n\nCounselor: Hi\nClient: Hey");
    CHECK(d.utterances.size() == 2);
}

TEST_CASE("empty utterance text is rejected") {
    try {
        parse_dialogue("Counselor:\nClient: hi");
        FAIL("expected EmptyUtterance");
    } catch (const DialogueParseError& e) {
        CHECK(e.kind() == DialogueParseError::Kind::EmptyUtterance);
    }
    CHECK_THROWS_AS(parse_dialogue("Counselor: hi\nClient:"), DialogueParseError);
    // A blank prefix line backed by a continuation line is fine.
    auto d = parse_dialogue("Counselor:\nwell, hello\nClient: hi");
    CHECK(d.utterances[0].text == "well, hello");
}

TEST_CASE("render emits one speaker line per utterance") {
    Dialogue d;
    d.utterances = {{Speaker::Counselor, "Hi"}, {Speaker::Client, "Hello"}};
    CHECK(render_dialogue(d) == "Counselor: Hi\nClient: Hello");

    Dialogue empty;
    CHECK(render_dialogue(empty).empty());
    CHECK_THROWS_AS(parse_dialogue(render_dialogue(empty)), DialogueParseError);
}

namespace {

Dialogue random_dialogue(std::mt19937& rng) {
    static const char* words[] = {"well",  "I",    "see",   "that's", "hard",
                                  "tell",  "me",   "more",  "about",  "it",
                                  "today", "work", "really", "*hm*",  "ok."};
    std::uniform_int_distribution<int> n_utts(1, 40);
    std::uniform_int_distribution<int> n_words(1, 12);
    std::uniform_int_distribution<size_t> word(0, std::size(words) - 1);
    std::uniform_int_distribution<int> first(0, 1);

    Dialogue d;
    Speaker speaker = first(rng) ? Speaker::Counselor : Speaker::Client;
    const int count = n_utts(rng);
    for (int i = 0; i < count; ++i) {
        std::ostringstream text;
        const int w = n_words(rng);
        for (int k = 0; k < w; ++k) {
            if (k) text << ' ';
            text << words[word(rng)];
        }
        d.utterances.push_back({speaker, text.str()});
        speaker = speaker == Speaker::Counselor ? Speaker::Client : Speaker::Counselor;
    }
    return d;
}

} // namespace

TEST_CASE("parse(render(d)) round-trips any valid dialogue") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        Dialogue d = random_dialogue(rng);
        Dialogue back = parse_dialogue(render_dialogue(d), d.id);
        CHECK(back == d);
    }
}

TEST_CASE("dialogue json serialization round-trips") {
    std::mt19937 rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        Dialogue d = random_dialogue(rng);
        d.id = "dlg" + std::to_string(trial);
        d.truncated = trial % 2 == 0;
        json j = d;
        CHECK(j.get<Dialogue>() == d);
    }
}

TEST_CASE("sample transcript from the corpus parses to 25 alternating utterances") {
    // Independent oracle: count raw speaker-prefix lines.
    size_t prefix_lines = 0;
    std::istringstream in(kSampleTranscript);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("Counselor:", 0) == 0 || line.rfind("Client:", 0) == 0)
            ++prefix_lines;
    }
    CHECK(prefix_lines == 25);

    auto d = parse_dialogue(kSampleTranscript, "sample");
    CHECK(utterance_count(d) == prefix_lines);
    CHECK(d.utterances.front().speaker == Speaker::Counselor);
    CHECK(d.utterances.front().text.rfind("Hi Margaret, I'm glad you decided", 0) ==
          0);
    CHECK_NOTHROW(check_alternation(d));
}

TEST_CASE("utterance_count basics") {
    Dialogue empty;
    CHECK(utterance_count(empty) == 0);
    auto d = parse_dialogue("Counselor: a\nClient: b");
    CHECK(utterance_count(d) == 2);
}

TEST_CASE("corpus-scale utterance arithmetic holds") {
    // 31,577 dialogues averaging ~31.5 utterances gives ~995,512 utterances,
    // which sits inside the 20-35 band used by the basic filter.
    const double avg = 995512.0 / 31577.0;
    CHECK(avg > 31.5);
    CHECK(avg < 31.6);
    CHECK(avg >= 20.0);
    CHECK(avg <= 35.0);
}
