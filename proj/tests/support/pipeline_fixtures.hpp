#pragma once

// Helpers for building seed corpora and mock fixture files that drive the
// pipeline commands end to end.

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "intake_fixture.hpp"

namespace fixtures {

using nlohmann::json;

// Valid alternating script, counselor first.
inline std::string make_script(int utterances, const std::string& tag = "s") {
    std::ostringstream out;
    for (int i = 0; i < utterances; ++i) {
        out << (i % 2 == 0 ? "Counselor: " : "Client: ") << tag << " line " << i
            << "\n";
    }
    return out.str();
}

inline std::string seed_line(const std::string& id) {
    json j = {{"id", id},
              {"persona", "I spend my evenings fixing bicycles."},
              {"thought", "Nobody ever wants my help; I must be useless."},
              {"patterns", {"overgeneralization", "labeling"}},
              {"reframed_thought",
               "One quiet week doesn't mean my help has no value."}};
    return j.dump();
}

inline void write_seeds(const std::string& path, int n) {
    std::ofstream out(path);
    for (int i = 0; i < n; ++i) out << seed_line("s" + std::to_string(i)) << "\n";
}

inline void append_fixture(std::ofstream& out, const std::string& scenario,
                           int index, const std::string& response) {
    json j = {{"scenario", scenario}, {"index", index}, {"response", response}};
    out << j.dump() << "\n";
}

// Fixture lines for every generate stage of seeds s0..s{n-1}.
inline void write_generate_fixtures(const std::string& path, int n,
                                    int script_utterances = 25,
                                    bool append = false) {
    std::ofstream out(path, append ? std::ios::app : std::ios::out);
    for (int i = 0; i < n; ++i) {
        const std::string id = "s" + std::to_string(i);
        append_fixture(out, "suitability:" + id, 0, "Suitable");
        append_fixture(out, "intake:" + id, 0, kMargaretIntakeForm);
        append_fixture(out, "techniques:" + id, 0,
                       "1. Behavior Experiment\n2. Reality Testing\n"
                       "3. Decatastrophizing");
        append_fixture(out, "plan:" + id, 0, kSevenStepPlan);
        append_fixture(out, "script:" + id, 0,
                       make_script(script_utterances, id));
    }
}

inline std::string ctrs_reply(int u, int i, int c, int g, int f, int s) {
    std::ostringstream out;
    out << "understanding: " << u << "\ninterpersonal_effectiveness: " << i
        << "\ncollaboration: " << c << "\nguided_discovery: " << g
        << "\nfocus: " << f << "\nstrategy: " << s << "\n";
    return out.str();
}

inline std::string panas_reply(int positive_rating, int negative_rating) {
    static const char* pos[] = {"interested", "excited", "strong", "enthusiastic",
                                "proud", "alert", "inspired", "determined",
                                "attentive", "active"};
    static const char* neg[] = {"distressed", "upset", "guilty", "scared",
                                "hostile", "irritable", "ashamed", "nervous",
                                "jittery", "afraid"};
    std::ostringstream out;
    for (const char* name : pos) out << name << ": " << positive_rating << "\n";
    for (const char* name : neg) out << name << ": " << negative_rating << "\n";
    return out.str();
}

inline std::string profile_line(const std::string& id) {
    json intake = json::object();
    const char* names[] = {"name", "age", "gender", "occupation", "education",
                           "marital_status", "family_details",
                           "presenting_problem", "reason_for_seeking",
                           "past_history", "occupational_functioning",
                           "interpersonal_relationships", "daily_life",
                           "social_support"};
    for (const char* n : names) intake[n] = "unknown";
    intake["name"] = "Profile " + id;
    intake["age"] = 54;
    intake["gender"] = "female";
    intake["occupation"] = "Researcher at a software lab";
    intake["presenting_problem"] = "Feels socially inadequate at work.";
    json j = {{"profile_id", id},
              {"intake_form", intake},
              {"opening_utterance", "Hi, I'm not sure where to start."}};
    return j.dump();
}

inline void write_profiles(const std::string& path, int n) {
    std::ofstream out(path);
    for (int i = 0; i < n; ++i) out << profile_line("p" + std::to_string(i)) << "\n";
}

} // namespace fixtures
