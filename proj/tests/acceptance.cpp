// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exits nonzero when any fails.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "cactus/commands.hpp"
#include "cactus/eval.hpp"
#include "cactus/filter.hpp"
#include "cactus/jsonl.hpp"
#include "cactus/prompts.hpp"
#include "cactus/stats.hpp"
#include "support/pipeline_fixtures.hpp"
#include "support/stats_oracles.hpp"

using namespace cactus;
namespace fs = std::filesystem;

namespace {

struct Checker {
    int violations = 0;
    std::string first_failure;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        ++violations;
        if (first_failure.empty()) first_failure = what;
    }
};

fs::path workspace() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "cactus_acceptance";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

cli::RunConfig base_config(const fs::path& dir, const std::string& fixtures) {
    cli::RunConfig cfg;
    cfg.out_dir = (dir / "out").string();
    cfg.fixtures_path = fixtures;
    cfg.seeds_path = (dir / "seeds.jsonl").string();
    cfg.concurrency = 8;
    cfg.retry.base_delay = std::chrono::milliseconds(1);
    return cfg;
}

// --------------------------------------------------------------------------
// 1. Filtering arithmetic at corpus scale
// --------------------------------------------------------------------------

void criterion_filtering(Checker& check) {
    const auto t0 = std::chrono::steady_clock::now();
    fs::path dir = workspace() / "filtering";
    fs::create_directories(dir);
    auto cfg = base_config(dir, (dir / "fixtures.jsonl").string());
    fs::create_directories(cfg.out_dir);

    constexpr int kTotal = 36584;
    constexpr int kShort = 700, kLong = 400, kMalformed = 232;  // 1,332 invalid
    constexpr int kLowScore = 3675;
    constexpr int kValid = kTotal - kShort - kLong - kMalformed;

    {
        std::ofstream raw(fs::path(cfg.out_dir) / "dialogues_raw.jsonl");
        std::ofstream fixture_out(dir / "fixtures.jsonl");
        int valid_seen = 0;
        for (int i = 0; i < kTotal; ++i) {
            const std::string id = "d" + std::to_string(i);
            std::string script;
            if (i < kShort) {
                script = fixtures::make_script(12, id);
            } else if (i < kShort + kLong) {
                script = fixtures::make_script(40, id);
            } else if (i < kShort + kLong + kMalformed) {
                script = "a transcript that lost its speaker prefixes";
            } else {
                script = fixtures::make_script(20 + (i % 16), id);
                const bool low = valid_seen < kLowScore;
                ++valid_seen;
                fixtures::append_fixture(
                    fixture_out, "ctrs:" + id, 0,
                    low ? fixtures::ctrs_reply(4, 4, 4, 4, 4, 4)
                        : fixtures::ctrs_reply(5, 6, 5, 5, 5, 6));
            }
            nlohmann::json record{
                {"id", id},
                {"payload", {{"attitude", "positive"}, {"script", script}}},
                {"meta", nlohmann::json::object()}};
            raw << record.dump() << "\n";
        }
        check.require(valid_seen == kValid, "fixture corpus arithmetic");
    }

    std::ostringstream out;
    const int code = cli::cmd_filter(cfg, out);
    check.require(code == 0, "cmd_filter exit code");

    const std::string report = out.str();
    check.require(report.find("(96.36%)") != std::string::npos,
                  "basic retention 96.36% in report: " + report);
    check.require(report.find("(86.31%)") != std::string::npos,
                  "cumulative retention 86.31% in report");
    check.require(report.find("31577") != std::string::npos,
                  "final count 31,577 in report");

    auto stats = filter::filter_report({36584, 35252, 31577});
    check.require(std::fabs(*stats.basic_retention_pct - 96.36) <= 0.01,
                  "basic pct within 0.01");
    check.require(std::fabs(*stats.cumulative_pct - 86.31) <= 0.01,
                  "cumulative pct within 0.01");

    size_t kept = 0;
    jsonl::for_each((fs::path(cfg.out_dir) / "cactus.jsonl").string(),
                    [&](size_t, const nlohmann::json&) { ++kept; });
    check.require(kept == 31577,
                  "kept bundles = " + std::to_string(kept) + ", want 31577");

    const auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
        std::chrono::steady_clock::now() - t0);
    check.require(elapsed.count() < 60,
                  "runtime " + std::to_string(elapsed.count()) + "s >= 60s");
}

// --------------------------------------------------------------------------
// 2. Boundary semantics of the CTRS threshold
// --------------------------------------------------------------------------

void criterion_boundary(Checker& check) {
    std::mt19937 rng(20240811);
    std::uniform_int_distribution<int> score(0, 6);
    for (int trial = 0; trial < 5000; ++trial) {
        CtrsScore s{score(rng), score(rng), score(rng),
                    score(rng), score(rng), score(rng)};
        const bool keep = filter::ctrs_keep(s);
        check.require(keep == (filter::ctrs_mean(s) >= 5.0), "keep <=> mean >= 5.0");
        check.require(keep == (s.sum() >= 30), "keep <=> integer sum >= 30");
        auto vals = s.values();
        for (int i = 0; i < 6; ++i) {
            if (vals[i] == 6) continue;
            auto bumped = vals;
            ++bumped[i];
            const bool kept_after = filter::ctrs_keep(CtrsScore{
                bumped[0], bumped[1], bumped[2], bumped[3], bumped[4], bumped[5]});
            check.require(!keep || kept_after, "monotonicity");
        }
    }
}

// --------------------------------------------------------------------------
// 3. Test-set shape
// --------------------------------------------------------------------------

void criterion_testset(Checker& check) {
    std::vector<eval::Profile> profiles;
    for (int i = 0; i < 150; ++i) {
        eval::Profile p;
        p.profile_id = "profile" + std::to_string(i);
        p.opening_utterance = "Hello.";
        for (auto* section : p.intake_form.sections()) *section = "unknown";
        profiles.push_back(std::move(p));
    }
    auto instances = eval::build_testset(profiles);
    check.require(instances.size() == 450,
                  "450 instances, got " + std::to_string(instances.size()));
    std::map<Attitude, int> per_attitude;
    std::set<std::string> unique_ids;
    for (const auto& inst : instances) {
        ++per_attitude[inst.attitude];
        unique_ids.insert(inst.instance_id());
    }
    for (auto a : kAllAttitudes)
        check.require(per_attitude[a] == 150, "150 per attitude");
    check.require(unique_ids.size() == 450, "(profile, attitude) unique");
}

// --------------------------------------------------------------------------
// 4. Session termination over randomized mocks
// --------------------------------------------------------------------------

void criterion_sessions(Checker& check) {
    constexpr int kSessions = 1000;
    constexpr int kCap = 50;

    llm::MockBackend mock;
    std::mt19937 rng(424242);
    std::uniform_int_distribution<int> end_at(1, 60);  // > 49 never fires

    std::vector<EvalInstance> instances(kSessions);
    std::vector<int> end_positions(kSessions);
    for (int i = 0; i < kSessions; ++i) {
        EvalInstance inst;
        inst.profile_id = "r" + std::to_string(i);
        inst.attitude = kAllAttitudes[i % 3];
        inst.opening_utterance = "Opening " + std::to_string(i);
        for (auto* section : inst.intake_form.sections()) *section = "unknown";
        instances[i] = inst;

        const int k = end_positions[i] = end_at(rng);
        const std::string base = "session:sut|" + inst.instance_id();
        const int counselor_calls = std::min(k, kCap);
        for (int c = 0; c < counselor_calls; ++c)
            mock.add_fixture({base + ":counselor", c, std::nullopt, "reply"});
        const int client_calls = std::min(k, kCap - 1);
        for (int c = 0; c + 1 < client_calls; ++c)
            mock.add_fixture({base + ":client", c, std::nullopt, "client text"});
        if (k <= kCap - 1)
            mock.add_fixture({base + ":client", k - 1, std::nullopt, "[END]"});
        else if (client_calls > 0)
            mock.add_fixture(
                {base + ":client", client_calls - 1, std::nullopt, "client text"});
    }

    eval::SessionParams params;
    params.cap_exchanges = kCap;
    params.counselor_model = "sut";
    params.retry.base_delay = std::chrono::milliseconds(1);

    std::vector<std::optional<eval::Session>> sessions(kSessions);
    llm::run_tasks(kSessions, 8, [&](size_t i) {
        try {
            sessions[i] = eval::run_session(mock, mock, instances[i], params);
        } catch (...) {
        }
    });

    for (int i = 0; i < kSessions; ++i) {
        if (!sessions[i]) {
            check.require(false, "session " + std::to_string(i) + " did not run");
            continue;
        }
        const auto& s = *sessions[i];
        const bool expect_cap = end_positions[i] > kCap - 1;
        check.require(s.exchanges <= kCap, "terminated within cap");
        if (expect_cap) {
            check.require(s.ended_by == eval::EndReason::Cap, "ended_by cap");
            check.require(s.dialogue.truncated, "cap implies truncated");
            check.require(utterance_count(s.dialogue) == 2 * kCap,
                          "cap session utterance count");
        } else {
            check.require(s.ended_by == eval::EndReason::EndToken,
                          "ended_by end token");
            check.require(!s.dialogue.truncated, "token end not truncated");
            check.require(static_cast<int>(utterance_count(s.dialogue)) ==
                              2 * end_positions[i],
                          "token session utterance count");
        }
        check.require(s.dialogue.utterances.front().speaker == Speaker::Client,
                      "client opens");
        check.require(s.dialogue.utterances.front().text ==
                          instances[i].opening_utterance,
                      "opening utterance preserved");
        try {
            check_alternation(s.dialogue);
        } catch (const Error&) {
            check.require(false, "alternation");
        }
    }
}

// --------------------------------------------------------------------------
// 5. Statistics oracles
// --------------------------------------------------------------------------

void criterion_statistics(Checker& check) {
    std::mt19937 rng(5150);
    std::uniform_int_distribution<size_t> len(2, 10);
    std::uniform_int_distribution<int> val(0, 9);

    int done = 0;
    while (done < 500) {
        const size_t n = len(rng);
        std::vector<double> x(n), y(n);
        for (auto& v : x) v = val(rng);
        for (auto& v : y) v = val(rng);
        const bool cx = std::all_of(x.begin(), x.end(),
                                    [&](double v) { return v == x[0]; });
        const bool cy = std::all_of(y.begin(), y.end(),
                                    [&](double v) { return v == y[0]; });
        if (cx || cy) continue;
        ++done;
        check.require(std::fabs(stats::pearson(x, y) -
                                oracles::pearson_direct(x, y)) < 1e-9,
                      "pearson vs direct formula");
        check.require(std::fabs(stats::spearman(x, y) -
                                oracles::spearman_via_ranks(x, y)) < 1e-9,
                      "spearman vs rank oracle");
        check.require(std::fabs(stats::kendall_tau(x, y) -
                                oracles::kendall_pairs(x, y)) < 1e-9,
                      "kendall vs pair oracle");
    }

    // Exhaustive tau-b: every pair of {0,1}-valued vectors for n <= 8, plus
    // all of {0,1,2}^4 against itself.
    for (size_t n = 2; n <= 8; ++n) {
        const uint32_t limit = 1u << n;
        for (uint32_t a = 0; a < limit; ++a) {
            if (a == 0 || a == limit - 1) continue;  // constant in x
            std::vector<double> x(n);
            for (size_t i = 0; i < n; ++i) x[i] = (a >> i) & 1u;
            for (uint32_t b = 0; b < limit; ++b) {
                if (b == 0 || b == limit - 1) continue;
                std::vector<double> y(n);
                for (size_t i = 0; i < n; ++i) y[i] = (b >> i) & 1u;
                check.require(std::fabs(stats::kendall_tau(x, y) -
                                        oracles::kendall_pairs(x, y)) < 1e-9,
                              "exhaustive binary tau n=" + std::to_string(n));
            }
        }
    }
    {
        std::vector<std::vector<double>> vectors;
        for (int code = 0; code < 81; ++code) {
            std::vector<double> v(4);
            int c = code;
            for (int i = 0; i < 4; ++i) {
                v[i] = c % 3;
                c /= 3;
            }
            if (v[0] == v[1] && v[1] == v[2] && v[2] == v[3]) continue;
            vectors.push_back(std::move(v));
        }
        for (const auto& x : vectors)
            for (const auto& y : vectors)
                check.require(std::fabs(stats::kendall_tau(x, y) -
                                        oracles::kendall_pairs(x, y)) < 1e-9,
                              "exhaustive ternary tau n=4");
    }

    for (long n = 1; n <= 30; ++n) {
        for (long a = 0; a <= n; ++a) {
            check.require(std::fabs(stats::sign_test_p(a, n - a) -
                                    oracles::sign_test_exact(a, n - a)) < 1e-9,
                          "sign test vs exact pmf");
        }
    }
    check.require(std::fabs(stats::sign_test_p(60, 40) - 0.0569) < 1e-4,
                  "sign_test_p(60,40) = 0.0569 +- 1e-4");
}

// --------------------------------------------------------------------------
// 6. Aggregation fidelity
// --------------------------------------------------------------------------

void criterion_aggregation(Checker& check) {
    constexpr int kSessions = 100;
    const std::array<int, 6> sums = {442, 597, 481, 440, 411, 511};

    llm::MockBackend mock;
    std::vector<eval::Session> sessions(kSessions);
    for (int i = 0; i < kSessions; ++i) {
        eval::Session& s = sessions[i];
        s.counselor_label = "camel-llama3";
        s.instance.profile_id = "agg" + std::to_string(i);
        s.instance.attitude = Attitude::Positive;
        for (auto* section : s.instance.intake_form.sections()) *section = "unknown";
        s.dialogue.id = s.instance.instance_id();
        s.dialogue.utterances = {{Speaker::Client, "hello"},
                                 {Speaker::Counselor, "welcome"}};

        std::array<int, 6> vals{};
        for (int c = 0; c < 6; ++c)
            vals[c] = sums[c] / 100 + (i < sums[c] % 100 ? 1 : 0);
        const std::string key = "camel-llama3|" + s.instance.instance_id();
        mock.add_fixture({"ctrs:" + key, 0, std::nullopt,
                          fixtures::ctrs_reply(vals[0], vals[1], vals[2], vals[3],
                                               vals[4], vals[5])});
        // Positive deltas: 17 sessions +2, 83 sessions +1 (sum +117).
        // Negative: 49 sessions -1, 51 sessions 0 (sum -49).
        const int dpos = i < 17 ? 2 : 1;
        const int dneg = i < 49 ? -1 : 0;
        std::ostringstream pre, post;
        const auto& pos_names = panas_positive_item_names();
        const auto& neg_names = panas_negative_item_names();
        for (int k = 0; k < 10; ++k) pre << pos_names[k] << ": 3\n";
        for (int k = 0; k < 10; ++k) pre << neg_names[k] << ": 3\n";
        for (int k = 0; k < 10; ++k)
            post << pos_names[k] << ": " << (k < dpos ? 4 : 3) << "\n";
        for (int k = 0; k < 10; ++k)
            post << neg_names[k] << ": " << (k < -dneg ? 2 : 3) << "\n";
        mock.add_fixture({"panas_pre:" + key, 0, std::nullopt, pre.str()});
        mock.add_fixture({"panas_post:" + key, 0, std::nullopt, post.str()});
    }

    judging::JudgeParams params;
    params.retry.base_delay = std::chrono::milliseconds(1);
    std::vector<eval::ScoredSession> scored(kSessions);
    for (int i = 0; i < kSessions; ++i) {
        eval::ScoredSession& s = scored[i];
        s.instance_id = sessions[i].instance.instance_id();
        s.counselor_label = sessions[i].counselor_label;
        s.attitude = sessions[i].instance.attitude;
        s.ctrs = eval::evaluate_ctrs(mock, sessions[i], params);
        s.panas = eval::evaluate_panas(mock, sessions[i], params);
    }

    auto tables = eval::aggregate(scored);
    const std::string text = tables.render_text();
    check.require(text.find("4.42 | 5.97 | 4.81 | 4.40 | 4.11 | 5.11") !=
                      std::string::npos,
                  "CTRS row renders 4.42 | 5.97 | 4.81 | 4.40 | 4.11 | 5.11:\n" +
                      text);
    check.require(text.find("+1.17 / -0.49") != std::string::npos,
                  "positive-attitude deltas render +1.17 / -0.49:\n" + text);
}

// --------------------------------------------------------------------------
// 7. Determinism across full pipeline runs
// --------------------------------------------------------------------------

void criterion_determinism(Checker& check) {
    fs::path dir = workspace() / "determinism";
    fs::create_directories(dir);

    constexpr int kSeeds = 12;
    fixtures::write_seeds((dir / "seeds.jsonl").string(), kSeeds);
    fixtures::write_generate_fixtures((dir / "fixtures.jsonl").string(), kSeeds);
    {
        std::ofstream out(dir / "fixtures.jsonl", std::ios::app);
        for (int i = 0; i < kSeeds; ++i)
            fixtures::append_fixture(out, "ctrs:s" + std::to_string(i), 0,
                                     fixtures::ctrs_reply(5, 6, 5, 5, 5, 6));
        const char* attitudes[] = {"positive", "neutral", "negative"};
        for (int p = 0; p < 2; ++p) {
            for (const char* att : attitudes) {
                const std::string inst = "p" + std::to_string(p) + ":" + att;
                const std::string base = "session:camel|" + inst;
                for (int c = 0; c < 2; ++c)
                    fixtures::append_fixture(out, base + ":counselor", c, "go on");
                fixtures::append_fixture(out, base + ":client", 0, "okay");
                fixtures::append_fixture(out, base + ":client", 1, "[END]");
                fixtures::append_fixture(out, "ctrs:camel|" + inst, 0,
                                         fixtures::ctrs_reply(4, 5, 4, 4, 4, 5));
                fixtures::append_fixture(out, "panas_pre:camel|" + inst, 0,
                                         fixtures::panas_reply(2, 3));
                fixtures::append_fixture(out, "panas_post:camel|" + inst, 0,
                                         fixtures::panas_reply(3, 2));
            }
        }
    }
    fixtures::write_profiles((dir / "profiles.jsonl").string(), 2);

    auto run_all = [&](const std::string& out_dir) {
        auto cfg = base_config(dir, (dir / "fixtures.jsonl").string());
        cfg.out_dir = out_dir;
        std::ostringstream sink;
        if (cli::cmd_generate(cfg, cli::Stage::All, sink) != 0) return false;
        if (cli::cmd_filter(cfg, sink) != 0) return false;
        if (cli::cmd_eval(cfg, {"camel"}, (dir / "profiles.jsonl").string(),
                          sink) != 0)
            return false;
        return true;
    };

    check.require(run_all((dir / "run_a").string()), "first pipeline run");
    check.require(run_all((dir / "run_b").string()), "second pipeline run");

    const char* files[] = {"suitable.jsonl",  "intake.jsonl",
                           "techniques.jsonl", "plans.jsonl",
                           "dialogues_raw.jsonl", "dialogues_scored.jsonl",
                           "cactus.jsonl",    "quarantine.jsonl",
                           "sessions.jsonl",  "scores.jsonl",
                           "report.json"};
    for (const char* f : files) {
        const auto a = dir / "run_a" / f;
        const auto b = dir / "run_b" / f;
        check.require(fs::exists(a) == fs::exists(b),
                      std::string(f) + " existence differs");
        if (fs::exists(a))
            check.require(slurp(a) == slurp(b),
                          std::string(f) + " differs between runs");
    }
}

// --------------------------------------------------------------------------
// 8. Concurrency contract
// --------------------------------------------------------------------------

void criterion_concurrency(Checker& check) {
    llm::MockBackend mock;
    mock.set_latency(std::chrono::milliseconds(50));
    std::vector<llm::ChatRequest> requests;
    for (int i = 0; i < 100; ++i) {
        mock.add_fixture({"load" + std::to_string(i), 0, std::nullopt, "ok"});
        llm::ChatRequest req;
        req.model_id = "m";
        req.scenario = "load" + std::to_string(i);
        req.messages = {{llm::Role::User, "x"}};
        requests.push_back(std::move(req));
    }

    const auto t0 = std::chrono::steady_clock::now();
    auto results = llm::run_batch(mock, requests, 8);
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - t0);

    for (const auto& r : results) check.require(r.ok, "batch result ok");
    check.require(mock.max_in_flight() <= 8,
                  "max in flight " + std::to_string(mock.max_in_flight()));
    check.require(elapsed.count() < 1300,
                  "wall time " + std::to_string(elapsed.count()) + "ms >= 1.3s");
}

// --------------------------------------------------------------------------
// 9. Parser robustness over an adversarial corpus
// --------------------------------------------------------------------------

void criterion_parsers(Checker& check) {
    std::mt19937 rng(909);
    const char* display[] = {"Understanding", "Interpersonal Effectiveness",
                             "Collaboration", "Guided Discovery", "Focus",
                             "Strategy"};

    auto render_case = [&](const std::array<int, 6>& vals, int variant) {
        std::vector<int> order{0, 1, 2, 3, 4, 5};
        std::shuffle(order.begin(), order.end(), rng);
        std::ostringstream out;
        if (variant % 7 == 0) out << "Sure! Here is my detailed assessment.\n\n";
        if (variant % 5 == 0) out << "```\n";
        if (variant % 11 == 0) {
            out << "{";
            for (int k = 0; k < 6; ++k) {
                int c = order[k];
                std::string key(ctrs_criterion_names()[c]);
                out << (k ? ", " : "") << '"' << key << "\": " << vals[c];
            }
            out << "}\n";
        } else {
            for (int k = 0; k < 6; ++k) {
                int c = order[k];
                switch (variant % 4) {
                    case 0: out << display[c] << ": " << vals[c] << "\n"; break;
                    case 1:
                        out << "- **" << display[c] << "**: " << vals[c] << "/6\n";
                        break;
                    case 2:
                        out << k + 1 << ". " << ctrs_criterion_names()[c] << " = "
                            << vals[c] << "\n";
                        break;
                    case 3: {
                        std::string upper(display[c]);
                        for (auto& ch : upper) ch = std::toupper(ch);
                        out << upper << " - " << vals[c] << "\n";
                        break;
                    }
                }
            }
        }
        if (variant % 5 == 0) out << "```\n";
        if (variant % 3 == 0)
            out << "\nOverall the counselor held a steady, collaborative line.\n";
        return out.str();
    };

    std::uniform_int_distribution<int> score(0, 6);
    int parsed = 0, attempted = 0;
    for (int i = 0; i < 192; ++i) {
        std::array<int, 6> vals{};
        for (auto& v : vals) v = score(rng);
        const std::string text = render_case(vals, i);
        ++attempted;
        try {
            CtrsScore s = prompts::parse_ctrs_scores(text);
            s.validate();
            const auto got = s.values();
            bool exact = true;
            for (int c = 0; c < 6; ++c) exact = exact && got[c] == vals[c];
            check.require(exact, "parsed values match the rendered case:\n" + text);
            ++parsed;
        } catch (const prompts::JudgeParseError&) {
            // counted against the success rate below
        }
    }

    // Out-of-range and garbage cases must fail, never yielding a bad score.
    const std::string bad_cases[] = {
        render_case({4, 5, 7, 4, 4, 5}, 1),
        render_case({4, 5, 4, 4, 4, 9}, 2),
        render_case({0, 5, 4, 4, 4, 12}, 0),
        "Understanding: 4\nInterpersonal Effectiveness: 5\nCollaboration: -1\n"
        "Guided Discovery: 4\nFocus: 4\nStrategy: 5\n",
        "Understanding: 4\nCollaboration: 5\n",
        "The session went well overall, no scores to give.",
        "",
        "Understanding: high\nInterpersonal Effectiveness: good\n",
    };
    for (const auto& text : bad_cases) {
        ++attempted;
        try {
            CtrsScore s = prompts::parse_ctrs_scores(text);
            s.validate();  // if parse returned, values must still be in range
            check.require(false, "bad case unexpectedly accepted:\n" + text);
        } catch (const Error&) {
            // expected
        }
    }

    check.require(attempted == 200, "200-case corpus");
    check.require(parsed == 192,
                  "all well-formed cases parse (" + std::to_string(parsed) +
                      "/192)");
    check.require(parsed * 100 >= 95 * 200, ">= 95% success rate");
}

struct CriterionSpec {
    int id;
    const char* title;
    std::function<void(Checker&)> run;
};

} // namespace

int main() {
    const std::vector<CriterionSpec> criteria = {
        {1, "filtering arithmetic (96.36% / 86.31% / 31,577, < 60 s)",
         criterion_filtering},
        {2, "CTRS boundary semantics and monotonicity", criterion_boundary},
        {3, "test-set shape (150 profiles -> 450 instances)", criterion_testset},
        {4, "session termination over 1,000 randomized mocks", criterion_sessions},
        {5, "statistics match independent oracles", criterion_statistics},
        {6, "aggregation reproduces reference rows at 2 decimals",
         criterion_aggregation},
        {7, "byte-identical stage files across reruns", criterion_determinism},
        {8, "concurrency bound and batch wall time", criterion_concurrency},
        {9, "judge-output parser robustness (>= 95%, 0 out-of-range)",
         criterion_parsers},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Checker check;
        try {
            c.run(check);
        } catch (const std::exception& e) {
            check.require(false, std::string("exception: ") + e.what());
        }
        if (check.violations == 0) {
            std::printf("[PASS] criterion %d: %s\n", c.id, c.title);
        } else {
            ++failures;
            std::printf("[FAIL] criterion %d: %s (%d violations; first: %s)\n",
                        c.id, c.title, check.violations,
                        check.first_failure.c_str());
        }
    }
    if (failures == 0) {
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
    } else {
        std::printf("%d acceptance criteria failed\n", failures);
    }
    return failures == 0 ? 0 : 1;
}
