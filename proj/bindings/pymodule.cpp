#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cactus/dialogue.hpp"
#include "cactus/eval.hpp"
#include "cactus/filter.hpp"
#include "cactus/gateway.hpp"
#include "cactus/model.hpp"
#include "cactus/prompts.hpp"
#include "cactus/stats.hpp"
#include "cactus/synthesis.hpp"

namespace py = pybind11;
using namespace cactus;

namespace {

prompts::Bindings to_bindings(const py::dict& d) {
    prompts::Bindings b;
    for (auto item : d)
        b.emplace(py::cast<std::string>(item.first),
                  py::cast<std::string>(item.second));
    return b;
}

} // namespace

PYBIND11_MODULE(cactus_kit, m) {
    m.doc() = "CBT counseling dialogue synthesis and evaluation toolkit";

    py::register_exception<Error>(m, "CactusError");

    py::enum_<Speaker>(m, "Speaker")
        .value("Counselor", Speaker::Counselor)
        .value("Client", Speaker::Client);

    py::enum_<Attitude>(m, "Attitude")
        .value("Positive", Attitude::Positive)
        .value("Neutral", Attitude::Neutral)
        .value("Negative", Attitude::Negative);

    py::enum_<CbtTechnique>(m, "CbtTechnique")
        .value("EfficiencyEvaluation", CbtTechnique::EfficiencyEvaluation)
        .value("PieChartTechnique", CbtTechnique::PieChartTechnique)
        .value("AlternativePerspective", CbtTechnique::AlternativePerspective)
        .value("Decatastrophizing", CbtTechnique::Decatastrophizing)
        .value("ProsAndConsAnalysis", CbtTechnique::ProsAndConsAnalysis)
        .value("EvidenceBasedQuestioning", CbtTechnique::EvidenceBasedQuestioning)
        .value("RealityTesting", CbtTechnique::RealityTesting)
        .value("ContinuumTechnique", CbtTechnique::ContinuumTechnique)
        .value("ChangingRulesToWishes", CbtTechnique::ChangingRulesToWishes)
        .value("BehaviorExperiment", CbtTechnique::BehaviorExperiment)
        .value("ProblemSolvingSkillsTraining",
               CbtTechnique::ProblemSolvingSkillsTraining)
        .value("SystematicExposure", CbtTechnique::SystematicExposure);

    py::class_<Utterance>(m, "Utterance")
        .def(py::init<>())
        .def_readwrite("speaker", &Utterance::speaker)
        .def_readwrite("text", &Utterance::text)
        .def("__repr__", [](const Utterance& u) {
            return std::string(to_string(u.speaker)) + ": " + u.text;
        });

    py::class_<Dialogue>(m, "Dialogue")
        .def(py::init<>())
        .def_readwrite("id", &Dialogue::id)
        .def_readwrite("utterances", &Dialogue::utterances)
        .def_readwrite("truncated", &Dialogue::truncated)
        .def("__len__", [](const Dialogue& d) { return d.utterances.size(); });

    py::class_<CtrsScore>(m, "CtrsScore")
        .def(py::init<>())
        .def(py::init([](int u, int i, int c, int g, int f, int s) {
                 return CtrsScore{u, i, c, g, f, s};
             }),
             py::arg("understanding"), py::arg("interpersonal_effectiveness"),
             py::arg("collaboration"), py::arg("guided_discovery"),
             py::arg("focus"), py::arg("strategy"))
        .def_readwrite("understanding", &CtrsScore::understanding)
        .def_readwrite("interpersonal_effectiveness",
                       &CtrsScore::interpersonal_effectiveness)
        .def_readwrite("collaboration", &CtrsScore::collaboration)
        .def_readwrite("guided_discovery", &CtrsScore::guided_discovery)
        .def_readwrite("focus", &CtrsScore::focus)
        .def_readwrite("strategy", &CtrsScore::strategy)
        .def("values", &CtrsScore::values)
        .def("sum", &CtrsScore::sum);

    py::class_<PanasSheet>(m, "PanasSheet")
        .def(py::init<>())
        .def_readwrite("positive_items", &PanasSheet::positive_items)
        .def_readwrite("negative_items", &PanasSheet::negative_items)
        .def("positive_sum", &PanasSheet::positive_sum)
        .def("negative_sum", &PanasSheet::negative_sum);

    // Dialogue text handling
    m.def("parse_dialogue", &parse_dialogue, py::arg("script"), py::arg("id") = "");
    m.def("render_dialogue", &render_dialogue);
    m.def("utterance_count", &utterance_count);

    // Filtering
    m.def(
        "basic_filter_text",
        [](const std::string& script, int min_utterances, int max_utterances) {
            auto decision = filter::basic_filter_text(
                script, {min_utterances, max_utterances});
            return py::make_tuple(decision.keep,
                                  std::string(to_string(decision.reason)),
                                  decision.utterances);
        },
        py::arg("script"), py::arg("min_utterances") = 20,
        py::arg("max_utterances") = 35,
        "Returns (keep, drop_reason, utterance_count).");
    m.def("ctrs_mean", &filter::ctrs_mean);
    m.def("ctrs_keep", &filter::ctrs_keep, py::arg("score"),
          py::arg("threshold") = 5.0);

    // Judge output parsing
    m.def("parse_technique_selection", [](const std::string& text) {
        return prompts::parse_technique_selection(text);
    });
    m.def("parse_ctrs_scores",
          [](const std::string& text) { return prompts::parse_ctrs_scores(text); });
    m.def("parse_panas_scores",
          [](const std::string& text) { return prompts::parse_panas_scores(text); });
    m.def("format_ctrs_block", &prompts::format_ctrs_block);
    m.def("format_panas_block", &prompts::format_panas_block);

    // Templates
    py::enum_<prompts::TemplateId>(m, "TemplateId")
        .value("SuitabilityFilter", prompts::TemplateId::SuitabilityFilter)
        .value("IntakeForm", prompts::TemplateId::IntakeForm)
        .value("TechniqueSelection", prompts::TemplateId::TechniqueSelection)
        .value("PlanGeneration", prompts::TemplateId::PlanGeneration)
        .value("ScriptDialogue", prompts::TemplateId::ScriptDialogue)
        .value("AiClient", prompts::TemplateId::AiClient)
        .value("CtrsJudge", prompts::TemplateId::CtrsJudge)
        .value("PanasJudge", prompts::TemplateId::PanasJudge);
    m.def("render_template", [](prompts::TemplateId id, const py::dict& bindings) {
        return prompts::render_template(id, to_bindings(bindings));
    });

    // Statistics
    m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) {
        return stats::pearson(x, y);
    });
    m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) {
        return stats::spearman(x, y);
    });
    m.def("kendall_tau",
          [](const std::vector<double>& x, const std::vector<double>& y) {
              return stats::kendall_tau(x, y);
          });
    m.def("sign_test_p", &stats::sign_test_p, py::arg("a_wins"), py::arg("b_wins"));

    // Evaluator agreement and head-to-head judgments
    m.def(
        "evaluator_agreement",
        [](const eval::ScoredItems& expert, const eval::ScoredItems& other) {
            auto report = eval::evaluator_agreement(expert, other);
            py::dict out;
            auto tri = [](const eval::TriCorrelation& t) {
                py::dict d;
                d["r"] = t.r;
                d["rho"] = t.rho;
                d["tau"] = t.tau;
                return d;
            };
            out["general_counseling"] = tri(report.general);
            out["cbt_specific"] = tri(report.cbt);
            return out;
        },
        py::arg("expert"), py::arg("other"),
        "Correlates overall scores per skill group; items are (id, CtrsScore) "
        "pairs aligned by id.");
    m.def(
        "head_to_head",
        [](const std::vector<std::tuple<std::string, std::string, std::string>>&
               rows) {
            std::vector<eval::Judgment> judgments;
            for (const auto& [item_id, criterion, outcome] : rows) {
                auto o = eval::outcome_from_string(outcome);
                if (!o) throw Error("bad_outcome", "unknown outcome " + outcome);
                judgments.push_back({item_id, criterion, *o});
            }
            auto report = eval::head_to_head(judgments);
            py::list out;
            for (const auto& row : report.rows) {
                py::dict d;
                d["criterion"] = row.criterion;
                d["wins_a"] = row.wins_a;
                d["wins_b"] = row.wins_b;
                d["ties"] = row.ties;
                d["p_value"] = row.p_value ? py::cast(*row.p_value) : py::none();
                d["significant"] = row.significant;
                out.append(std::move(d));
            }
            return out;
        },
        py::arg("judgments"),
        "Win/tie/lose report per criterion from (item_id, criterion, outcome) "
        "triples; outcome is win_a, win_b or tie.");

    // Attitude assignment
    m.def(
        "assign_attitude",
        [](uint64_t seed, uint64_t index, double positive, double neutral,
           double negative) {
            return pipeline::assign_attitude(seed, index,
                                             {positive, neutral, negative});
        },
        py::arg("seed"), py::arg("index"), py::arg("positive") = 35.55,
        py::arg("neutral") = 34.47, py::arg("negative") = 29.98);

    // Scripted mock gateway
    py::class_<llm::MockBackend>(m, "MockBackend")
        .def(py::init<>())
        .def(py::init<const std::string&>(), py::arg("fixture_path"))
        .def("add_fixture",
             [](llm::MockBackend& self, const std::string& scenario, int index,
                const std::string& response) {
                 self.add_fixture({scenario, index, std::nullopt, response});
             })
        .def("total_calls", &llm::MockBackend::total_calls)
        .def(
            "complete",
            [](llm::MockBackend& self, const std::string& prompt,
               const std::string& scenario, const std::string& model_id,
               double temperature, int max_tokens) {
                llm::ChatRequest req;
                req.model_id = model_id;
                req.temperature = temperature;
                req.max_tokens = max_tokens;
                req.scenario = scenario;
                req.messages = {{llm::Role::User, prompt}};
                return llm::complete(self, req);
            },
            py::arg("prompt"), py::arg("scenario") = "", py::arg("model_id") = "mock",
            py::arg("temperature") = 0.0, py::arg("max_tokens") = 1024);
}
