#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cactus/eval.hpp"
#include "cactus/filter.hpp"
#include "cactus/gateway.hpp"
#include "cactus/synthesis.hpp"

namespace cactus::cli {

enum class Stage { All, Suitability, Intake, Techniques, Plan, Dialogue };

std::optional<Stage> stage_from_string(std::string_view name);

struct RunConfig {
    // run
    uint64_t seed = 42;
    int concurrency = 8;
    std::string out_dir = "out";

    // gateway
    llm::BackendKind backend_kind = llm::BackendKind::Mock;
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key_env = "CACTUS_API_KEY";
    std::string fixtures_path;
    double timeout_s = 60.0;
    llm::RetryPolicy retry;

    // model ids per role
    std::string generator_model = "gpt-4o";
    std::string filter_judge_model = "gpt-3.5-turbo";
    std::string eval_judge_model = "gpt-4o";
    std::string client_model = "gpt-3.5-turbo";
    std::string counselor_model = "gpt-3.5-turbo";

    // sampling
    double gen_temperature = 0.7;
    double judge_temperature = 0.0;
    int form_max_tokens = 1024;
    int script_max_tokens = 4096;

    // filter
    filter::FilterBounds bounds;
    double ctrs_threshold = 5.0;

    // eval
    int cap_exchanges = 50;

    // attitude weights (percent)
    pipeline::AttitudeWeights weights;

    // inputs
    std::string seeds_path = "seeds.jsonl";
    std::string prompts_dir;      // empty → built-in templates
    std::string exemplars_path;   // empty → built-in exemplars
    std::string occupations_path; // empty → built-in keyword table

    llm::BackendSpec backend_spec(const std::string& model_id) const;
    prompts::TemplateCatalog catalog() const;
    // Mock runs pin the stage-record timestamp so reruns are byte-identical.
    std::string timestamp() const;
    std::string path(const std::string& file) const;  // under out_dir
};

// Loads an INI-style config file (key = value lines grouped by [section])
// into the run configuration. Command-line flags override these values by
// being applied afterwards. Unknown keys raise Error("config").
void load_config_file(const std::string& path, RunConfig& cfg);

// Each command prints its report to `out` and returns a process exit code;
// per-record failures keep the code at 0, fatal errors set it nonzero.
int cmd_generate(const RunConfig& cfg, Stage stage, std::ostream& out);
int cmd_filter(const RunConfig& cfg, std::ostream& out);
int cmd_eval(const RunConfig& cfg, const std::vector<std::string>& counselor_models,
             const std::string& testset_path, std::ostream& out);
int cmd_stats(const RunConfig& cfg, const std::string& bundles_path,
              std::ostream& out);
int cmd_compare(const RunConfig& cfg, const std::string& judgments_path,
                std::ostream& out);

} // namespace cactus::cli
