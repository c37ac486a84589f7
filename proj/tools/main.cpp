#include "sepsikit/commands.hpp"
#include "sepsikit/errors.hpp"
#include "sepsikit/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

namespace {

using sepsikit::RunConfig;

struct EnvFlag {
    std::string subcommand;
    std::string flag;
    std::string env;
};

std::vector<EnvFlag> g_env_flags;

// Register a flag's environment variable; values are injected as command-line
// arguments before parsing, so precedence stays flags > env > config file.
void bind_env(const std::string& subcommand, const std::string& flag, const std::string& env) {
    g_env_flags.push_back({subcommand, flag, env});
}

void inject_env(std::vector<std::string>& args) {
    static const std::vector<std::string> subcommands = {"label", "corpus", "forecast", "eval",
                                                         "report"};
    std::string subcommand;
    for (const std::string& arg : args) {
        if (std::find(subcommands.begin(), subcommands.end(), arg) != subcommands.end()) {
            subcommand = arg;
            break;
        }
    }
    if (subcommand.empty()) return;
    for (const EnvFlag& binding : g_env_flags) {
        if (binding.subcommand != subcommand) continue;
        bool present = false;
        for (const std::string& arg : args) {
            if (arg == binding.flag || arg.rfind(binding.flag + "=", 0) == 0) {
                present = true;
                break;
            }
        }
        if (present) continue;
        const char* value = std::getenv(binding.env.c_str());
        if (!value || !*value) continue;
        args.push_back(binding.flag + "=" + value);
    }
}

void add_input_options(CLI::App* cmd, RunConfig& config) {
    cmd->add_option("--observations", config.observations_path,
                    "Observations file: feature,time,value,stay per line");
    cmd->add_option("--demographics", config.demographics_path,
                    "Demographics file: stay,age,gender,weight[,infection] per line");
    bind_env(cmd->get_name(), "--observations", "SEPSIKIT_OBSERVATIONS");
    bind_env(cmd->get_name(), "--demographics", "SEPSIKIT_DEMOGRAPHICS");
}

void add_mv_gating(CLI::App* cmd, RunConfig& config) {
    cmd->add_flag("--mv-gating,!--no-mv-gating", config.mv_gating,
                  "Require mechanical ventilation for respiratory scores 3/4 (default on)");
    bind_env(cmd->get_name(), "--mv-gating", "SEPSIKIT_MV_GATING");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sepsis-3 rule engine, inference-chain corpus generator and evaluator"};
    app.set_version_flag("--version", sepsikit::kVersion);
    app.set_config("--config")->envname("SEPSIKIT_CONFIG");
    app.require_subcommand(1);

    RunConfig config;
    std::string pool_name = "ID";
    std::string source_name = "ground-truth";
    std::vector<std::size_t> split_sizes;

    CLI::App* label = app.add_subcommand("label", "Apply the Sepsis-3 definition to stay windows");
    add_input_options(label, config);
    label->add_option("--output", config.output_path, "Labels output (JSONL)")->required();
    add_mv_gating(label, config);
    bind_env("label", "--output", "SEPSIKIT_OUTPUT");

    CLI::App* corpus =
        app.add_subcommand("corpus", "Generate a verbalized inference-chain corpus");
    add_input_options(corpus, config);
    corpus->add_option("--output", config.output_path, "Corpus output (JSONL)")->required();
    corpus->add_option("--seed", config.seed, "RNG seed (required)")->required();
    corpus->add_option("--splits", split_sizes,
                       "Record counts: train,dev,test-ID,test-OOD")
        ->delimiter(',')
        ->expected(4);
    corpus->add_option("--precondition-pool", pool_name,
                       "Precondition codes to draw from: none | ID | ID+OOD")
        ->check(CLI::IsMember({"none", "ID", "ID+OOD"}));
    corpus->add_option("--forecast-source", source_name,
                       "Prompt augmentation: ground-truth | persistence | external")
        ->check(CLI::IsMember({"ground-truth", "persistence", "external"}));
    corpus->add_option("--forecasts", config.forecasts_path,
                       "External forecast file (with --forecast-source external)");
    corpus->add_option("--stats-out", config.stats_out_path,
                       "Write training-split standardization statistics (CSV)");
    add_mv_gating(corpus, config);
    bind_env("corpus", "--output", "SEPSIKIT_OUTPUT");
    bind_env("corpus", "--seed", "SEPSIKIT_SEED");
    bind_env("corpus", "--splits", "SEPSIKIT_SPLITS");
    bind_env("corpus", "--precondition-pool", "SEPSIKIT_PRECONDITION_POOL");
    bind_env("corpus", "--forecast-source", "SEPSIKIT_FORECAST_SOURCE");
    bind_env("corpus", "--forecasts", "SEPSIKIT_FORECASTS");
    bind_env("corpus", "--stats-out", "SEPSIKIT_STATS_OUT");

    CLI::App* forecast = app.add_subcommand(
        "forecast", "Produce persistence forecasts or validate external ones");
    add_input_options(forecast, config);
    forecast->add_option("--mode", config.forecast_mode, "persistence | external")
        ->check(CLI::IsMember({"persistence", "external"}));
    forecast->add_option("--forecasts", config.forecasts_path,
                         "External forecast file to validate (mode external)");
    forecast->add_option("--output", config.output_path, "Normalized forecast output");
    forecast->add_flag("--score", config.score_forecasts,
                       "Report masked MSE against the real prediction days");
    forecast->add_option("--stats", config.stats_in_path,
                         "Standardization statistics for --score (CSV)");
    bind_env("forecast", "--mode", "SEPSIKIT_MODE");
    bind_env("forecast", "--forecasts", "SEPSIKIT_FORECASTS");
    bind_env("forecast", "--output", "SEPSIKIT_OUTPUT");
    bind_env("forecast", "--stats", "SEPSIKIT_STATS");

    CLI::App* eval = app.add_subcommand("eval", "Score model-generated inference chains");
    eval->add_option("--truth", config.truth_path, "Ground-truth corpus (JSONL)")->required();
    eval->add_option("--outputs", config.outputs_path,
                     "Model outputs (JSONL: stay, [day,] generated_text)");
    eval->add_option("--baseline", config.baseline,
                     "Evaluate a forecaster pipeline instead of an outputs file: "
                     "persistence | external")
        ->check(CLI::IsMember({"persistence", "external"}));
    add_input_options(eval, config);
    eval->add_option("--forecasts", config.forecasts_path,
                     "External forecast file (with --baseline external)");
    eval->add_option("--forced", config.forced_path,
                     "Forced completions (JSONL: stay, [day,] target, completion)");
    eval->add_option("--output", config.output_path, "Evaluation report (JSON)")->required();
    eval->add_option("--margin", config.margin, "Value-match ratio margin (default 0.05)")
        ->check(CLI::Range(1e-9, 0.999999));
    eval->add_option("--histogram-variable", config.histogram_variable,
                     "Variable for the ratio histogram (default future/total)");
    eval->add_option("--histogram-csv", config.histogram_csv_path,
                     "Also write the histogram buckets as CSV");
    add_mv_gating(eval, config);
    bind_env("eval", "--truth", "SEPSIKIT_TRUTH");
    bind_env("eval", "--outputs", "SEPSIKIT_OUTPUTS");
    bind_env("eval", "--baseline", "SEPSIKIT_BASELINE");
    bind_env("eval", "--forecasts", "SEPSIKIT_FORECASTS");
    bind_env("eval", "--forced", "SEPSIKIT_FORCED");
    bind_env("eval", "--output", "SEPSIKIT_OUTPUT");
    bind_env("eval", "--margin", "SEPSIKIT_MARGIN");
    bind_env("eval", "--histogram-variable", "SEPSIKIT_HISTOGRAM_VARIABLE");
    bind_env("eval", "--histogram-csv", "SEPSIKIT_HISTOGRAM_CSV");

    CLI::App* report = app.add_subcommand("report", "Render an evaluation report as text");
    report->add_option("--input", config.report_path, "Evaluation report (JSON)");
    report->add_option("--histogram-csv", config.histogram_csv_path,
                       "Write the histogram buckets as CSV");
    report->add_flag("--catalog", config.show_catalog, "Print the feature catalog listing");
    bind_env("report", "--input", "SEPSIKIT_REPORT");
    bind_env("report", "--histogram-csv", "SEPSIKIT_HISTOGRAM_CSV");

    std::vector<std::string> args(argv + 1, argv + argc);
    inject_env(args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (label->parsed()) {
            sepsikit::cmd_label(config, std::cout);
        } else if (corpus->parsed()) {
            if (split_sizes.size() == 4)
                config.splits = sepsikit::SplitSizes{split_sizes[0], split_sizes[1],
                                                     split_sizes[2], split_sizes[3]};
            else
                throw sepsikit::InputError("--splits train,dev,test-ID,test-OOD is required");
            if (pool_name == "none") config.pool = sepsikit::PreconditionPool::None;
            else if (pool_name == "ID") config.pool = sepsikit::PreconditionPool::Id;
            else config.pool = sepsikit::PreconditionPool::IdOod;
            if (source_name == "ground-truth")
                config.forecast_source = sepsikit::ForecastSource::GroundTruth;
            else if (source_name == "persistence")
                config.forecast_source = sepsikit::ForecastSource::Persistence;
            else config.forecast_source = sepsikit::ForecastSource::External;
            sepsikit::cmd_corpus(config, std::cout);
        } else if (forecast->parsed()) {
            sepsikit::cmd_forecast(config, std::cout);
        } else if (eval->parsed()) {
            if (config.outputs_path.empty() == config.baseline.empty())
                throw sepsikit::InputError("eval needs exactly one of --outputs or --baseline");
            sepsikit::cmd_eval(config, std::cout);
        } else if (report->parsed()) {
            if (config.report_path.empty() && !config.show_catalog)
                throw sepsikit::InputError("report needs --input or --catalog");
            sepsikit::cmd_report(config, std::cout);
        }
    } catch (const sepsikit::ContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const sepsikit::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
