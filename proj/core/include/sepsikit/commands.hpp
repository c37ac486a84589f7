#pragma once

#include "sepsikit/chain.hpp"
#include "sepsikit/corpus.hpp"
#include "sepsikit/metrics.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sepsikit {

struct RunConfig {
    std::string observations_path;
    std::string demographics_path;
    std::string forecasts_path;
    std::string outputs_path;
    std::string forced_path;
    std::string truth_path;
    std::string output_path;
    std::string stats_out_path;
    std::string stats_in_path;
    std::string report_path;
    std::string histogram_csv_path;
    std::string histogram_variable = "future/total";
    std::string forecast_mode = "persistence"; // forecast command: persistence | external
    std::string baseline;                      // eval command: "", persistence or external

    std::uint64_t seed = 0;
    double margin = 0.05;
    bool mv_gating = true;
    PreconditionPool pool = PreconditionPool::Id;
    ForecastSource forecast_source = ForecastSource::GroundTruth;
    SplitSizes splits;
    bool score_forecasts = false;
    bool show_catalog = false;

    SofaConfig sofa() const { return SofaConfig{mv_gating}; }
};

// Parse both input files, apply the cohort filters and cut stay windows.
std::vector<StayWindow> load_windows(const RunConfig& config,
                                     const FeatureCatalog& catalog = FeatureCatalog::builtin());

struct ModelOutput {
    std::string stay;
    std::optional<int> day;
    std::string generated_text;
};

struct ForcedCompletion {
    std::string stay;
    std::optional<int> day;
    std::string target;
    std::string completion;
};

std::vector<ModelOutput> read_model_outputs(std::istream& in);
std::vector<ForcedCompletion> read_forced_completions(std::istream& in);

using ForecastBundle = std::map<std::pair<std::string, int>, ForecastGrid>;

// Multi-window forecast file: `stay,day,hour,feature,value` records, or
// dense blocks of 24 x |catalog| rows introduced by `# stay=<id> day=<n>`.
ForecastBundle read_forecast_bundle(std::istream& in,
                                    const FeatureCatalog& catalog = FeatureCatalog::builtin());
void write_forecast_bundle(std::ostream& out, const ForecastBundle& bundle,
                           const FeatureCatalog& catalog = FeatureCatalog::builtin());

// Synthesize predicted chains by applying the rule system to forecasted
// values, under each record's own precondition and infection flag.
std::vector<ModelOutput> simulate_baseline(std::span<const CorpusRecord> truth,
                                           std::span<const StayWindow> windows,
                                           ForecastSource source, const ForecastBundle* grids,
                                           const SofaConfig& config,
                                           const FeatureCatalog& catalog = FeatureCatalog::builtin());

// Evaluation core: joins model outputs with truth records by (stay, day) and
// aggregates derivation, value, contingency and histogram results.
EvalReport evaluate(std::span<const CorpusRecord> truth, std::span<const ModelOutput> outputs,
                    std::span<const ForcedCompletion> forced, const RunConfig& config);

void cmd_label(const RunConfig& config, std::ostream& log);
void cmd_corpus(const RunConfig& config, std::ostream& log);
void cmd_forecast(const RunConfig& config, std::ostream& log);
void cmd_eval(const RunConfig& config, std::ostream& log);
void cmd_report(const RunConfig& config, std::ostream& log);

} // namespace sepsikit
