#include "sepsikit/commands.hpp"

#include "sepsikit/errors.hpp"
#include "sepsikit/textfmt.hpp"
#include "sepsikit/version.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sepsikit {

using ordered_json = nlohmann::ordered_json;

namespace {

std::ifstream open_input(const std::string& path, const char* what) {
    if (path.empty()) throw InputError(std::string(what) + " path not set");
    std::ifstream in(path);
    if (!in) throw InputError(std::string("cannot open ") + what + " file: " + path);
    return in;
}

std::ofstream open_output(const std::string& path, const char* what) {
    if (path.empty()) throw InputError(std::string(what) + " path not set");
    std::ofstream out(path);
    if (!out) throw InputError(std::string("cannot write ") + what + " file: " + path);
    return out;
}

std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::optional<double> stated_value(const InferenceChain& chain, std::string_view key) {
    if (key == "diff") {
        const ChainNode* node = chain.find(NodeKind::Diff, Tense::Future);
        return node ? node->conclusion : std::optional<double>{};
    }
    Tense tense;
    std::string_view name;
    if (key.starts_with("current/")) {
        tense = Tense::Current;
        name = key.substr(8);
    } else if (key.starts_with("future/")) {
        tense = Tense::Future;
        name = key.substr(7);
    } else {
        return std::nullopt;
    }
    if (name == "total") {
        const ChainNode* node = chain.find(NodeKind::Total, tense);
        return node ? node->conclusion : std::optional<double>{};
    }
    if (auto organ = organ_from_string(name)) {
        const ChainNode* node = chain.find(NodeKind::OrganScore, tense, organ);
        return node ? node->conclusion : std::optional<double>{};
    }
    struct PremiseHome {
        const char* name;
        Organ organ;
    };
    static constexpr PremiseHome homes[] = {
        {"gcs_eye", Organ::Cns},         {"gcs_motor", Organ::Cns},
        {"gcs_verbal", Organ::Cns},      {"map", Organ::Cardio},
        {"dopamine", Organ::Cardio},     {"dobutamine", Organ::Cardio},
        {"epinephrine", Organ::Cardio},  {"norepinephrine", Organ::Cardio},
        {"weight", Organ::Cardio},       {"pao2", Organ::Resp},
        {"fio2", Organ::Resp},           {"pao2_fio2", Organ::Resp},
        {"platelets", Organ::Coag},      {"bilirubin", Organ::Liver},
        {"urine", Organ::Renal},         {"creatinine", Organ::Renal},
    };
    for (const PremiseHome& home : homes) {
        if (name != home.name) continue;
        const ChainNode* node = chain.find(NodeKind::OrganScore, tense, home.organ);
        return node ? node->premise(name) : std::optional<double>{};
    }
    return std::nullopt;
}

std::optional<double> truth_value(const WindowLabel& truth, std::string_view key) {
    if (key == "diff") return static_cast<double>(truth.verdict.delta);
    const SofaSnapshot* snapshot = nullptr;
    std::string_view name;
    if (key.starts_with("current/")) {
        snapshot = &truth.current;
        name = key.substr(8);
    } else if (key.starts_with("future/")) {
        snapshot = &truth.future;
        name = key.substr(7);
    } else {
        return std::nullopt;
    }
    if (name == "total") return static_cast<double>(snapshot->total);
    if (auto organ = organ_from_string(name)) return static_cast<double>(snapshot->score(*organ));
    const WorstValues& w = snapshot->inputs;
    if (name == "gcs_eye") return w.gcs_eye;
    if (name == "gcs_motor") return w.gcs_motor;
    if (name == "gcs_verbal") return w.gcs_verbal;
    if (name == "map") return w.map_min;
    if (name == "dopamine") return w.dopamine_max;
    if (name == "dobutamine") return w.dobutamine_max;
    if (name == "epinephrine") return w.epinephrine_max;
    if (name == "norepinephrine") return w.norepinephrine_max;
    if (name == "weight") return w.weight_kg;
    if (name == "pao2") return w.pao2_min;
    if (name == "fio2") return w.fio2_min;
    if (name == "pao2_fio2") {
        if (w.pao2_min && w.fio2_min && *w.fio2_min > 0.0)
            return textfmt::round3(horowitz(*w.pao2_min, *w.fio2_min));
        return std::nullopt;
    }
    if (name == "platelets") return w.platelets_min;
    if (name == "bilirubin") return w.bilirubin_max;
    if (name == "urine") return w.urine_total;
    if (name == "creatinine") return w.creatinine_max;
    return std::nullopt;
}

ChainContext context_for(const CorpusRecord& record) {
    ChainContext ctx;
    ctx.suspected_infection = record.truth.verdict.suspected_infection;
    if (record.precondition) ctx.excluded = excluded_organ(record.precondition->organ);
    ctx.mech_vent_current = record.truth.current.inputs.mech_vent;
    ctx.mech_vent_future = record.truth.future.inputs.mech_vent;
    return ctx;
}

class TruthIndex {
public:
    explicit TruthIndex(std::span<const CorpusRecord> records) {
        for (const CorpusRecord& r : records) {
            by_key_.emplace(std::make_pair(r.stay, r.day), &r);
            by_stay_[r.stay].push_back(&r);
        }
    }

    const CorpusRecord& lookup(const std::string& stay, std::optional<int> day) const {
        if (day) {
            auto it = by_key_.find({stay, *day});
            if (it == by_key_.end())
                throw ContractError("no ground-truth record for stay '" + stay + "' day " +
                                    std::to_string(*day));
            return *it->second;
        }
        auto it = by_stay_.find(stay);
        if (it == by_stay_.end())
            throw ContractError("no ground-truth record for stay '" + stay + "'");
        if (it->second.size() > 1)
            throw ContractError("stay '" + stay +
                                "' has several records; model outputs must carry a day field");
        return *it->second.front();
    }

private:
    std::map<std::pair<std::string, int>, const CorpusRecord*> by_key_;
    std::map<std::string, std::vector<const CorpusRecord*>> by_stay_;
};

ordered_json parse_jsonl_line(const std::string& line, std::size_t line_no, const char* what) {
    try {
        return ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string(what) + " line " + std::to_string(line_no) + ": " + e.what());
    }
}

} // namespace

std::vector<StayWindow> load_windows(const RunConfig& config, const FeatureCatalog& catalog) {
    auto obs_in = open_input(config.observations_path, "observations");
    const std::vector<Observation> observations = parse_observations(obs_in, catalog);
    auto demo_in = open_input(config.demographics_path, "demographics");
    const std::vector<StayInfo> stays = parse_demographics(demo_in);

    std::map<std::string, const StayInfo*> stay_info;
    for (const StayInfo& s : stays) stay_info[s.stay] = &s;

    auto groups = group_by_stay(observations);

    std::vector<CohortStay> cohort;
    for (const auto& [stay, series] : groups) {
        auto it = stay_info.find(stay);
        if (it == stay_info.end()) continue; // no demographics, cannot qualify
        double duration = 0.0;
        for (const Observation& obs : series) duration = std::max(duration, obs.time_h);
        cohort.push_back(CohortStay{stay, it->second->demographics, duration});
    }
    const std::vector<std::string> kept = filter_cohort(cohort);

    std::vector<StayWindow> windows;
    for (const std::string& stay : kept) {
        const StayInfo& info = *stay_info.at(stay);
        auto stay_windows =
            slide_windows(groups.at(stay), info.demographics, info.suspected_infection, catalog);
        for (StayWindow& w : stay_windows) windows.push_back(std::move(w));
    }
    return windows;
}

std::vector<ModelOutput> read_model_outputs(std::istream& in) {
    std::vector<ModelOutput> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json j = parse_jsonl_line(line, line_no, "model outputs");
        try {
            ModelOutput record;
            record.stay = j.at("stay").get<std::string>();
            if (j.contains("day") && !j.at("day").is_null()) record.day = j.at("day").get<int>();
            record.generated_text = j.at("generated_text").get<std::string>();
            out.push_back(std::move(record));
        } catch (const nlohmann::json::exception& e) {
            throw InputError("model outputs line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::vector<ForcedCompletion> read_forced_completions(std::istream& in) {
    std::vector<ForcedCompletion> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json j = parse_jsonl_line(line, line_no, "forced completions");
        try {
            ForcedCompletion record;
            record.stay = j.at("stay").get<std::string>();
            if (j.contains("day") && !j.at("day").is_null()) record.day = j.at("day").get<int>();
            record.target = j.at("target").get<std::string>();
            record.completion = j.at("completion").get<std::string>();
            out.push_back(std::move(record));
        } catch (const nlohmann::json::exception& e) {
            throw InputError("forced completions line " + std::to_string(line_no) + ": " +
                             e.what());
        }
    }
    return out;
}

ForecastBundle read_forecast_bundle(std::istream& in, const FeatureCatalog& catalog) {
    ForecastBundle bundle;
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw InputError("empty forecast file");

    if (lines.front().rfind("# stay=", 0) == 0) {
        // dense blocks
        std::size_t i = 0;
        while (i < lines.size()) {
            const std::string& header = lines[i];
            if (header.rfind("# stay=", 0) != 0)
                throw InputError("forecast block header expected at line " + std::to_string(i + 1));
            const std::size_t day_at = header.find(" day=");
            if (day_at == std::string::npos)
                throw InputError("forecast block header missing day= at line " +
                                 std::to_string(i + 1));
            const std::string stay = header.substr(7, day_at - 7);
            auto day = textfmt::parse_number(std::string_view(header).substr(day_at + 5));
            if (stay.empty() || !day)
                throw InputError("malformed forecast block header at line " + std::to_string(i + 1));
            ++i;
            if (i + ForecastGrid::kHours > lines.size() + 1 &&
                lines.size() - i < ForecastGrid::kHours)
                throw ContractError("forecast block for stay '" + stay + "' is truncated");
            std::ostringstream block;
            for (std::size_t row = 0; row < ForecastGrid::kHours; ++row) {
                if (i >= lines.size() || lines[i].rfind("# stay=", 0) == 0)
                    throw ContractError("forecast block for stay '" + stay + "' is truncated");
                block << lines[i++] << '\n';
            }
            std::istringstream block_in(block.str());
            bundle[{stay, static_cast<int>(*day)}] = import_external_forecast(block_in, catalog);
        }
        return bundle;
    }

    // line format: stay,day,hour,feature,value with optional header
    std::map<std::pair<std::string, int>, std::ostringstream> per_window;
    std::size_t start = 0;
    {
        std::istringstream probe(lines.front());
        std::string first_field;
        std::getline(probe, first_field, ',');
        if (first_field == "stay") start = 1;
    }
    for (std::size_t i = start; i < lines.size(); ++i) {
        const std::string& record = lines[i];
        const std::size_t c1 = record.find(',');
        const std::size_t c2 = c1 == std::string::npos ? c1 : record.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw InputError("malformed forecast record at line " + std::to_string(i + 1) +
                             ": expected stay,day,hour,feature,value");
        const std::string stay = record.substr(0, c1);
        auto day = textfmt::parse_number(std::string_view(record).substr(c1 + 1, c2 - c1 - 1));
        if (stay.empty() || !day || *day != std::floor(*day))
            throw InputError("malformed forecast record at line " + std::to_string(i + 1));
        per_window[{stay, static_cast<int>(*day)}] << record.substr(c2 + 1) << '\n';
    }
    for (auto& [key, text] : per_window) {
        std::istringstream window_in(text.str());
        bundle[key] = import_external_forecast(window_in, catalog);
    }
    return bundle;
}

void write_forecast_bundle(std::ostream& out, const ForecastBundle& bundle,
                           const FeatureCatalog& catalog) {
    out << "stay,day,hour,feature,value\n";
    out.precision(17);
    for (const auto& [key, grid] : bundle) {
        for (std::size_t h = 0; h < ForecastGrid::kHours; ++h)
            for (FeatureId f = 0; f < grid.features; ++f)
                if (grid.has(h, f))
                    out << key.first << ',' << key.second << ',' << h << ','
                        << catalog.at(f).name << ',' << grid.at(h, f) << '\n';
    }
}

std::vector<ModelOutput> simulate_baseline(std::span<const CorpusRecord> truth,
                                           std::span<const StayWindow> windows,
                                           ForecastSource source, const ForecastBundle* grids,
                                           const SofaConfig& config, const FeatureCatalog& catalog) {
    std::map<std::pair<std::string, int>, const StayWindow*> window_index;
    for (const StayWindow& w : windows) window_index[{w.stay, w.day}] = &w;

    std::vector<ModelOutput> outputs;
    outputs.reserve(truth.size());
    for (const CorpusRecord& record : truth) {
        auto it = window_index.find({record.stay, record.day});
        if (it == window_index.end())
            throw ContractError("no window for corpus record stay '" + record.stay + "' day " +
                                std::to_string(record.day));
        StayWindow window = *it->second;
        window.precondition = record.precondition;
        window.suspected_infection = record.truth.verdict.suspected_infection;

        WindowLabel predicted;
        if (source == ForecastSource::Persistence) {
            predicted = label_window_with_forecast(
                window, persistence_forecast(window.observation, catalog), config, catalog);
        } else if (source == ForecastSource::External) {
            if (!grids) throw ContractError("external baseline requires a forecast file");
            auto git = grids->find({record.stay, record.day});
            if (git == grids->end())
                throw ContractError("no external forecast for stay '" + record.stay + "' day " +
                                    std::to_string(record.day));
            predicted = label_window_with_forecast(window, git->second, config, catalog);
        } else {
            predicted = label_window(window, config, catalog);
        }

        ModelOutput out;
        out.stay = record.stay;
        out.day = record.day;
        out.generated_text =
            verbalize_chain(predicted.current, predicted.future, predicted.verdict);
        outputs.push_back(std::move(out));
    }
    return outputs;
}

EvalReport evaluate(std::span<const CorpusRecord> truth, std::span<const ModelOutput> outputs,
                    std::span<const ForcedCompletion> forced, const RunConfig& config) {
    if (truth.empty()) throw InputError("ground-truth corpus is empty");
    if (outputs.empty() && forced.empty()) throw InputError("no model outputs to evaluate");

    TruthIndex index(truth);
    EvalReport report;
    report.version = kVersion;
    report.generated_at = timestamp_utc();
    report.margin = config.margin;
    report.mv_gating = config.mv_gating;
    report.histogram_variable = config.histogram_variable;

    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

    const SofaConfig sofa_config = config.sofa();
    for (const ModelOutput& output : outputs) {
        const CorpusRecord& record = index.lookup(output.stay, output.day);
        const InferenceChain chain = parse_chain(output.generated_text);
        ++report.records;
        if (chain.complete) ++report.complete_chains;

        const ChainContext ctx = context_for(record);
        for (const auto& [key, ok] : check_derivation(chain, ctx, sofa_config, config.margin))
            report.derivation[key].add(ok);
        for (const auto& [key, ok] : check_values(chain, record.truth, config.margin))
            report.value[key].add(ok);

        const ChainNode* sepsis = chain.find(NodeKind::Sepsis, Tense::Future);
        const bool predicted = sepsis && sepsis->verdict && *sepsis->verdict;
        if (predicted && record.truth.verdict.septic) ++tp;
        else if (predicted) ++fp;
        else if (record.truth.verdict.septic) ++fn;
        else ++tn;

        const auto truth_v = truth_value(record.truth, report.histogram_variable);
        const auto stated_v = stated_value(chain, report.histogram_variable);
        if (truth_v && stated_v) report.histogram.add(*stated_v, *truth_v);
    }

    if (tp + fp + fn + tn > 0)
        report.sepsis_contingency = contingency_from_counts(tp, fp, fn, tn);

    for (const ForcedCompletion& completion : forced) {
        const CorpusRecord& record = index.lookup(completion.stay, completion.day);
        const auto target = parse_forced_target(completion.target);
        if (!target)
            throw InputError("unknown forced target '" + completion.target + "'");
        const std::string prefix =
            forced_prefix(record.gold_answer, target->kind, target->tense, target->organ);
        const InferenceChain chain = parse_chain(prefix + completion.completion);
        const auto derivation =
            check_derivation(chain, context_for(record), sofa_config, config.margin);
        const std::string key = forced_target_key(*target);
        report.forced[key].add(derivation.at(key));
    }
    return report;
}

void cmd_label(const RunConfig& config, std::ostream& log) {
    const auto windows = load_windows(config);
    auto out = open_output(config.output_path, "labels");

    std::size_t septic = 0;
    const SofaConfig sofa_config = config.sofa();
    for (const StayWindow& window : windows) {
        const WindowLabel label = label_window(window, sofa_config);
        if (label.verdict.septic) ++septic;
        ordered_json j = ordered_json::object();
        j["stay"] = window.stay;
        j["day"] = window.day;
        ordered_json body = ordered_json::parse(label_to_json(label));
        for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
        out << j.dump() << '\n';
    }
    const double rate =
        windows.empty() ? 0.0 : 100.0 * static_cast<double>(septic) / static_cast<double>(windows.size());
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", rate);
    log << "labeled " << windows.size() << " windows, septic " << septic << " (positive rate "
        << buf << "%)\n";
}

void cmd_corpus(const RunConfig& config, std::ostream& log) {
    const auto windows = load_windows(config);

    CorpusOptions options;
    options.seed = config.seed;
    options.splits = config.splits;
    options.pool = config.pool;
    options.forecast_source = config.forecast_source;
    options.sofa = config.sofa();

    ForecastBundle grids;
    if (config.forecast_source == ForecastSource::External) {
        auto in = open_input(config.forecasts_path, "forecasts");
        grids = read_forecast_bundle(in);
        options.external_forecasts = &grids;
    }

    const auto records = build_corpus(windows, options);
    auto out = open_output(config.output_path, "corpus");
    write_corpus(out, records);

    // standardization statistics from the training split's observation days
    if (!config.stats_out_path.empty()) {
        std::map<std::pair<std::string, int>, const StayWindow*> window_index;
        for (const StayWindow& w : windows) window_index[{w.stay, w.day}] = &w;
        std::vector<Observation> train_obs;
        for (const CorpusRecord& r : records) {
            if (r.split != Split::Train) continue;
            const StayWindow* w = window_index.at({r.stay, r.day});
            train_obs.insert(train_obs.end(), w->observation.begin(), w->observation.end());
        }
        auto stats_out = open_output(config.stats_out_path, "stats");
        stats_out << serialize_stats(compute_stats(train_obs));
    }

    std::size_t per_split[4] = {0, 0, 0, 0};
    for (const CorpusRecord& r : records) ++per_split[static_cast<int>(r.split)];
    log << "corpus: " << records.size() << " records (train " << per_split[0] << ", dev "
        << per_split[1] << ", test-ID " << per_split[2] << ", test-OOD " << per_split[3]
        << "), seed " << config.seed << '\n';
}

void cmd_forecast(const RunConfig& config, std::ostream& log) {
    const FeatureCatalog& catalog = FeatureCatalog::builtin();
    ForecastBundle bundle;

    if (config.forecast_mode == "persistence") {
        const auto windows = load_windows(config);
        for (const StayWindow& window : windows)
            bundle[{window.stay, window.day}] = persistence_forecast(window.observation, catalog);
        log << "persistence forecasts for " << bundle.size() << " windows\n";
    } else if (config.forecast_mode == "external") {
        auto in = open_input(config.forecasts_path, "forecasts");
        bundle = read_forecast_bundle(in, catalog);
        log << "validated " << bundle.size() << " external forecast windows\n";
    } else {
        throw InputError("unknown forecast mode '" + config.forecast_mode + "'");
    }

    if (!config.output_path.empty()) {
        auto out = open_output(config.output_path, "forecast");
        write_forecast_bundle(out, bundle, catalog);
    }

    if (config.score_forecasts) {
        const auto windows = load_windows(config);
        FeatureStats stats;
        if (!config.stats_in_path.empty()) {
            auto stats_in = open_input(config.stats_in_path, "stats");
            stats = parse_stats(stats_in, catalog);
        } else {
            std::vector<Observation> all;
            for (const StayWindow& w : windows)
                all.insert(all.end(), w.observation.begin(), w.observation.end());
            stats = compute_stats(all, catalog);
        }
        double sum = 0.0;
        std::size_t n = 0;
        for (const StayWindow& window : windows) {
            auto it = bundle.find({window.stay, window.day});
            if (it == bundle.end()) continue;
            // grid the real prediction day as the truth side
            std::vector<Observation> shifted = window.prediction;
            for (Observation& obs : shifted) obs.time_h -= 24.0;
            const DenseGrid truth = densify(shifted, catalog, stats);
            sum += masked_mse(it->second, truth, stats);
            ++n;
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", n ? sum / static_cast<double>(n) : 0.0);
        log << "masked MSE over " << n << " windows: " << buf << '\n';
    }
}

void cmd_eval(const RunConfig& config, std::ostream& log) {
    auto truth_in = open_input(config.truth_path, "ground truth");
    const auto truth = read_corpus(truth_in);

    std::vector<ModelOutput> outputs;
    if (!config.baseline.empty()) {
        const auto windows = load_windows(config);
        ForecastBundle grids;
        const ForecastBundle* grids_ptr = nullptr;
        ForecastSource source;
        if (config.baseline == "persistence") {
            source = ForecastSource::Persistence;
        } else if (config.baseline == "external") {
            source = ForecastSource::External;
            auto in = open_input(config.forecasts_path, "forecasts");
            grids = read_forecast_bundle(in);
            grids_ptr = &grids;
        } else {
            throw InputError("unknown baseline '" + config.baseline + "'");
        }
        outputs = simulate_baseline(truth, windows, source, grids_ptr, config.sofa());
    } else {
        auto outputs_in = open_input(config.outputs_path, "model outputs");
        outputs = read_model_outputs(outputs_in);
        if (outputs.empty()) throw InputError("model outputs file is empty");
    }

    std::vector<ForcedCompletion> forced;
    if (!config.forced_path.empty()) {
        auto forced_in = open_input(config.forced_path, "forced completions");
        forced = read_forced_completions(forced_in);
    }

    EvalReport report = evaluate(truth, outputs, forced, config);
    report.config["truth"] = config.truth_path;
    report.config["outputs"] = config.baseline.empty() ? config.outputs_path
                                                       : "baseline:" + config.baseline;
    if (!config.forced_path.empty()) report.config["forced"] = config.forced_path;

    auto out = open_output(config.output_path, "report");
    out << report.to_json() << '\n';
    if (!config.histogram_csv_path.empty()) {
        auto csv = open_output(config.histogram_csv_path, "histogram CSV");
        csv << report.histogram.to_csv();
    }
    log << report.to_text();
}

void cmd_report(const RunConfig& config, std::ostream& log) {
    if (config.show_catalog) {
        log << FeatureCatalog::builtin().reference_listing();
        if (config.report_path.empty()) return;
    }
    auto in = open_input(config.report_path, "report");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const EvalReport report = EvalReport::from_json(buffer.str());
    if (!config.histogram_csv_path.empty()) {
        auto csv = open_output(config.histogram_csv_path, "histogram CSV");
        csv << report.histogram.to_csv();
    }
    log << report.to_text();
}

} // namespace sepsikit
