#include "sepsikit/corpus.hpp"

#include "sepsikit/errors.hpp"
#include "sepsikit/textfmt.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace sepsikit {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Split s) {
    switch (s) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::TestId: return "test-ID";
    case Split::TestOod: return "test-OOD";
    }
    return "";
}

std::optional<Split> split_from_string(std::string_view s) {
    for (Split v : {Split::Train, Split::Dev, Split::TestId, Split::TestOod})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

std::uint64_t Rng::next() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::size_t Rng::index(std::size_t n) {
    // modulo bias is < 2^-59 for our pool sizes
    return static_cast<std::size_t>(next() % n);
}

std::optional<Precondition> assign_precondition(Rng& rng, bool include_ood) {
    static constexpr std::array<PreconditionOrgan, 5> organs = {
        PreconditionOrgan::Lung, PreconditionOrgan::Kidney, PreconditionOrgan::Coagulation,
        PreconditionOrgan::Liver, PreconditionOrgan::Cardiovascular};
    const std::size_t outcome = rng.index(6);
    if (outcome == 5) return std::nullopt;
    const PreconditionOrgan organ = organs[outcome];

    std::vector<const PreconditionCode*> pool;
    for (const PreconditionCode& c : precondition_codes()) {
        if (c.organ != organ) continue;
        if (!include_ood && c.distribution == CodeDistribution::OutOfDistribution) continue;
        pool.push_back(&c);
    }
    const PreconditionCode* pick = pool[rng.index(pool.size())];
    return Precondition{std::string(pick->icd_code), pick->organ, pick->distribution};
}

WindowLabel label_window(const StayWindow& window, const SofaConfig& config,
                         const FeatureCatalog& catalog) {
    const WorstValues raw_current =
        worst_values(window.observation, window.demographics, {}, catalog);
    const WorstValues current = window.prior_worst
                                    ? merge_carry_forward(raw_current, *window.prior_worst)
                                    : raw_current;
    const WorstValues future = merge_carry_forward(
        worst_values(window.prediction, window.demographics, {}, catalog), raw_current);

    WindowLabel label;
    label.current = score_sofa(current, window.precondition, config);
    label.future = score_sofa(future, window.precondition, config);
    label.verdict =
        sepsis_label(label.current.total, label.future.total, window.suspected_infection);
    return label;
}

WindowLabel label_window_with_forecast(const StayWindow& window, const ForecastGrid& forecast,
                                       const SofaConfig& config, const FeatureCatalog& catalog) {
    const WorstValues raw_current =
        worst_values(window.observation, window.demographics, {}, catalog);
    const WorstValues current = window.prior_worst
                                    ? merge_carry_forward(raw_current, *window.prior_worst)
                                    : raw_current;
    const auto forecast_obs = grid_observations(forecast, window.stay);
    const WorstValues future =
        merge_carry_forward(worst_values(forecast_obs, window.demographics, {}, catalog), raw_current);

    WindowLabel label;
    label.current = score_sofa(current, window.precondition, config);
    label.future = score_sofa(future, window.precondition, config);
    label.verdict =
        sepsis_label(label.current.total, label.future.total, window.suspected_infection);
    return label;
}

namespace {

// Forecasted SOFA-relevant series rendered like the observed measurements.
std::string verbalize_forecast_block(const ForecastGrid& grid, const FeatureCatalog& catalog) {
    std::string out = "Here are the forecasted measurements: ";
    bool first = true;
    for (std::size_t h = 0; h < ForecastGrid::kHours; ++h) {
        for (FeatureId f = 0; f < grid.features; ++f) {
            if (!grid.has(h, f) || !catalog.at(f).sofa_relevant) continue;
            if (!first) out += ", ";
            first = false;
            out += catalog.at(f).name;
            out += " at time ";
            out += textfmt::time_point(static_cast<double>(h) + 0.5);
            out += ": ";
            out += textfmt::value(grid.at(h, f));
        }
    }
    return out;
}

std::string augment_prompt(const std::string& prompt, const std::string& forecast_block) {
    // the forecast block joins the prompt right before the question block
    const std::string anchor = "\n\nNow answer the following question:";
    const auto pos = prompt.find(anchor);
    if (pos == std::string::npos) return prompt + "\n" + forecast_block;
    std::string out = prompt;
    out.insert(pos, "\n" + forecast_block);
    return out;
}

const ForecastGrid& external_grid_for(const CorpusOptions& options, const std::string& stay,
                                      int day) {
    if (!options.external_forecasts)
        throw ContractError("external forecast source selected but no forecasts provided");
    auto it = options.external_forecasts->find({stay, day});
    if (it == options.external_forecasts->end())
        throw ContractError("no external forecast for stay '" + stay + "' day " +
                            std::to_string(day));
    return it->second;
}

} // namespace

std::vector<CorpusRecord> build_corpus(std::span<const StayWindow> windows,
                                       const CorpusOptions& options, const FeatureCatalog& catalog) {
    if (options.splits.total() > windows.size()) {
        std::ostringstream msg;
        msg << "split sizes (" << options.splits.total() << ") exceed available windows ("
            << windows.size() << ")";
        throw ContractError(msg.str());
    }

    std::vector<std::size_t> order(windows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(options.seed);
    rng.shuffle(order);

    const SplitSizes& sizes = options.splits;
    auto split_of = [&](std::size_t rank) {
        if (rank < sizes.train) return Split::Train;
        if (rank < sizes.train + sizes.dev) return Split::Dev;
        if (rank < sizes.train + sizes.dev + sizes.test_id) return Split::TestId;
        return Split::TestOod;
    };

    std::vector<CorpusRecord> records;
    records.reserve(sizes.total());
    for (std::size_t rank = 0; rank < sizes.total(); ++rank) {
        StayWindow window = windows[order[rank]];
        const Split split = split_of(rank);

        if (options.pool != PreconditionPool::None) {
            const bool include_ood =
                options.pool == PreconditionPool::IdOod && split == Split::TestOod;
            window.precondition = assign_precondition(rng, include_ood);
        }

        CorpusRecord record;
        record.stay = window.stay;
        record.day = window.day;
        record.split = split;
        record.precondition = window.precondition;
        record.truth = label_window(window, options.sofa, catalog);

        record.prompt = verbalize_prompt(window, catalog);
        if (options.forecast_source == ForecastSource::Persistence) {
            const ForecastGrid grid = persistence_forecast(window.observation, catalog);
            record.prompt = augment_prompt(record.prompt, verbalize_forecast_block(grid, catalog));
        } else if (options.forecast_source == ForecastSource::External) {
            const ForecastGrid& grid = external_grid_for(options, window.stay, window.day);
            record.prompt = augment_prompt(record.prompt, verbalize_forecast_block(grid, catalog));
        }

        record.gold_answer =
            verbalize_chain(record.truth.current, record.truth.future, record.truth.verdict);
        records.push_back(std::move(record));
    }

    std::sort(records.begin(), records.end(), [](const CorpusRecord& a, const CorpusRecord& b) {
        if (a.split != b.split) return static_cast<int>(a.split) < static_cast<int>(b.split);
        if (a.stay != b.stay) return a.stay < b.stay;
        return a.day < b.day;
    });
    return records;
}

namespace {

ordered_json inputs_to_json(const WorstValues& w) {
    ordered_json j = ordered_json::object();
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) j[key] = *v;
    };
    put("gcs_eye", w.gcs_eye);
    put("gcs_motor", w.gcs_motor);
    put("gcs_verbal", w.gcs_verbal);
    put("map", w.map_min);
    put("dopamine", w.dopamine_max);
    put("dobutamine", w.dobutamine_max);
    put("epinephrine", w.epinephrine_max);
    put("norepinephrine", w.norepinephrine_max);
    put("pao2", w.pao2_min);
    put("fio2", w.fio2_min);
    if (w.mech_vent) j["mech_vent"] = *w.mech_vent;
    put("platelets", w.platelets_min);
    put("bilirubin", w.bilirubin_max);
    put("creatinine", w.creatinine_max);
    put("urine", w.urine_total);
    put("weight", w.weight_kg);
    return j;
}

WorstValues inputs_from_json(const ordered_json& j) {
    WorstValues w;
    auto get = [&](const char* key, std::optional<double>& slot) {
        if (j.contains(key)) slot = j.at(key).get<double>();
    };
    get("gcs_eye", w.gcs_eye);
    get("gcs_motor", w.gcs_motor);
    get("gcs_verbal", w.gcs_verbal);
    get("map", w.map_min);
    get("dopamine", w.dopamine_max);
    get("dobutamine", w.dobutamine_max);
    get("epinephrine", w.epinephrine_max);
    get("norepinephrine", w.norepinephrine_max);
    get("pao2", w.pao2_min);
    get("fio2", w.fio2_min);
    if (j.contains("mech_vent")) w.mech_vent = j.at("mech_vent").get<bool>();
    get("platelets", w.platelets_min);
    get("bilirubin", w.bilirubin_max);
    get("creatinine", w.creatinine_max);
    get("urine", w.urine_total);
    get("weight", w.weight_kg);
    return w;
}

ordered_json snapshot_to_json(const SofaSnapshot& s) {
    ordered_json scores = ordered_json::object();
    scores["cns"] = s.cns;
    scores["cardio"] = s.cardio;
    scores["resp"] = s.resp;
    scores["coag"] = s.coag;
    scores["liver"] = s.liver;
    scores["renal"] = s.renal;
    scores["total"] = s.total;
    ordered_json j = ordered_json::object();
    j["scores"] = std::move(scores);
    j["excluded"] = s.excluded ? ordered_json(std::string(to_string(*s.excluded))) : ordered_json();
    j["inputs"] = inputs_to_json(s.inputs);
    return j;
}

SofaSnapshot snapshot_from_json(const ordered_json& j) {
    SofaSnapshot s;
    const auto& scores = j.at("scores");
    s.cns = scores.at("cns").get<int>();
    s.cardio = scores.at("cardio").get<int>();
    s.resp = scores.at("resp").get<int>();
    s.coag = scores.at("coag").get<int>();
    s.liver = scores.at("liver").get<int>();
    s.renal = scores.at("renal").get<int>();
    s.total = scores.at("total").get<int>();
    if (j.contains("excluded") && !j.at("excluded").is_null())
        s.excluded = organ_from_string(j.at("excluded").get<std::string>());
    s.inputs = inputs_from_json(j.at("inputs"));
    return s;
}

ordered_json verdict_to_json(const SepsisVerdict& v) {
    ordered_json j = ordered_json::object();
    j["sofa_diff"] = v.sofa_diff;
    j["suspected_infection"] = v.suspected_infection;
    j["septic"] = v.septic;
    j["delta"] = v.delta;
    return j;
}

SepsisVerdict verdict_from_json(const ordered_json& j) {
    SepsisVerdict v;
    v.sofa_diff = j.at("sofa_diff").get<bool>();
    v.suspected_infection = j.at("suspected_infection").get<bool>();
    v.septic = j.at("septic").get<bool>();
    v.delta = j.at("delta").get<int>();
    return v;
}

ordered_json label_to_json_obj(const WindowLabel& label) {
    ordered_json j = ordered_json::object();
    j["current"] = snapshot_to_json(label.current);
    j["future"] = snapshot_to_json(label.future);
    j["verdict"] = verdict_to_json(label.verdict);
    return j;
}

WindowLabel label_from_json(const ordered_json& j) {
    WindowLabel label;
    label.current = snapshot_from_json(j.at("current"));
    label.future = snapshot_from_json(j.at("future"));
    label.verdict = verdict_from_json(j.at("verdict"));
    return label;
}

} // namespace

std::string label_to_json(const WindowLabel& label) {
    return label_to_json_obj(label).dump();
}

void write_corpus(std::ostream& out, std::span<const CorpusRecord> records) {
    for (const CorpusRecord& r : records) {
        ordered_json j = ordered_json::object();
        j["stay"] = r.stay;
        j["day"] = r.day;
        j["split"] = std::string(to_string(r.split));
        j["prompt"] = r.prompt;
        j["gold_answer"] = r.gold_answer;
        if (r.precondition) {
            ordered_json p = ordered_json::object();
            p["icd_code"] = r.precondition->icd_code;
            p["organ"] = std::string(to_string(r.precondition->organ));
            p["distribution"] = std::string(to_string(r.precondition->distribution));
            j["precondition"] = std::move(p);
        } else {
            j["precondition"] = nullptr;
        }
        j["ground_truth"] = label_to_json_obj(r.truth);
        out << j.dump() << '\n';
    }
}

std::vector<CorpusRecord> read_corpus(std::istream& in) {
    std::vector<CorpusRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw InputError("corpus line " + std::to_string(line_no) + ": " + e.what());
        }
        try {
            CorpusRecord r;
            r.stay = j.at("stay").get<std::string>();
            r.day = j.at("day").get<int>();
            auto split = split_from_string(j.at("split").get<std::string>());
            if (!split)
                throw InputError("corpus line " + std::to_string(line_no) + ": unknown split");
            r.split = *split;
            r.prompt = j.at("prompt").get<std::string>();
            r.gold_answer = j.at("gold_answer").get<std::string>();
            if (j.contains("precondition") && !j.at("precondition").is_null()) {
                const auto& p = j.at("precondition");
                auto parsed = precondition_from_code(p.at("icd_code").get<std::string>());
                if (!parsed)
                    throw InputError("corpus line " + std::to_string(line_no) +
                                     ": unknown ICD-10 code");
                r.precondition = std::move(parsed);
            }
            r.truth = label_from_json(j.at("ground_truth"));
            records.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw InputError("corpus line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

} // namespace sepsikit
