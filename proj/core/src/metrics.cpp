#include "sepsikit/metrics.hpp"

#include "sepsikit/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace sepsikit {

using ordered_json = nlohmann::ordered_json;

Contingency contingency_from_counts(std::size_t tp, std::size_t fp, std::size_t fn,
                                    std::size_t tn) {
    Contingency c;
    c.tp = tp;
    c.fp = fp;
    c.fn = fn;
    c.tn = tn;
    const std::size_t n = c.n();
    if (n == 0) throw InputError("contingency: empty input");
    c.accuracy = static_cast<double>(tp + tn) / static_cast<double>(n);
    if (tn + fp > 0) {
        c.specificity = static_cast<double>(tn) / static_cast<double>(tn + fp);
    } else {
        c.specificity_defined = false;
    }
    if (tp + fn > 0) {
        c.sensitivity = static_cast<double>(tp) / static_cast<double>(tp + fn);
    } else {
        c.sensitivity_defined = false;
    }
    if (2 * tp + fp + fn > 0) {
        c.f1 = 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    } else {
        c.f1_defined = false;
    }
    return c;
}

Contingency contingency(std::span<const bool> predictions, std::span<const bool> truths) {
    if (predictions.size() != truths.size())
        throw InputError("contingency: predictions and truths differ in length");
    if (predictions.empty()) throw InputError("contingency: empty input");
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] && truths[i]) ++tp;
        else if (predictions[i] && !truths[i]) ++fp;
        else if (!predictions[i] && truths[i]) ++fn;
        else ++tn;
    }
    return contingency_from_counts(tp, fp, fn, tn);
}

RatioHistogram::RatioHistogram() {
    counts.assign(static_cast<std::size_t>(std::lround((hi - lo) / bucket_width)), 0);
}

void RatioHistogram::add(double pred, double truth) {
    if (truth == 0.0) {
        ++skipped_zero_truth;
        return;
    }
    const double ratio = pred / truth;
    auto bucket = static_cast<long>(std::floor((ratio - lo) / bucket_width));
    bucket = std::clamp(bucket, 0L, static_cast<long>(counts.size()) - 1L);
    ++counts[static_cast<std::size_t>(bucket)];
    ++n;
}

std::string RatioHistogram::to_csv() const {
    std::ostringstream out;
    out << "ratio_lo,ratio_hi,count\n";
    char buf[64];
    for (std::size_t i = 0; i < counts.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f,", lo + bucket_width * static_cast<double>(i),
                      lo + bucket_width * static_cast<double>(i + 1));
        out << buf << counts[i] << '\n';
    }
    return out.str();
}

RatioHistogram margin_histogram(std::span<const std::pair<double, double>> pairs) {
    RatioHistogram h;
    for (const auto& [pred, truth] : pairs) h.add(pred, truth);
    return h;
}

namespace {

ordered_json cell_to_json(const RateCell& cell) {
    ordered_json j = ordered_json::object();
    j["correct"] = cell.correct;
    j["total"] = cell.total;
    j["rate"] = cell.rate() ? ordered_json(*cell.rate()) : ordered_json();
    return j;
}

RateCell cell_from_json(const ordered_json& j) {
    RateCell cell;
    cell.correct = j.at("correct").get<std::size_t>();
    cell.total = j.at("total").get<std::size_t>();
    return cell;
}

ordered_json cells_to_json(const std::map<std::string, RateCell>& cells) {
    ordered_json j = ordered_json::object();
    for (const auto& [key, cell] : cells) j[key] = cell_to_json(cell);
    return j;
}

std::map<std::string, RateCell> cells_from_json(const ordered_json& j) {
    std::map<std::string, RateCell> cells;
    for (auto it = j.begin(); it != j.end(); ++it) cells[it.key()] = cell_from_json(it.value());
    return cells;
}

ordered_json contingency_to_json(const Contingency& c) {
    ordered_json j = ordered_json::object();
    j["tp"] = c.tp;
    j["fp"] = c.fp;
    j["fn"] = c.fn;
    j["tn"] = c.tn;
    j["accuracy"] = c.accuracy;
    j["specificity"] = c.specificity;
    j["specificity_defined"] = c.specificity_defined;
    j["sensitivity"] = c.sensitivity;
    j["sensitivity_defined"] = c.sensitivity_defined;
    j["f1"] = c.f1;
    j["f1_defined"] = c.f1_defined;
    return j;
}

Contingency contingency_from_json(const ordered_json& j) {
    Contingency c = contingency_from_counts(j.at("tp").get<std::size_t>(),
                                            j.at("fp").get<std::size_t>(),
                                            j.at("fn").get<std::size_t>(),
                                            j.at("tn").get<std::size_t>());
    return c;
}

const char* kValueRows[] = {"gcs_eye",        "gcs_motor", "gcs_verbal", "map",
                            "dopamine",       "dobutamine", "epinephrine", "norepinephrine",
                            "weight",         "pao2_fio2", "pao2",       "fio2",
                            "platelets",      "bilirubin", "urine",      "creatinine",
                            "cns",            "cardio",    "resp",       "coag",
                            "liver",          "renal",     "total"};

const char* kScoreRows[] = {"cns", "cardio", "resp", "coag", "liver", "renal", "total"};

std::string fmt_rate(const RateCell& cell) {
    auto r = cell.rate();
    if (!r) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *r);
    return buf;
}

void print_rows(std::ostringstream& out, const std::map<std::string, RateCell>& cells,
                const std::map<std::string, RateCell>* forced, std::span<const char* const> rows) {
    for (const char* tense : {"current", "future"}) {
        for (const char* row : rows) {
            const std::string key = std::string(tense) + "/" + row;
            auto it = cells.find(key);
            if (it == cells.end() || it->second.total == 0) continue;
            out << "  " << tense << ' ' << row << ": " << fmt_rate(it->second);
            if (forced) {
                auto fit = forced->find(key);
                if (fit != forced->end() && fit->second.total > 0)
                    out << " (" << fmt_rate(fit->second) << ")";
            }
            out << "  [" << it->second.correct << "/" << it->second.total << "]\n";
        }
    }
    for (const char* row : {"diff", "sepsis"}) {
        auto it = cells.find(row);
        if (it == cells.end() || it->second.total == 0) continue;
        out << "  " << row << ": " << fmt_rate(it->second);
        if (forced) {
            auto fit = forced->find(row);
            if (fit != forced->end() && fit->second.total > 0)
                out << " (" << fmt_rate(fit->second) << ")";
        }
        out << "  [" << it->second.correct << "/" << it->second.total << "]\n";
    }
}

} // namespace

std::string EvalReport::to_json() const {
    ordered_json j = ordered_json::object();
    ordered_json meta = ordered_json::object();
    meta["version"] = version;
    meta["generated_at"] = generated_at;
    meta["margin"] = margin;
    meta["mv_gating"] = mv_gating;
    ordered_json cfg = ordered_json::object();
    for (const auto& [key, val] : config) cfg[key] = val;
    meta["config"] = std::move(cfg);
    j["metadata"] = std::move(meta);

    ordered_json counts = ordered_json::object();
    counts["records"] = records;
    counts["complete_chains"] = complete_chains;
    j["n"] = std::move(counts);

    j["derivation"] = cells_to_json(derivation);
    j["forced_derivation"] = forced.empty() ? ordered_json() : cells_to_json(forced);
    j["value"] = cells_to_json(value);
    j["contingency"] = sepsis_contingency ? contingency_to_json(*sepsis_contingency) : ordered_json();

    ordered_json hist = ordered_json::object();
    hist["variable"] = histogram_variable;
    hist["lo"] = histogram.lo;
    hist["hi"] = histogram.hi;
    hist["bucket_width"] = histogram.bucket_width;
    hist["counts"] = histogram.counts;
    hist["n"] = histogram.n;
    hist["skipped_zero_truth"] = histogram.skipped_zero_truth;
    ordered_json markers = ordered_json::object();
    markers["pct5"] = {RatioHistogram::kMargin5Lo, RatioHistogram::kMargin5Hi};
    markers["pct10"] = {RatioHistogram::kMargin10Lo, RatioHistogram::kMargin10Hi};
    hist["markers"] = std::move(markers);
    j["histogram"] = std::move(hist);
    return j.dump(2);
}

EvalReport EvalReport::from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("report parse: ") + e.what());
    }
    try {
        EvalReport r;
        const auto& meta = j.at("metadata");
        r.version = meta.at("version").get<std::string>();
        r.generated_at = meta.at("generated_at").get<std::string>();
        r.margin = meta.at("margin").get<double>();
        r.mv_gating = meta.at("mv_gating").get<bool>();
        for (auto it = meta.at("config").begin(); it != meta.at("config").end(); ++it)
            r.config[it.key()] = it.value().get<std::string>();
        r.records = j.at("n").at("records").get<std::size_t>();
        r.complete_chains = j.at("n").at("complete_chains").get<std::size_t>();
        r.derivation = cells_from_json(j.at("derivation"));
        if (!j.at("forced_derivation").is_null())
            r.forced = cells_from_json(j.at("forced_derivation"));
        r.value = cells_from_json(j.at("value"));
        if (!j.at("contingency").is_null())
            r.sepsis_contingency = contingency_from_json(j.at("contingency"));
        const auto& hist = j.at("histogram");
        r.histogram_variable = hist.at("variable").get<std::string>();
        r.histogram.lo = hist.at("lo").get<double>();
        r.histogram.hi = hist.at("hi").get<double>();
        r.histogram.bucket_width = hist.at("bucket_width").get<double>();
        r.histogram.counts = hist.at("counts").get<std::vector<std::size_t>>();
        r.histogram.n = hist.at("n").get<std::size_t>();
        r.histogram.skipped_zero_truth = hist.at("skipped_zero_truth").get<std::size_t>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("report parse: ") + e.what());
    }
}

std::string EvalReport::to_text() const {
    std::ostringstream out;
    out << "evaluation report (tool " << version << ", margin " << margin << ", MV gating "
        << (mv_gating ? "on" : "off") << ")\n";
    out << "records: " << records << ", complete chains: " << complete_chains << "\n\n";

    out << "derivation correctness";
    if (!forced.empty()) out << " (forced in brackets)";
    out << ":\n";
    print_rows(out, derivation, forced.empty() ? nullptr : &forced, kScoreRows);

    out << "\nvalue correctness:\n";
    print_rows(out, value, nullptr, kValueRows);

    if (sepsis_contingency) {
        const Contingency& c = *sepsis_contingency;
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "\nSEPSIS contingency: TP=%zu FP=%zu FN=%zu TN=%zu\n"
                      "  accuracy %.3f, specificity %.3f%s, sensitivity %.3f%s, F1 %.3f%s\n",
                      c.tp, c.fp, c.fn, c.tn, c.accuracy, c.specificity,
                      c.specificity_defined ? "" : " (undefined)", c.sensitivity,
                      c.sensitivity_defined ? "" : " (undefined)", c.f1,
                      c.f1_defined ? "" : " (undefined)");
        out << buf;
    }

    out << "\nratio histogram (" << histogram_variable << "): n=" << histogram.n
        << ", zero-truth skipped=" << histogram.skipped_zero_truth << '\n';
    out << "  5% interval [" << RatioHistogram::kMargin5Lo << ", " << RatioHistogram::kMargin5Hi
        << "], 10% interval [" << RatioHistogram::kMargin10Lo << ", "
        << RatioHistogram::kMargin10Hi << "]\n";
    return out.str();
}

} // namespace sepsikit
