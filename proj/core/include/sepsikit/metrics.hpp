#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sepsikit {

struct RateCell {
    std::size_t correct = 0;
    std::size_t total = 0;

    void add(bool ok) {
        ++total;
        if (ok) ++correct;
    }
    std::optional<double> rate() const {
        if (total == 0) return std::nullopt;
        return static_cast<double>(correct) / static_cast<double>(total);
    }
};

struct Contingency {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    double accuracy = 0.0, specificity = 0.0, sensitivity = 0.0, f1 = 0.0;
    // a zero denominator reports the metric as 0 with the flag cleared
    bool specificity_defined = true, sensitivity_defined = true, f1_defined = true;

    std::size_t n() const { return tp + fp + fn + tn; }
};

Contingency contingency_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);

// Standard confusion-matrix metrics; throws InputError on empty or unequal
// inputs.
Contingency contingency(std::span<const bool> predictions, std::span<const bool> truths);

// Histogram of pred/truth ratios with the 5% and 10% interval markers.
// Buckets cover [lo, hi) at fixed width; out-of-range ratios land in the edge
// buckets so counts always sum to the number of pairs added.
struct RatioHistogram {
    double lo = 0.0;
    double hi = 2.0;
    double bucket_width = 0.01;
    std::vector<std::size_t> counts;
    std::size_t n = 0;
    std::size_t skipped_zero_truth = 0;

    static constexpr double kMargin5Lo = 0.95, kMargin5Hi = 1.05;
    static constexpr double kMargin10Lo = 0.90, kMargin10Hi = 1.10;

    RatioHistogram();
    void add(double pred, double truth); // truth == 0 is counted as skipped
    std::string to_csv() const;
};

RatioHistogram margin_histogram(std::span<const std::pair<double, double>> pairs);

struct EvalReport {
    std::string version;
    std::string generated_at;
    double margin = 0.05;
    bool mv_gating = true;
    std::map<std::string, std::string> config;

    std::size_t records = 0;
    std::size_t complete_chains = 0;

    std::map<std::string, RateCell> derivation;
    std::map<std::string, RateCell> forced; // empty unless forced completions were scored
    std::map<std::string, RateCell> value;
    std::optional<Contingency> sepsis_contingency;
    std::string histogram_variable;
    RatioHistogram histogram;

    std::string to_json() const;
    static EvalReport from_json(const std::string& text);

    // Human-readable tables (per-variable rows, current/future blocks).
    std::string to_text() const;
};

} // namespace sepsikit
