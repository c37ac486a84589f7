#include "sepsikit/errors.hpp"
#include "sepsikit/metrics.hpp"

#include <doctest.h>

#include <random>
#include <vector>

using namespace sepsikit;

TEST_CASE("contingency metrics from hand-built confusion sets") {
    // TP=1, FP=0, FN=1, TN=2
    const std::vector<bool> pred = {true, false, false, false};
    const std::vector<bool> truth = {true, true, false, false};
    bool pred_arr[4], truth_arr[4];
    for (int i = 0; i < 4; ++i) {
        pred_arr[i] = pred[i];
        truth_arr[i] = truth[i];
    }
    const Contingency c = contingency(std::span<const bool>(pred_arr, 4),
                                      std::span<const bool>(truth_arr, 4));
    CHECK(c.tp == 1);
    CHECK(c.fp == 0);
    CHECK(c.fn == 1);
    CHECK(c.tn == 2);
    CHECK(c.accuracy == doctest::Approx(0.75));
    CHECK(c.specificity == doctest::Approx(1.0));
    CHECK(c.sensitivity == doctest::Approx(0.5));
    CHECK(c.f1 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("a perfect predictor scores ones everywhere") {
    const bool pred[] = {true, false, true};
    const bool truth[] = {true, false, true};
    const Contingency c = contingency(pred, truth);
    CHECK(c.accuracy == 1.0);
    CHECK(c.specificity == 1.0);
    CHECK(c.sensitivity == 1.0);
    CHECK(c.f1 == 1.0);
}

TEST_CASE("degenerate classes report flagged zeros") {
    const bool pred[] = {false, false};
    const bool truth[] = {false, false};
    const Contingency c = contingency(pred, truth);
    CHECK(c.sensitivity == 0.0);
    CHECK_FALSE(c.sensitivity_defined);
    CHECK(c.specificity == 1.0);
    CHECK(c.specificity_defined);
    CHECK(c.f1 == 0.0);
    CHECK_FALSE(c.f1_defined);
}

TEST_CASE("contingency input contracts") {
    const bool one[] = {true};
    CHECK_THROWS_AS(contingency(std::span<const bool>(one, 0), std::span<const bool>(one, 0)),
                    InputError);
    const bool two[] = {true, false};
    CHECK_THROWS_AS(contingency(std::span<const bool>(one, 1), std::span<const bool>(two, 2)),
                    InputError);
}

TEST_CASE("metrics recomputed from the emitted counts match the emitted rates") {
    std::mt19937_64 gen(3);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<char> pred(40), truth(40);
        bool pred_arr[40], truth_arr[40];
        for (int i = 0; i < 40; ++i) {
            pred_arr[i] = coin(gen) != 0;
            truth_arr[i] = coin(gen) != 0;
        }
        const Contingency c = contingency(pred_arr, truth_arr);
        const Contingency d = contingency_from_counts(c.tp, c.fp, c.fn, c.tn);
        CHECK(c.accuracy == d.accuracy);
        CHECK(c.specificity == d.specificity);
        CHECK(c.sensitivity == d.sensitivity);
        CHECK(c.f1 == d.f1);
        CHECK(c.n() == 40);
    }
}

TEST_CASE("ratio histogram") {
    SUBCASE("identical pairs spike at 1.0") {
        std::vector<std::pair<double, double>> pairs(100, {7.0, 7.0});
        const RatioHistogram h = margin_histogram(pairs);
        CHECK(h.n == 100);
        const auto bucket = static_cast<std::size_t>((1.0 - h.lo) / h.bucket_width);
        CHECK(h.counts[bucket] == 100);
    }
    SUBCASE("an 8% overshoot lands between the 5% and 10% lines") {
        std::vector<std::pair<double, double>> pairs(50, {1.08 * 40.0, 40.0});
        const RatioHistogram h = margin_histogram(pairs);
        std::size_t inside = 0;
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
            const double lo = h.lo + h.bucket_width * static_cast<double>(i);
            if (lo >= RatioHistogram::kMargin5Hi && lo < RatioHistogram::kMargin10Hi)
                inside += h.counts[i];
        }
        CHECK(inside == 50);
    }
    SUBCASE("counts are conserved, zero truths are counted separately") {
        std::vector<std::pair<double, double>> pairs = {
            {1.0, 1.0}, {5.0, 1.0}, {-3.0, 1.0}, {2.0, 0.0}};
        const RatioHistogram h = margin_histogram(pairs);
        std::size_t total = 0;
        for (auto c : h.counts) total += c;
        CHECK(total == 3); // extremes clamp into the edge buckets
        CHECK(h.n == 3);
        CHECK(h.skipped_zero_truth == 1);
    }
    SUBCASE("CSV holds one row per bucket") {
        const RatioHistogram h;
        const std::string csv = h.to_csv();
        std::size_t lines = 0;
        for (char c : csv)
            if (c == '\n') ++lines;
        CHECK(lines == h.counts.size() + 1);
    }
}

TEST_CASE("report JSON round-trips") {
    EvalReport report;
    report.version = "0.1.0";
    report.generated_at = "2025-01-01T00:00:00Z";
    report.margin = 0.05;
    report.mv_gating = true;
    report.config["truth"] = "corpus.jsonl";
    report.records = 3;
    report.complete_chains = 3;
    report.derivation["current/cns"].add(true);
    report.derivation["current/cns"].add(false);
    report.value["future/urine"].add(true);
    report.sepsis_contingency = contingency_from_counts(1, 0, 1, 2);
    report.histogram_variable = "future/total";
    report.histogram.add(9.0, 9.0);

    const std::string text = report.to_json();
    const EvalReport back = EvalReport::from_json(text);
    CHECK(back.version == report.version);
    CHECK(back.margin == report.margin);
    CHECK(back.records == 3);
    CHECK(back.derivation.at("current/cns").correct == 1);
    CHECK(back.derivation.at("current/cns").total == 2);
    CHECK(back.value.at("future/urine").rate() == 1.0);
    REQUIRE(back.sepsis_contingency.has_value());
    CHECK(back.sepsis_contingency->accuracy == doctest::Approx(0.75));
    CHECK(back.histogram.n == 1);

    const std::string rendered = back.to_text();
    CHECK(rendered.find("SEPSIS contingency") != std::string::npos);
    CHECK(rendered.find("5% interval") != std::string::npos);
}
