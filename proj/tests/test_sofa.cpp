#include "sepsikit/errors.hpp"
#include "sepsikit/sofa.hpp"

#include "support/sofa_oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace sepsikit;

namespace {

Observation obs(const char* feature, double t, double v) {
    return Observation{FeatureCatalog::builtin().require(feature), t, v, "s"};
}

} // namespace

TEST_CASE("derived quantities") {
    CHECK(mean_arterial_pressure(70.0, 70.0) == doctest::Approx(70.0));
    CHECK(mean_arterial_pressure(80.0, 43.0) == doctest::Approx(166.0 / 3.0));
    CHECK(mean_arterial_pressure(105.0, 49.0) == doctest::Approx(203.0 / 3.0));
    CHECK_THROWS_AS(mean_arterial_pressure(43.0, 80.0), InputError);

    CHECK(horowitz(100.0, 0.5) == doctest::Approx(200.0));
    CHECK(horowitz(141.0, 1.0) == doctest::Approx(141.0));
    CHECK(horowitz(400.0, 1.0) == doctest::Approx(400.0));
    CHECK_THROWS_AS(horowitz(100.0, 0.0), InputError);

    CHECK(vasopressor_rate(0.0, 90.0, 62.8) == doctest::Approx(0.0));
    CHECK(vasopressor_rate(6280.0, 10.0, 62.8) == doctest::Approx(10.0));
    CHECK(vasopressor_rate(1.0, 1.0, 1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(vasopressor_rate(100.0, 10.0, 0.0), InputError);
    CHECK_THROWS_AS(vasopressor_rate(100.0, 0.0, 70.0), InputError);
}

TEST_CASE("step function spot values") {
    CHECK(score_cns(11) == 2);
    CHECK(score_cns(15) == 0);
    CHECK(score_cns(5) == 4);
    CHECK_THROWS_AS(score_cns(2), InputError);
    CHECK_THROWS_AS(score_cns(16), InputError);

    CHECK(score_cardio(55.333, 0.0, 0.0, 0.0, 0.0) == 1);
    CHECK(score_cardio(72.0, 0.0, 0.0, 0.0, 0.0) == 0);
    CHECK(score_cardio(60.0, 16.0, 0.0, 0.0, 0.0) == 4);
    CHECK(score_cardio({}, {}, {}, {}, {}) == 0);
    CHECK(score_cardio({}, {}, 0.1, {}, {}) == 2);  // dobutamine, any dose
    CHECK(score_cardio(80.0, {}, {}, 0.1, {}) == 3); // epinephrine at the 0.1 boundary
    CHECK(score_cardio(80.0, {}, {}, {}, 0.2) == 4);

    CHECK(score_resp(200.0, false) == 2);
    CHECK(score_resp(200.0, true) == 2);
    CHECK(score_resp(141.0, true) == 3);
    CHECK(score_resp(141.0, false) == 2);        // gated
    CHECK(score_resp(141.0, false, false) == 3); // gating disabled
    CHECK(score_resp(450.0, false) == 0);
    CHECK(score_resp(90.0, true) == 4);
    CHECK(score_resp({}, true) == 0);

    CHECK(score_coag(310.0) == 0);
    CHECK(score_coag(19.0) == 4);
    CHECK(score_coag({}) == 0);

    CHECK(score_liver(1.0) == 0);
    CHECK(score_liver(1.8) == 1);
    CHECK(score_liver(12.5) == 4);
    CHECK(score_liver(12.0) == 4);
    CHECK(score_liver({}) == 0);

    CHECK(score_renal(0.4, 1095.0) == 0);
    CHECK(score_renal(0.4, 150.0) == 4);
    CHECK(score_renal(1.4, 1585.0) == 1);
    CHECK(score_renal({}, {}) == 0);
    CHECK(score_renal(6.0, {}) == 4);
    CHECK(score_renal({}, 450.0) == 3);
}

TEST_CASE("step functions agree with the table oracle on dense grids") {
    // >= 1e4 points per function plus every boundary +- epsilon
    auto grid = [](double lo, double hi, std::size_t n, const std::vector<double>& boundaries) {
        std::vector<double> points;
        points.reserve(n + boundaries.size() * 5);
        for (std::size_t i = 0; i < n; ++i)
            points.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        for (double b : boundaries)
            for (double eps : {-1e-6, -1e-9, 0.0, 1e-9, 1e-6}) points.push_back(b + eps);
        return points;
    };

    for (double v : grid(3.0, 15.0, 12000, {6.0, 10.0, 13.0, 15.0})) {
        if (v < 3.0 || v > 15.0) continue;
        CHECK(score_cns(v) == oracle::cns(v));
    }
    for (double v : grid(0.0, 500.0, 12000, {20.0, 50.0, 100.0, 150.0}))
        CHECK(score_coag(v) == oracle::coag(v));
    for (double v : grid(0.0, 20.0, 12000, {1.2, 2.0, 6.0, 12.0}))
        CHECK(score_liver(v) == oracle::liver(v));
    for (double c : grid(0.0, 8.0, 120, {1.2, 2.0, 3.5, 5.0}))
        for (double u : grid(0.0, 2400.0, 90, {200.0, 500.0}))
            CHECK(score_renal(c, u) == oracle::renal(c, u));
    for (bool vent : {false, true})
        for (bool gating : {false, true})
            for (double r : grid(0.0, 600.0, 12000, {100.0, 200.0, 300.0, 400.0}))
                CHECK(score_resp(r, vent, gating) == oracle::resp(r, vent, gating));

    // cardio spans four drug axes and MAP; sample a lattice over all of them
    const std::vector<double> dopa = grid(0.0, 20.0, 12, {5.0, 15.0});
    const std::vector<double> epi = grid(0.0, 0.3, 8, {0.1});
    const std::vector<double> nor = grid(0.0, 0.3, 8, {0.1});
    const std::vector<double> maps = {55.0, 69.999999, 70.0, 70.000001, 90.0};
    std::size_t cardio_points = 0;
    for (double d : dopa)
        for (double e : epi)
            for (double n : nor)
                for (double b : {0.0, 0.4})
                    for (double m : maps) {
                        CHECK(score_cardio(m, d, b, e, n) == oracle::cardio(m, d, b, e, n));
                        ++cardio_points;
                    }
    CHECK(cardio_points >= 10000);
}

TEST_CASE("step function monotonicity") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double a = 3.0 + unit(gen) * 12.0;
        const double b = 3.0 + unit(gen) * 12.0;
        if (a <= b) CHECK(score_cns(a) >= score_cns(b)); // lower GCS is worse
        const double p = unit(gen) * 400.0, q = unit(gen) * 400.0;
        if (p <= q) CHECK(score_coag(p) >= score_coag(q));
        const double x = unit(gen) * 15.0, y = unit(gen) * 15.0;
        if (x <= y) {
            CHECK(score_liver(x) <= score_liver(y));
            CHECK(score_renal(x, {}) <= score_renal(y, {}));
        }
        const double r = unit(gen) * 500.0, s = unit(gen) * 500.0;
        for (bool vent : {false, true})
            if (r <= s) CHECK(score_resp(r, vent) >= score_resp(s, vent));
    }
}

TEST_CASE("total SOFA sums six organs, skipping the excluded one") {
    CHECK(total_sofa({2, 1, 2, 0, 0, 0}) == 5);
    CHECK(total_sofa({2, 1, 2, 0, 0, 4}) == 9);
    CHECK(total_sofa({2, 1, 2, 0, 0, 4}, Organ::Renal) == 5);
    CHECK(total_sofa({0, 0, 0, 0, 0, 0}) == 0);
    CHECK(total_sofa({4, 4, 4, 4, 4, 4}) == 24);
    CHECK(total_sofa({4, 4, 4, 4, 4, 4}, Organ::Cns) == 20);
    CHECK_THROWS_AS(total_sofa({5, 0, 0, 0, 0, 0}), InputError);
    CHECK_THROWS_AS(total_sofa({-1, 0, 0, 0, 0, 0}), InputError);
}

TEST_CASE("diff indicator and sepsis conjunction") {
    CHECK(sofa_diff(5, 9));
    CHECK_FALSE(sofa_diff(6, 5));
    for (int k = 0; k <= 22; ++k) CHECK(sofa_diff(k, k + 2)); // boundary of >=

    CHECK(sepsis_label(true, true).septic);
    CHECK_FALSE(sepsis_label(false, true).septic);
    CHECK_FALSE(sepsis_label(true, false).septic);
    const SepsisVerdict v = sepsis_label(5, 9, true);
    CHECK(v.septic);
    CHECK(v.delta == 4);
    CHECK(sepsis_label(6, 5, true).delta == -1);
}

TEST_CASE("a fully missing record scores zero everywhere") {
    const SofaSnapshot s = score_sofa(WorstValues{});
    CHECK(s.cns == 0);
    CHECK(s.cardio == 0);
    CHECK(s.resp == 0);
    CHECK(s.coag == 0);
    CHECK(s.liver == 0);
    CHECK(s.renal == 0);
    CHECK(s.total == 0);
}

TEST_CASE("total range with and without exception") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        WorstValues w;
        w.gcs_eye = 1.0 + std::floor(unit(gen) * 4.0);
        w.gcs_motor = 1.0 + std::floor(unit(gen) * 6.0);
        w.gcs_verbal = 1.0 + std::floor(unit(gen) * 5.0);
        w.map_min = 40.0 + unit(gen) * 60.0;
        w.dopamine_max = unit(gen) * 20.0;
        w.pao2_min = 60.0 + unit(gen) * 300.0;
        w.fio2_min = 0.21 + unit(gen) * 0.79;
        w.mech_vent = unit(gen) < 0.5;
        w.platelets_min = unit(gen) * 400.0;
        w.bilirubin_max = unit(gen) * 15.0;
        w.creatinine_max = unit(gen) * 7.0;
        w.urine_total = unit(gen) * 3000.0;
        const SofaSnapshot plain = score_sofa(w);
        CHECK(plain.total >= 0);
        CHECK(plain.total <= 24);
        const SofaSnapshot excluded =
            score_sofa(w, Precondition{"N18.9", PreconditionOrgan::Kidney,
                                       CodeDistribution::InDistribution});
        CHECK(excluded.total >= 0);
        CHECK(excluded.total <= 20);
        CHECK(excluded.total == plain.total - plain.renal);
    }
}

TEST_CASE("exception invariance: perturbing the excluded organ never changes the outcome") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& code : precondition_codes()) {
        const Precondition exception{std::string(code.icd_code), code.organ, code.distribution};
        const Organ organ = excluded_organ(code.organ);
        WorstValues base;
        base.gcs_eye = 4.0;
        base.gcs_motor = 6.0;
        base.gcs_verbal = 1.0;
        base.map_min = 55.0;
        base.pao2_min = 100.0;
        base.fio2_min = 0.5;
        base.mech_vent = true;
        base.platelets_min = 90.0;
        base.bilirubin_max = 2.5;
        base.creatinine_max = 2.2;
        base.urine_total = 300.0;
        const SofaSnapshot reference = score_sofa(base, exception);

        for (int i = 0; i < 200; ++i) {
            WorstValues w = base;
            switch (organ) {
            case Organ::Cns:
                w.gcs_eye = 1.0 + std::floor(unit(gen) * 4.0);
                w.gcs_motor = 1.0 + std::floor(unit(gen) * 6.0);
                w.gcs_verbal = 1.0 + std::floor(unit(gen) * 5.0);
                break;
            case Organ::Cardio:
                w.map_min = 40.0 + unit(gen) * 70.0;
                w.dopamine_max = unit(gen) * 20.0;
                w.dobutamine_max = unit(gen);
                w.epinephrine_max = unit(gen) * 0.3;
                w.norepinephrine_max = unit(gen) * 0.3;
                break;
            case Organ::Resp:
                w.pao2_min = 50.0 + unit(gen) * 400.0;
                w.fio2_min = 0.21 + unit(gen) * 0.79;
                w.mech_vent = unit(gen) < 0.5;
                break;
            case Organ::Coag: w.platelets_min = unit(gen) * 400.0; break;
            case Organ::Liver: w.bilirubin_max = unit(gen) * 15.0; break;
            case Organ::Renal:
                w.creatinine_max = unit(gen) * 7.0;
                w.urine_total = unit(gen) * 3000.0;
                break;
            }
            const SofaSnapshot perturbed = score_sofa(w, exception);
            CHECK(perturbed.total == reference.total);
            const auto verdict_a = sepsis_label(reference.total, perturbed.total, true);
            CHECK_FALSE(verdict_a.septic); // equal totals can never trip the diff
        }
    }
}

TEST_CASE("worst extraction over a day of observations") {
    Demographics demo;
    demo.weight_kg = 62.8;

    SUBCASE("minima, maxima, urine sum") {
        std::vector<Observation> day = {
            obs("GCS_eye", -20.37, 4.0),
            obs("Urine", -15.0, 300.0),
            obs("Urine", -9.0, 400.0),
            obs("Urine", -3.0, 395.0),
            obs("Platelet Count", -17.0, 310.0),
            obs("Platelet Count", -2.0, 350.0),
            obs("Bilirubin (Total)", -16.0, 1.0),
            obs("Bilirubin (Total)", -4.0, 0.5),
            obs("Creatinine Blood", -14.0, 0.4),
        };
        const WorstValues w = worst_values(day, demo);
        CHECK(w.gcs_eye == 4.0);
        CHECK(w.urine_total == 1095.0);
        CHECK(w.platelets_min == 310.0);
        CHECK(w.bilirubin_max == 1.0);
        CHECK(w.creatinine_max == 0.4);
        CHECK_FALSE(w.map_min.has_value());
        CHECK(w.weight_kg == 62.8); // demographics fallback
    }

    SUBCASE("MAP pairs co-timed readings and skips unpaired ones") {
        std::vector<Observation> day = {
            obs("DBP", -22.37, 49.0), obs("SBP", -22.37, 105.0),
            obs("DBP", -20.37, 52.0), obs("SBP", -20.37, 117.0),
            obs("DBP", -18.37, 43.0), obs("SBP", -18.37, 80.0),
            obs("SBP", -5.5, 60.0), // unpaired: no DBP in that hour
        };
        const WorstValues w = worst_values(day, demo);
        REQUIRE(w.map_min.has_value());
        CHECK(*w.map_min == 55.333); // canonical 3-decimal grid
    }

    SUBCASE("carry-forward fills gaps from the prior day only") {
        WorstValues prior;
        prior.platelets_min = 310.0;
        prior.bilirubin_max = 2.2;
        std::vector<Observation> day = {obs("Bilirubin (Total)", -4.0, 1.0)};
        const WorstValues w = worst_values(day, demo, prior);
        CHECK(w.platelets_min == 310.0); // carried
        CHECK(w.bilirubin_max == 1.0);   // fresh observation wins
    }

    SUBCASE("ventilation flag distinguishes absent from observed-negative") {
        CHECK_FALSE(worst_values({}, demo).mech_vent.has_value());
        std::vector<Observation> off = {obs("Mechanically ventilated", -3.0, 0.0)};
        CHECK(worst_values(off, demo).mech_vent == false);
        std::vector<Observation> on = {obs("Mechanically ventilated", -3.0, 1.0)};
        CHECK(worst_values(on, demo).mech_vent == true);
    }

    SUBCASE("last observed weight wins over demographics") {
        std::vector<Observation> day = {obs("Weight", -20.0, 70.0), obs("Weight", -2.0, 71.5)};
        CHECK(worst_values(day, demo).weight_kg == 71.5);
    }
}

TEST_CASE("precondition codes match the published table") {
    CHECK(precondition_codes().size() == 16);
    std::size_t ood = 0;
    for (const auto& code : precondition_codes())
        if (code.distribution == CodeDistribution::OutOfDistribution) ++ood;
    CHECK(ood == 5);
    std::size_t in_dist = precondition_codes().size() - ood;
    CHECK(in_dist == 11);

    auto n189 = precondition_from_code("N18.9");
    REQUIRE(n189.has_value());
    CHECK(n189->organ == PreconditionOrgan::Kidney);
    CHECK(excluded_organ(n189->organ) == Organ::Renal);
    CHECK(n189->distribution == CodeDistribution::InDistribution);

    auto j449 = precondition_from_code("J44.9");
    REQUIRE(j449.has_value());
    CHECK(j449->organ == PreconditionOrgan::Lung);
    CHECK(j449->distribution == CodeDistribution::OutOfDistribution);

    CHECK_FALSE(precondition_from_code("A00").has_value());
}
