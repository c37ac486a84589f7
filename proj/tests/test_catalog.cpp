#include "sepsikit/catalog.hpp"
#include "sepsikit/errors.hpp"

#include <doctest.h>

#include <set>

using namespace sepsikit;

TEST_CASE("catalog has exactly 131 entries, 15 of them SOFA-relevant") {
    const auto& catalog = FeatureCatalog::builtin();
    CHECK(catalog.size() == 131);
    CHECK(catalog.sofa_relevant_count() == 15);
}

TEST_CASE("entry names are unique and lookup round-trips") {
    const auto& catalog = FeatureCatalog::builtin();
    std::set<std::string> names;
    for (FeatureId id = 0; id < catalog.size(); ++id) {
        const auto& info = catalog.at(id);
        CHECK(names.insert(info.name).second);
        auto found = catalog.find(info.name);
        REQUIRE(found.has_value());
        CHECK(*found == id);
    }
}

TEST_CASE("unknown names are rejected") {
    const auto& catalog = FeatureCatalog::builtin();
    CHECK_FALSE(catalog.find("XYZ").has_value());
    CHECK_THROWS_AS(catalog.require("XYZ"), InputError);
}

TEST_CASE("the SOFA-relevant set carries the expected directions") {
    const auto& catalog = FeatureCatalog::builtin();
    auto agg = [&](const char* name) { return catalog.at(catalog.require(name)).aggregation; };

    for (const char* name :
         {"GCS_eye", "GCS_motor", "GCS_verbal", "DBP", "SBP", "PaO2", "FiO2", "Platelet Count"})
        CHECK(agg(name) == Aggregation::MinWorst);
    for (const char* name : {"Dopamine", "Dobutamine", "Epinephrine", "Norepinephrine",
                             "Bilirubin (Total)", "Creatinine Blood"})
        CHECK(agg(name) == Aggregation::MaxWorst);
    CHECK(agg("Urine") == Aggregation::Sum);
    CHECK(agg("HR") == Aggregation::None);

    // ventilation gates the respiratory score but is not itself SOFA-relevant
    CHECK_FALSE(catalog.at(catalog.require("Mechanically ventilated")).sofa_relevant);
    CHECK_FALSE(catalog.at(catalog.require("Weight")).sofa_relevant);
}

TEST_CASE("reference listing covers every entry") {
    const auto& catalog = FeatureCatalog::builtin();
    const std::string listing = catalog.reference_listing();
    std::size_t lines = 0;
    for (char c : listing)
        if (c == '\n') ++lines;
    CHECK(lines == catalog.size() + 1); // header + one row each
    CHECK(listing.find("Platelet Count,x10^3/ul,min,1") != std::string::npos);
}
