#pragma once

#include "sepsikit/catalog.hpp"
#include "sepsikit/sofa.hpp"
#include "sepsikit/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sepsikit {

// Reads the line-delimited observations format: `feature,time,value,stay`,
// optional header. Rejects unknown features and malformed records with the
// offending line number.
std::vector<Observation> parse_observations(std::istream& source,
                                            const FeatureCatalog& catalog = FeatureCatalog::builtin());

std::string serialize_observations(std::span<const Observation> observations,
                                   const FeatureCatalog& catalog = FeatureCatalog::builtin());

struct StayInfo {
    std::string stay;
    Demographics demographics;
    bool suspected_infection = false;
};

// Reads `stay,age,gender,weight[,infection]`, optional header. Unparseable
// gender and empty weight become missing; infection defaults to 0.
std::vector<StayInfo> parse_demographics(std::istream& source);

struct CohortStay {
    std::string stay;
    Demographics demographics;
    double duration_h = 0.0;
};

// Keeps stays with duration >= 24h, age >= 18 and a reported gender.
// Total, idempotent and order-preserving.
std::vector<std::string> filter_cohort(std::span<const CohortStay> stays);

struct StayWindow {
    std::string stay;
    int day = 0; // observation-day index within the stay
    std::vector<Observation> observation; // times in [-24, 0)
    std::vector<Observation> prediction;  // times in [0, 24)
    Demographics demographics;
    bool suspected_infection = false;
    std::optional<Precondition> precondition;
    std::optional<WorstValues> prior_worst; // raw worst values of the day before
};

// Cuts one stay's observations (absolute hours since admission, sorted by
// time) into consecutive (observation day, prediction day) windows. A stay
// covering d full days yields max(0, d - 1) windows.
std::vector<StayWindow> slide_windows(std::span<const Observation> stay_observations,
                                      const Demographics& demographics, bool suspected_infection,
                                      const FeatureCatalog& catalog = FeatureCatalog::builtin());

// Groups observations by stay, each group sorted by time (stable).
std::map<std::string, std::vector<Observation>> group_by_stay(std::span<const Observation> observations);

struct DenseGrid {
    static constexpr std::size_t kHours = 24;

    std::size_t features = 0;
    std::vector<double> values;        // kHours x features, standardized
    std::vector<std::uint8_t> mask;    // 1 = observed

    explicit DenseGrid(std::size_t feature_count = 0)
        : features(feature_count), values(kHours * feature_count, 0.0), mask(kHours * feature_count, 0) {}

    double& at(std::size_t hour, FeatureId f) { return values[hour * features + f]; }
    double at(std::size_t hour, FeatureId f) const { return values[hour * features + f]; }
    bool observed(std::size_t hour, FeatureId f) const { return mask[hour * features + f] != 0; }
    void set(std::size_t hour, FeatureId f, double v) {
        values[hour * features + f] = v;
        mask[hour * features + f] = 1;
    }
};

struct FeatureStats {
    std::vector<double> mean;
    std::vector<double> stddev;
};

// Per-feature mean/std; compute on the training split only.
FeatureStats compute_stats(std::span<const Observation> observations,
                           const FeatureCatalog& catalog = FeatureCatalog::builtin());

std::string serialize_stats(const FeatureStats& stats,
                            const FeatureCatalog& catalog = FeatureCatalog::builtin());
FeatureStats parse_stats(std::istream& source,
                         const FeatureCatalog& catalog = FeatureCatalog::builtin());

// Hourly dense encoding of one observation window (times in [-24, 0)):
// hour h covers [-24+h, -23+h); the first observed value in the hour is kept
// (standardized), everything else is zero-imputed with mask = 0.
DenseGrid densify(std::span<const Observation> window, const FeatureCatalog& catalog,
                  const FeatureStats& stats);

} // namespace sepsikit
