#pragma once

#include "sepsikit/catalog.hpp"
#include "sepsikit/ingest.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sepsikit {

enum class ForecastProvenance { Persistence, External };

// 24 hourly steps x catalog features, native units. Cells can be absent
// (never-forecast features stay excluded from downstream worst values).
struct ForecastGrid {
    static constexpr std::size_t kHours = 24;

    std::size_t features = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> present;
    ForecastProvenance provenance = ForecastProvenance::External;

    explicit ForecastGrid(std::size_t feature_count = 0,
                          ForecastProvenance from = ForecastProvenance::External)
        : features(feature_count), values(kHours * feature_count, 0.0),
          present(kHours * feature_count, 0), provenance(from) {}

    double at(std::size_t hour, FeatureId f) const { return values[hour * features + f]; }
    bool has(std::size_t hour, FeatureId f) const { return present[hour * features + f] != 0; }
    void set(std::size_t hour, FeatureId f, double v) {
        values[hour * features + f] = v;
        present[hour * features + f] = 1;
    }
};

// Baseline forecaster: every feature observed during the day is held constant
// across the next 24 hours, at the value that preserves the day's worst-value
// semantics (day minimum / maximum, last observation for direction-free
// features; summed outputs book the day total in the first step so the
// future day's sum reproduces it exactly). SBP/DBP are held at the co-timed
// pair that produced the day's minimum MAP when such a pair exists.
// Never-observed features stay absent.
ForecastGrid persistence_forecast(std::span<const Observation> observation_day,
                                  const FeatureCatalog& catalog = FeatureCatalog::builtin());

// Reads one forecast grid. Two formats are accepted: line-delimited
// `hour,feature,value` records (absent cells allowed) or a dense block of 24
// rows x |catalog| comma-separated values in catalog order.
ForecastGrid import_external_forecast(std::istream& source,
                                      const FeatureCatalog& catalog = FeatureCatalog::builtin());

std::string serialize_forecast(const ForecastGrid& grid,
                               const FeatureCatalog& catalog = FeatureCatalog::builtin());

// Mean squared error over the cells the truth grid actually observed,
// computed in standardized space; 0 when no cell is observed. Absent
// predictions count as the imputation value (0 standardized).
double masked_mse(const ForecastGrid& pred, const DenseGrid& truth, const FeatureStats& stats);

// Expands a grid into hourly observations at times h + 0.5 in [0, 24), so the
// usual worst-value extraction applies to forecasts.
std::vector<Observation> grid_observations(const ForecastGrid& grid, std::string stay);

} // namespace sepsikit
