#pragma once

#include "sepsikit/catalog.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace sepsikit {

// One clinical quadruplet. Times are hours since admission at ingest and
// window-relative (observation day in [-24, 0), prediction day in [0, 24))
// once a StayWindow has been cut.
struct Observation {
    FeatureId feature = 0;
    double time_h = 0.0;
    double value = 0.0;
    std::string stay;
};

enum class Gender { Male, Female };

std::string_view to_string(Gender g);
std::optional<Gender> gender_from_string(std::string_view s);

struct Demographics {
    double age_years = 0.0;
    std::optional<Gender> gender;
    std::optional<double> weight_kg;
};

} // namespace sepsikit
