#include "sepsikit/forecast.hpp"

#include "sepsikit/errors.hpp"
#include "sepsikit/textfmt.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>

namespace sepsikit {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return fields;
}

} // namespace

ForecastGrid persistence_forecast(std::span<const Observation> observation_day,
                                  const FeatureCatalog& catalog) {
    ForecastGrid grid(catalog.size(), ForecastProvenance::Persistence);
    const SofaFeatures& sf = SofaFeatures::builtin();

    struct Accum {
        bool seen = false;
        double min = 0.0, max = 0.0, sum = 0.0;
        double last_time = 0.0, last_value = 0.0;
    };
    std::vector<Accum> acc(catalog.size());

    // SBP/DBP need pair-aware handling: per hour bucket, zip readings in time
    // order and remember the pair with the lowest MAP.
    std::map<int, std::pair<std::vector<std::pair<double, double>>, std::vector<std::pair<double, double>>>>
        pressure_buckets;

    for (const Observation& obs : observation_day) {
        Accum& a = acc[obs.feature];
        if (!a.seen) {
            a = {true, obs.value, obs.value, obs.value, obs.time_h, obs.value};
        } else {
            a.min = std::min(a.min, obs.value);
            a.max = std::max(a.max, obs.value);
            a.sum += obs.value;
            if (obs.time_h >= a.last_time) {
                a.last_time = obs.time_h;
                a.last_value = obs.value;
            }
        }
        if (obs.feature == sf.sbp || obs.feature == sf.dbp) {
            auto& bucket = pressure_buckets[static_cast<int>(std::floor(obs.time_h))];
            auto& series = (obs.feature == sf.sbp) ? bucket.first : bucket.second;
            series.emplace_back(obs.time_h, obs.value);
        }
    }

    std::optional<std::pair<double, double>> min_map_pair;
    double min_map = 0.0;
    for (auto& [hour, bucket] : pressure_buckets) {
        auto& [sbp, dbp] = bucket;
        auto by_time = [](const auto& a, const auto& b) { return a.first < b.first; };
        std::stable_sort(sbp.begin(), sbp.end(), by_time);
        std::stable_sort(dbp.begin(), dbp.end(), by_time);
        const std::size_t pairs = std::min(sbp.size(), dbp.size());
        for (std::size_t i = 0; i < pairs; ++i) {
            const double s = sbp[i].second, d = dbp[i].second;
            if (s < d || d <= 0.0) continue;
            const double map = mean_arterial_pressure(s, d);
            if (!min_map_pair || map < min_map) {
                min_map = map;
                min_map_pair = {s, d};
            }
        }
    }

    for (FeatureId f = 0; f < catalog.size(); ++f) {
        if (!acc[f].seen) continue;
        if (catalog.at(f).aggregation == Aggregation::Sum) {
            // summed outputs: book the day total once so the future day's
            // summed output reproduces it exactly
            grid.set(0, f, acc[f].sum);
            for (std::size_t h = 1; h < ForecastGrid::kHours; ++h) grid.set(h, f, 0.0);
            continue;
        }
        double held;
        if (f == sf.sbp && min_map_pair) held = min_map_pair->first;
        else if (f == sf.dbp && min_map_pair) held = min_map_pair->second;
        else {
            switch (catalog.at(f).aggregation) {
            case Aggregation::MinWorst: held = acc[f].min; break;
            case Aggregation::MaxWorst: held = acc[f].max; break;
            default: held = acc[f].last_value; break;
            }
        }
        for (std::size_t h = 0; h < ForecastGrid::kHours; ++h) grid.set(h, f, held);
    }
    return grid;
}

ForecastGrid import_external_forecast(std::istream& source, const FeatureCatalog& catalog) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(source, line)) {
        std::string_view text = trim(line);
        if (!text.empty()) lines.emplace_back(text);
    }
    if (lines.empty()) throw InputError("empty forecast input");

    auto first_fields = split_csv(lines.front());
    const bool dense = first_fields.size() == catalog.size();

    ForecastGrid grid(catalog.size(), ForecastProvenance::External);

    if (dense) {
        if (lines.size() != ForecastGrid::kHours) {
            std::ostringstream msg;
            msg << "dense forecast shape mismatch: expected " << ForecastGrid::kHours
                << " rows, got " << lines.size();
            throw ContractError(msg.str());
        }
        for (std::size_t h = 0; h < lines.size(); ++h) {
            auto fields = split_csv(lines[h]);
            if (fields.size() != catalog.size()) {
                std::ostringstream msg;
                msg << "dense forecast shape mismatch at row " << h + 1 << ": expected "
                    << catalog.size() << " columns, got " << fields.size();
                throw ContractError(msg.str());
            }
            for (std::size_t f = 0; f < fields.size(); ++f) {
                auto v = textfmt::parse_number(fields[f]);
                if (!v) {
                    std::ostringstream msg;
                    msg << "forecast value at row " << h + 1 << ", column " << f + 1
                        << " is not a finite number";
                    throw ContractError(msg.str());
                }
                grid.set(h, static_cast<FeatureId>(f), *v);
            }
        }
        return grid;
    }

    // line format: hour,feature,value (optional header)
    std::size_t start = 0;
    if (first_fields.size() == 3 && first_fields[0] == "hour" && first_fields[1] == "feature" &&
        first_fields[2] == "value")
        start = 1; // header row
    for (std::size_t i = start; i < lines.size(); ++i) {
        auto fields = split_csv(lines[i]);
        if (fields.size() != 3)
            throw InputError("malformed forecast record at line " + std::to_string(i + 1) +
                             ": expected hour,feature,value");
        auto hour = textfmt::parse_number(fields[0]);
        if (!hour || *hour < 0 || *hour >= static_cast<double>(ForecastGrid::kHours) ||
            *hour != std::floor(*hour))
            throw ContractError("forecast hour out of range at line " + std::to_string(i + 1));
        auto feature = catalog.find(fields[1]);
        if (!feature)
            throw InputError("unknown feature in forecast at line " + std::to_string(i + 1) + ": '" +
                             std::string(fields[1]) + "'");
        auto v = textfmt::parse_number(fields[2]);
        if (!v)
            throw ContractError("forecast value at line " + std::to_string(i + 1) +
                                " is not a finite number");
        const auto h = static_cast<std::size_t>(*hour);
        if (grid.has(h, *feature))
            throw ContractError("duplicate forecast cell at line " + std::to_string(i + 1));
        grid.set(h, *feature, *v);
    }
    return grid;
}

std::string serialize_forecast(const ForecastGrid& grid, const FeatureCatalog& catalog) {
    std::ostringstream out;
    out << "hour,feature,value\n";
    out.precision(17);
    for (std::size_t h = 0; h < ForecastGrid::kHours; ++h)
        for (FeatureId f = 0; f < grid.features; ++f)
            if (grid.has(h, f)) out << h << ',' << catalog.at(f).name << ',' << grid.at(h, f) << '\n';
    return out.str();
}

double masked_mse(const ForecastGrid& pred, const DenseGrid& truth, const FeatureStats& stats) {
    if (pred.features != truth.features)
        throw ContractError("masked_mse: grid feature counts differ");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t h = 0; h < DenseGrid::kHours; ++h) {
        for (FeatureId f = 0; f < truth.features; ++f) {
            if (!truth.observed(h, f)) continue;
            const double p =
                pred.has(h, f) ? (pred.at(h, f) - stats.mean[f]) / stats.stddev[f] : 0.0;
            const double err = p - truth.at(h, f);
            sum += err * err;
            ++n;
        }
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

std::vector<Observation> grid_observations(const ForecastGrid& grid, std::string stay) {
    std::vector<Observation> out;
    for (std::size_t h = 0; h < ForecastGrid::kHours; ++h) {
        for (FeatureId f = 0; f < grid.features; ++f) {
            if (!grid.has(h, f)) continue;
            Observation obs;
            obs.feature = f;
            obs.time_h = static_cast<double>(h) + 0.5;
            obs.value = grid.at(h, f);
            obs.stay = stay;
            out.push_back(std::move(obs));
        }
    }
    return out;
}

} // namespace sepsikit
