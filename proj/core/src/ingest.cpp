#include "sepsikit/ingest.hpp"

#include "sepsikit/errors.hpp"
#include "sepsikit/textfmt.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
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

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

[[noreturn]] void fail_line(std::string_view what, std::size_t line_no, std::string_view detail) {
    std::ostringstream msg;
    msg << what << " at line " << line_no;
    if (!detail.empty()) msg << ": " << detail;
    throw InputError(msg.str());
}

double parse_field(std::string_view field, std::size_t line_no, std::string_view name) {
    auto v = textfmt::parse_number(field);
    if (!v) fail_line("malformed record", line_no, std::string(name) + " is not a finite number");
    return *v;
}

} // namespace

std::vector<Observation> parse_observations(std::istream& source, const FeatureCatalog& catalog) {
    std::vector<Observation> out;
    std::string line;
    std::size_t line_no = 0;
    bool first_content_line = true;
    while (std::getline(source, line)) {
        ++line_no;
        std::string_view text = trim(line);
        if (text.empty()) continue;
        auto fields = split_csv(text);
        if (first_content_line) {
            first_content_line = false;
            if (fields.size() == 4 && lower(fields[0]) == "feature") continue; // header
        }
        if (fields.size() != 4)
            fail_line("malformed record", line_no, "expected 4 comma-separated fields");
        auto feature = catalog.find(fields[0]);
        if (!feature)
            fail_line("unknown feature", line_no, "'" + std::string(fields[0]) + "' is not in the catalog");
        Observation obs;
        obs.feature = *feature;
        obs.time_h = parse_field(fields[1], line_no, "time");
        obs.value = parse_field(fields[2], line_no, "value");
        if (fields[3].empty()) fail_line("malformed record", line_no, "empty stay id");
        obs.stay = std::string(fields[3]);
        out.push_back(std::move(obs));
    }
    return out;
}

std::string serialize_observations(std::span<const Observation> observations,
                                   const FeatureCatalog& catalog) {
    std::ostringstream out;
    out << "feature,time,value,stay\n";
    for (const Observation& obs : observations) {
        out << catalog.at(obs.feature).name << ',' << textfmt::time_point(obs.time_h) << ','
            << textfmt::value(obs.value) << ',' << obs.stay << '\n';
    }
    return out.str();
}

std::vector<StayInfo> parse_demographics(std::istream& source) {
    std::vector<StayInfo> out;
    std::string line;
    std::size_t line_no = 0;
    bool first_content_line = true;
    while (std::getline(source, line)) {
        ++line_no;
        std::string_view text = trim(line);
        if (text.empty()) continue;
        auto fields = split_csv(text);
        if (first_content_line) {
            first_content_line = false;
            if (fields.size() >= 3 && lower(fields[0]) == "stay") continue; // header
        }
        if (fields.size() < 4 || fields.size() > 5)
            fail_line("malformed record", line_no, "expected stay,age,gender,weight[,infection]");
        StayInfo info;
        if (fields[0].empty()) fail_line("malformed record", line_no, "empty stay id");
        info.stay = std::string(fields[0]);
        info.demographics.age_years = parse_field(fields[1], line_no, "age");
        info.demographics.gender = gender_from_string(fields[2]);
        if (!fields[3].empty())
            info.demographics.weight_kg = parse_field(fields[3], line_no, "weight");
        if (fields.size() == 5 && !fields[4].empty()) {
            std::string flag = lower(fields[4]);
            info.suspected_infection = flag == "1" || flag == "true" || flag == "yes";
        }
        out.push_back(std::move(info));
    }
    return out;
}

std::vector<std::string> filter_cohort(std::span<const CohortStay> stays) {
    std::vector<std::string> kept;
    for (const CohortStay& s : stays) {
        if (s.duration_h >= 24.0 && s.demographics.age_years >= 18.0 && s.demographics.gender)
            kept.push_back(s.stay);
    }
    return kept;
}

std::map<std::string, std::vector<Observation>> group_by_stay(std::span<const Observation> observations) {
    std::map<std::string, std::vector<Observation>> groups;
    for (const Observation& obs : observations) groups[obs.stay].push_back(obs);
    for (auto& [stay, series] : groups)
        std::stable_sort(series.begin(), series.end(),
                         [](const Observation& a, const Observation& b) { return a.time_h < b.time_h; });
    return groups;
}

std::vector<StayWindow> slide_windows(std::span<const Observation> stay_observations,
                                      const Demographics& demographics, bool suspected_infection,
                                      const FeatureCatalog& catalog) {
    std::vector<StayWindow> windows;
    if (stay_observations.empty()) return windows;

    double max_time = 0.0;
    for (const Observation& obs : stay_observations) max_time = std::max(max_time, obs.time_h);
    const int full_days = static_cast<int>(std::floor(max_time / 24.0));
    if (full_days < 2) return windows;

    // day d covers [24d, 24(d+1))
    std::vector<std::vector<Observation>> days(static_cast<std::size_t>(full_days) + 1);
    for (const Observation& obs : stay_observations) {
        const int d = static_cast<int>(std::floor(obs.time_h / 24.0));
        if (d >= 0 && d <= full_days) days[static_cast<std::size_t>(d)].push_back(obs);
    }

    std::vector<std::optional<WorstValues>> raw_worst(days.size());
    auto raw_worst_of = [&](int d) -> const std::optional<WorstValues>& {
        auto& slot = raw_worst[static_cast<std::size_t>(d)];
        if (!slot) slot = worst_values(days[static_cast<std::size_t>(d)], demographics, {}, catalog);
        return slot;
    };

    for (int w = 0; w + 1 < full_days; ++w) {
        StayWindow window;
        window.stay = stay_observations.front().stay;
        window.day = w;
        window.demographics = demographics;
        window.suspected_infection = suspected_infection;
        const double window_end = 24.0 * (w + 1);
        for (const Observation& obs : days[static_cast<std::size_t>(w)]) {
            Observation local = obs;
            local.time_h -= window_end;
            window.observation.push_back(std::move(local));
        }
        for (const Observation& obs : days[static_cast<std::size_t>(w) + 1]) {
            Observation local = obs;
            local.time_h -= window_end;
            window.prediction.push_back(std::move(local));
        }
        if (w >= 1) window.prior_worst = raw_worst_of(w - 1);
        windows.push_back(std::move(window));
    }
    return windows;
}

FeatureStats compute_stats(std::span<const Observation> observations, const FeatureCatalog& catalog) {
    const std::size_t n = catalog.size();
    std::vector<double> sum(n, 0.0), sum_sq(n, 0.0);
    std::vector<std::size_t> count(n, 0);
    for (const Observation& obs : observations) {
        sum[obs.feature] += obs.value;
        sum_sq[obs.feature] += obs.value * obs.value;
        ++count[obs.feature];
    }
    FeatureStats stats;
    stats.mean.assign(n, 0.0);
    stats.stddev.assign(n, 1.0);
    for (std::size_t f = 0; f < n; ++f) {
        if (count[f] == 0) continue;
        const double mean = sum[f] / static_cast<double>(count[f]);
        stats.mean[f] = mean;
        const double var = std::max(0.0, sum_sq[f] / static_cast<double>(count[f]) - mean * mean);
        const double sd = std::sqrt(var);
        stats.stddev[f] = sd > 1e-12 ? sd : 1.0;
    }
    return stats;
}

std::string serialize_stats(const FeatureStats& stats, const FeatureCatalog& catalog) {
    std::ostringstream out;
    out << "feature,mean,std\n";
    out.precision(17);
    for (std::size_t f = 0; f < catalog.size(); ++f)
        out << catalog.at(static_cast<FeatureId>(f)).name << ',' << stats.mean[f] << ','
            << stats.stddev[f] << '\n';
    return out.str();
}

FeatureStats parse_stats(std::istream& source, const FeatureCatalog& catalog) {
    FeatureStats stats;
    stats.mean.assign(catalog.size(), 0.0);
    stats.stddev.assign(catalog.size(), 1.0);
    std::string line;
    std::size_t line_no = 0;
    bool first_content_line = true;
    while (std::getline(source, line)) {
        ++line_no;
        std::string_view text = trim(line);
        if (text.empty()) continue;
        auto fields = split_csv(text);
        if (first_content_line) {
            first_content_line = false;
            if (fields.size() == 3 && lower(fields[0]) == "feature") continue;
        }
        if (fields.size() != 3) fail_line("malformed record", line_no, "expected feature,mean,std");
        auto id = catalog.find(fields[0]);
        if (!id) fail_line("unknown feature", line_no, std::string(fields[0]));
        stats.mean[*id] = parse_field(fields[1], line_no, "mean");
        stats.stddev[*id] = parse_field(fields[2], line_no, "std");
        if (stats.stddev[*id] <= 0.0) fail_line("malformed record", line_no, "std must be positive");
    }
    return stats;
}

DenseGrid densify(std::span<const Observation> window, const FeatureCatalog& catalog,
                  const FeatureStats& stats) {
    DenseGrid grid(catalog.size());
    // first observation per (hour, feature) wins; input order breaks time ties
    std::vector<double> first_time(DenseGrid::kHours * catalog.size(), 0.0);
    for (const Observation& obs : window) {
        const double h = std::floor(obs.time_h) + 24.0;
        if (h < 0.0 || h >= static_cast<double>(DenseGrid::kHours)) continue;
        const auto hour = static_cast<std::size_t>(h);
        const std::size_t idx = hour * grid.features + obs.feature;
        if (grid.mask[idx] && first_time[idx] <= obs.time_h) continue;
        first_time[idx] = obs.time_h;
        grid.values[idx] = (obs.value - stats.mean[obs.feature]) / stats.stddev[obs.feature];
        grid.mask[idx] = 1;
    }
    return grid;
}

std::string_view to_string(Gender g) {
    return g == Gender::Male ? "male" : "female";
}

std::optional<Gender> gender_from_string(std::string_view s) {
    std::string v = lower(s);
    if (v == "male" || v == "m") return Gender::Male;
    if (v == "female" || v == "f") return Gender::Female;
    return std::nullopt;
}

} // namespace sepsikit
