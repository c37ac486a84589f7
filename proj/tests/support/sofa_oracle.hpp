#pragma once

// Independent brute-force oracle for the six organ step functions: the
// consensus table transcribed as interval rows and scanned from the most
// severe row down. Deliberately a different code shape than the library's
// threshold chains; tests assert exact agreement on dense input grids.

#include <functional>
#include <optional>
#include <vector>

namespace oracle {

struct Interval {
    double lo, hi; // [lo, hi)
    int score;
};

inline int lookup(const std::vector<Interval>& rows, double v, int fallback) {
    for (const Interval& row : rows)
        if (v >= row.lo && v < row.hi) return row.score;
    return fallback;
}

inline int cns(double gcs_sum) {
    static const std::vector<Interval> rows = {
        {3.0, 6.0, 4}, {6.0, 10.0, 3}, {10.0, 13.0, 2}, {13.0, 15.0, 1}, {15.0, 1e18, 0}};
    return lookup(rows, gcs_sum, 0);
}

inline int coag(std::optional<double> platelets) {
    if (!platelets) return 0;
    static const std::vector<Interval> rows = {
        {-1e18, 20.0, 4}, {20.0, 50.0, 3}, {50.0, 100.0, 2}, {100.0, 150.0, 1}, {150.0, 1e18, 0}};
    return lookup(rows, *platelets, 0);
}

inline int liver(std::optional<double> bilirubin) {
    if (!bilirubin) return 0;
    static const std::vector<Interval> rows = {
        {-1e18, 1.2, 0}, {1.2, 2.0, 1}, {2.0, 6.0, 2}, {6.0, 12.0, 3}, {12.0, 1e18, 4}};
    return lookup(rows, *bilirubin, 0);
}

inline int renal(std::optional<double> creatinine, std::optional<double> urine) {
    static const std::vector<Interval> creatinine_rows = {
        {-1e18, 1.2, 0}, {1.2, 2.0, 1}, {2.0, 3.5, 2}, {3.5, 5.0, 3}, {5.0, 1e18, 4}};
    static const std::vector<Interval> urine_rows = {
        {-1e18, 200.0, 4}, {200.0, 500.0, 3}, {500.0, 1e18, 0}};
    const int from_creatinine = creatinine ? lookup(creatinine_rows, *creatinine, 0) : 0;
    const int from_urine = urine ? lookup(urine_rows, *urine, 0) : 0;
    return from_creatinine > from_urine ? from_creatinine : from_urine;
}

inline int resp(std::optional<double> ratio, bool ventilated, bool gating) {
    if (!ratio) return 0;
    struct Row {
        double lo, hi;
        bool needs_vent;
        int score;
    };
    static const std::vector<Row> rows = {{-1e18, 100.0, true, 4},
                                          {-1e18, 200.0, true, 3},
                                          {-1e18, 300.0, false, 2},
                                          {-1e18, 400.0, false, 1}};
    for (const Row& row : rows) {
        if (*ratio < row.lo || *ratio >= row.hi) continue;
        if (row.needs_vent && gating && !ventilated) continue;
        return row.score;
    }
    return 0;
}

inline int cardio(std::optional<double> map, std::optional<double> dopamine,
                  std::optional<double> dobutamine, std::optional<double> epinephrine,
                  std::optional<double> norepinephrine) {
    const auto in = [](std::optional<double> v, double lo, double hi) {
        return v && *v > lo && *v <= hi;
    };
    const auto above = [](std::optional<double> v, double t) { return v && *v > t; };
    // severity ladder, first match wins
    if (above(dopamine, 15.0) || above(epinephrine, 0.1) || above(norepinephrine, 0.1)) return 4;
    if (in(dopamine, 5.0, 15.0) || in(epinephrine, 0.0, 0.1) || in(norepinephrine, 0.0, 0.1))
        return 3;
    if (in(dopamine, 0.0, 5.0) || above(dobutamine, 0.0)) return 2;
    if (map && *map < 70.0) return 1;
    return 0;
}

} // namespace oracle
