#include "sepsikit/textfmt.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace sepsikit::textfmt {

double round3(double v) {
    return std::round(v * 1000.0) / 1000.0;
}

std::string value(double v) {
    double r = round3(v);
    if (r == 0.0) r = 0.0; // normalize -0
    char buf[64];
    if (std::abs(r) < 1e15 && r == std::floor(r)) {
        std::snprintf(buf, sizeof buf, "%.1f", r);
        return buf;
    }
    std::snprintf(buf, sizeof buf, "%.3f", r);
    std::string s = buf;
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.push_back('0');
    return s;
}

std::string rate(double v) {
    if (v == 0.0) return "0";
    return value(v);
}

std::string time_point(double hours) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", hours);
    return buf;
}

std::string score(int s) {
    return std::to_string(s);
}

std::optional<double> parse_number(std::string_view token) {
    if (token.empty()) return std::nullopt;
    double out = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (*first == '+') ++first; // from_chars does not accept a leading '+'
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    if (!std::isfinite(out)) return std::nullopt;
    return out;
}

} // namespace sepsikit::textfmt
