#pragma once

#include <optional>
#include <string>
#include <string_view>

// Canonical number rendering shared by the verbalizer and the chain parser.
// Clinical values print as "49.0" / "1095.0" when integral and with at most
// three decimals otherwise ("55.333", "0.4"); SOFA scores and totals print as
// bare integers; times print with exactly two decimals.
namespace sepsikit::textfmt {

std::string value(double v);

// The formatter's grid: halves away from zero at the third decimal. Worst
// values are kept at this resolution so re-deriving scores from verbalized
// text can never disagree with the engine at a rule threshold.
double round3(double v);

// Vasopressor rate slot: a zero rate prints as "0", anything else like value().
std::string rate(double v);

std::string time_point(double hours);

std::string score(int s);

// Strict decimal parse of a full token; rejects trailing garbage and
// non-finite results.
std::optional<double> parse_number(std::string_view token);

} // namespace sepsikit::textfmt
