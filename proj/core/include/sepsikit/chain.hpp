#pragma once

#include "sepsikit/sofa.hpp"
#include "sepsikit/verbalize.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sepsikit {

enum class NodeKind { OrganScore, Total, Diff, Sepsis };

// One parsed inference step: the values the text states verbatim, never
// corrected. Premises stated as the word "missing" are recorded separately
// from premises that are absent from the text.
struct ChainNode {
    NodeKind kind = NodeKind::OrganScore;
    Tense tense = Tense::Current;
    std::optional<Organ> organ;
    std::vector<std::pair<std::string, double>> premises;
    std::vector<std::string> missing_premises;
    std::optional<double> conclusion;   // subscore / total / delta
    std::optional<bool> verdict;        // sepsis node only
    bool infection_stated = false;      // sepsis node: the sentence's own clause
    std::size_t position = 0;           // offset of the match in the text

    std::optional<double> premise(std::string_view name) const;
    bool premise_missing(std::string_view name) const;
};

struct InferenceChain {
    std::vector<ChainNode> nodes; // ordered by position
    std::string raw;
    bool complete = false; // all 16 expected nodes found

    const ChainNode* find(NodeKind kind, Tense tense = Tense::Current,
                          std::optional<Organ> organ = {}) const;
};

// Keyword-anchored extraction over arbitrary text; never fails. Missing
// sentences simply yield absent nodes; the first match wins per node slot.
InferenceChain parse_chain(std::string_view text);

// 5% ratio interval around the truth; exact (1e-9 absolute) at truth = 0.
bool within_margin(double pred, double truth, double margin = 0.05);

// Prompt-level facts the derivation check may use: the infection flag, the
// exception organ, and whether the patient was ventilated (per tense).
struct ChainContext {
    std::optional<bool> suspected_infection;
    std::optional<Organ> excluded;
    std::optional<bool> mech_vent_current;
    std::optional<bool> mech_vent_future;
};

// Node keys used across derivation and value maps:
// "current/cns" .. "future/renal", "current/total", "future/total",
// "diff", "sepsis".
std::vector<std::string> chain_node_keys();

// Re-applies the rule system to each node's stated premises and compares with
// the stated conclusion (within the margin). Missing node or missing premise
// scores false. Independent of any ground truth.
std::map<std::string, bool> check_derivation(const InferenceChain& chain,
                                             const ChainContext& context = {},
                                             const SofaConfig& config = {}, double margin = 0.05);

// Compares every stated value with its ground-truth counterpart. Only
// variables the truth actually has are scored; a stated "missing" or an
// absent node against an existing truth scores false.
// Keys: clinical variables ("current/map", "future/urine", ...), subscores
// and totals ("current/cns", "future/total", ...), "diff" and "sepsis".
std::map<std::string, bool> check_values(const InferenceChain& chain, const WindowLabel& truth,
                                         double margin = 0.05);

// Gold text truncated right after the last premise-value token of the target
// node and before its conclusion clause. Valid targets: (organ, tense),
// (total, tense) and diff. Throws InputError when the target sentence is
// absent from the gold text.
std::string forced_prefix(std::string_view gold, NodeKind kind, Tense tense,
                          std::optional<Organ> organ = {});

// "cns_current", "total_future", "diff", ... used by the forced-mode file.
std::string format_forced_target(NodeKind kind, Tense tense, std::optional<Organ> organ);
struct ForcedTarget {
    NodeKind kind = NodeKind::Diff;
    Tense tense = Tense::Future;
    std::optional<Organ> organ;
};
std::optional<ForcedTarget> parse_forced_target(std::string_view name);

// Key of the node a forced target scores ("current/cns", "diff", ...).
std::string forced_target_key(const ForcedTarget& target);

} // namespace sepsikit
