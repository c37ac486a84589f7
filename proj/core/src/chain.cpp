#include "sepsikit/chain.hpp"

#include "sepsikit/errors.hpp"
#include "sepsikit/textfmt.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

namespace sepsikit {

namespace {

// number or the explicit "missing" token
constexpr const char* kValue = R"(((?:[-+]?\d+(?:\.\d+)?)|missing))";
// bare number (conclusions)
constexpr const char* kNumber = R"(([-+]?\d+(?:\.\d+)?))";

std::string pat(std::initializer_list<const char*> parts) {
    std::string out;
    for (const char* p : parts) out += p;
    return out;
}

struct SentencePattern {
    const char* anchor; // cheap literal scanned before the regex runs
    std::regex regex;
};

const SentencePattern& cns_pattern() {
    static const SentencePattern p{
        "the CNS SOFA",
        std::regex(pat({R"(The minimum value of GCS_eye (is|will be) )", kValue,
                        R"(, GCS_motor (?:is|will be) )", kValue,
                        R"( and GCS_verbal (?:is|will be) )", kValue,
                        R"(, this produces the sum )", kValue,
                        R"( and means the CNS SOFA (?:is|will be) )", kNumber}))};
    return p;
}

const SentencePattern& cardio_pattern() {
    static const SentencePattern p{
        "the cardiovascular SOFA",
        std::regex(pat({R"(Because (?:future )?minimum MAP (is|will be) )", kValue,
                        R"(, (?:future )?max Dopamine (?:is|will be) )", kValue,
                        R"(, (?:future )?max Dobutamine (?:is|will be) )", kValue,
                        R"(, (?:future )?max Epinephrine (?:is|will be) )", kValue,
                        R"( and (?:future )?max Norepinephrine (?:is|will be) )", kValue,
                        R"((?: with a patient weight of )", kValue,
                        R"( kg)?, the cardiovascular SOFA (?:is|will be) )", kNumber}))};
    return p;
}

const SentencePattern& resp_pattern() {
    static const SentencePattern p{
        "the respiratory SOFA",
        std::regex(pat({R"(Given that minimum PO2 (is|will be) )", kValue,
                        R"( and minimum FiO2 (?:is|will be) )", kValue,
                        R"( the (?:calculated|forecasted) PAO2FIO2 (?:is|will be) )", kValue,
                        R"(, this means the respiratory SOFA (?:is|will be) )", kNumber}))};
    return p;
}

const SentencePattern& coag_pattern() {
    static const SentencePattern p{
        "the coagulation SOFA",
        std::regex(pat({R"(Because the (?:minimum )?Platelet count (is|will be) )", kValue,
                        R"( the coagulation SOFA (?:is going to be|is|will be) )", kNumber}))};
    return p;
}

const SentencePattern& liver_pattern() {
    static const SentencePattern p{
        "a liver SOFA of",
        std::regex(pat({R"(The maximum Bilirubin \(Total\) (is|will be) )", kValue,
                        R"( leading to a liver SOFA of )", kNumber}))};
    return p;
}

const SentencePattern& renal_pattern() {
    static const SentencePattern p{
        "the renal SOFA",
        std::regex(pat({R"(Because (?:total )?Urine output (is|will be) )", kValue,
                        R"( and maximum creatinine in the blood (?:is|will be) )", kValue,
                        R"( the renal SOFA (?:is|will be) )", kNumber}))};
    return p;
}

const SentencePattern& total_current_pattern() {
    static const SentencePattern p{
        "has a total SOFA score of",
        std::regex(pat({R"(the patient has a total SOFA score of )", kNumber}))};
    return p;
}

const SentencePattern& total_future_pattern() {
    static const SentencePattern p{
        "future total SOFA score of",
        std::regex(pat({R"(the patient will have a future total SOFA score of )", kNumber}))};
    return p;
}

const SentencePattern& verdict_pattern() {
    static const SentencePattern p{
        "develop sepsis",
        std::regex(pat({R"(The patient will (not )?develop sepsis in the next 24 hours, )",
                        R"(because total SOFA increased (?:only )?by )", kNumber,
                        R"( and infection is (not )?suspected)"}))};
    return p;
}

// Scans every occurrence of the anchor literal, regex-matches a bounded
// window around it and reports the sentence that contains that occurrence.
// Each distinct sentence is reported once, in text order.
template <typename Handler>
void scan(std::string_view text, const SentencePattern& pattern, Handler&& handle) {
    const std::string_view anchor = pattern.anchor;
    std::size_t last_match_pos = std::string_view::npos;
    for (std::size_t at = text.find(anchor); at != std::string_view::npos;
         at = text.find(anchor, at + anchor.size())) {
        const std::size_t begin = at > 700 ? at - 700 : 0;
        const std::size_t end = std::min(text.size(), at + anchor.size() + 160);
        using It = std::string_view::const_iterator;
        const It window_begin = text.begin() + static_cast<std::ptrdiff_t>(begin);
        const It window_end = text.begin() + static_cast<std::ptrdiff_t>(end);
        for (std::regex_iterator<It> it(window_begin, window_end, pattern.regex), stop; it != stop;
             ++it) {
            const auto& m = *it;
            const std::size_t pos = begin + static_cast<std::size_t>(m.position(0));
            const std::size_t span_end = pos + static_cast<std::size_t>(m.length(0));
            if (at < pos || at >= span_end) continue; // sentence of a different anchor
            if (pos != last_match_pos) {
                last_match_pos = pos;
                handle(m, pos, begin);
            }
            break;
        }
    }
}

template <typename Match>
void add_premise_m(ChainNode& node, const char* name, const Match& sub) {
    std::string token(sub.first, sub.second);
    if (token == "missing") {
        node.missing_premises.emplace_back(name);
    } else if (auto v = textfmt::parse_number(token)) {
        node.premises.emplace_back(name, *v);
    }
}

template <typename Match>
std::optional<double> number_of(const Match& sub) {
    return textfmt::parse_number(std::string_view(&*sub.first, static_cast<std::size_t>(sub.length())));
}

struct Slot {
    bool taken = false;
};

} // namespace

std::optional<double> ChainNode::premise(std::string_view name) const {
    for (const auto& [key, value] : premises)
        if (key == name) return value;
    return std::nullopt;
}

bool ChainNode::premise_missing(std::string_view name) const {
    return std::find(missing_premises.begin(), missing_premises.end(), name) !=
           missing_premises.end();
}

const ChainNode* InferenceChain::find(NodeKind kind, Tense tense, std::optional<Organ> organ) const {
    for (const ChainNode& node : nodes) {
        if (node.kind != kind) continue;
        if (kind == NodeKind::Diff || kind == NodeKind::Sepsis) return &node;
        if (node.tense != tense) continue;
        if (kind == NodeKind::OrganScore && node.organ != organ) continue;
        return &node;
    }
    return nullptr;
}

InferenceChain parse_chain(std::string_view text) {
    InferenceChain chain;
    chain.raw = std::string(text);

    // first match wins per (kind, tense, organ) slot
    auto slot_taken = [&](NodeKind kind, Tense tense, std::optional<Organ> organ) {
        return chain.find(kind, tense, organ) != nullptr;
    };

    auto organ_handler = [&](Organ organ, std::vector<const char*> premise_names,
                             bool has_weight_group) {
        return [&chain, slot_taken, organ, premise_names = std::move(premise_names),
                has_weight_group](const auto& m, std::size_t pos, std::size_t) {
            const Tense tense =
                std::string_view(&*m[1].first, static_cast<std::size_t>(m[1].length())) == "is"
                    ? Tense::Current
                    : Tense::Future;
            if (slot_taken(NodeKind::OrganScore, tense, organ)) return;
            ChainNode node;
            node.kind = NodeKind::OrganScore;
            node.tense = tense;
            node.organ = organ;
            node.position = pos;
            std::size_t group = 2;
            for (const char* name : premise_names) add_premise_m(node, name, m[group++]);
            if (has_weight_group) {
                if (m[group].matched) add_premise_m(node, "weight", m[group]);
                ++group;
            }
            node.conclusion = number_of(m[group]);
            chain.nodes.push_back(std::move(node));
        };
    };

    scan(text, cns_pattern(),
         organ_handler(Organ::Cns, {"gcs_eye", "gcs_motor", "gcs_verbal", "gcs_sum"}, false));
    scan(text, cardio_pattern(),
         organ_handler(Organ::Cardio,
                       {"map", "dopamine", "dobutamine", "epinephrine", "norepinephrine"}, true));
    scan(text, resp_pattern(), organ_handler(Organ::Resp, {"pao2", "fio2", "pao2_fio2"}, false));
    scan(text, coag_pattern(), organ_handler(Organ::Coag, {"platelets"}, false));
    scan(text, liver_pattern(), organ_handler(Organ::Liver, {"bilirubin"}, false));
    scan(text, renal_pattern(), organ_handler(Organ::Renal, {"urine", "creatinine"}, false));

    auto total_handler = [&](Tense tense) {
        return [&chain, slot_taken, tense](const auto& m, std::size_t pos, std::size_t) {
            if (slot_taken(NodeKind::Total, tense, std::nullopt)) return;
            ChainNode node;
            node.kind = NodeKind::Total;
            node.tense = tense;
            node.position = pos;
            node.conclusion = number_of(m[1]);
            chain.nodes.push_back(std::move(node));
        };
    };
    scan(text, total_current_pattern(), total_handler(Tense::Current));
    scan(text, total_future_pattern(), total_handler(Tense::Future));

    scan(text, verdict_pattern(), [&](const auto& m, std::size_t pos, std::size_t) {
        if (!slot_taken(NodeKind::Diff, Tense::Future, std::nullopt)) {
            ChainNode diff;
            diff.kind = NodeKind::Diff;
            diff.tense = Tense::Future;
            diff.position = pos;
            diff.conclusion = number_of(m[2]);
            chain.nodes.push_back(std::move(diff));
        }
        if (!slot_taken(NodeKind::Sepsis, Tense::Future, std::nullopt)) {
            ChainNode sepsis;
            sepsis.kind = NodeKind::Sepsis;
            sepsis.tense = Tense::Future;
            sepsis.position = pos;
            sepsis.verdict = !m[1].matched;
            sepsis.infection_stated = !m[3].matched;
            if (auto delta = number_of(m[2])) sepsis.premises.emplace_back("delta", *delta);
            chain.nodes.push_back(std::move(sepsis));
        }
    });

    // diff premises: the totals the text states
    if (ChainNode* diff = const_cast<ChainNode*>(chain.find(NodeKind::Diff, Tense::Future))) {
        if (const ChainNode* cur = chain.find(NodeKind::Total, Tense::Current);
            cur && cur->conclusion)
            diff->premises.emplace_back("current_total", *cur->conclusion);
        if (const ChainNode* fut = chain.find(NodeKind::Total, Tense::Future);
            fut && fut->conclusion)
            diff->premises.emplace_back("future_total", *fut->conclusion);
    }

    std::stable_sort(chain.nodes.begin(), chain.nodes.end(),
                     [](const ChainNode& a, const ChainNode& b) { return a.position < b.position; });

    std::size_t found = 0;
    for (Tense tense : {Tense::Current, Tense::Future}) {
        for (Organ organ : kOrgans)
            if (chain.find(NodeKind::OrganScore, tense, organ)) ++found;
        if (chain.find(NodeKind::Total, tense)) ++found;
    }
    if (chain.find(NodeKind::Diff, Tense::Future)) ++found;
    if (chain.find(NodeKind::Sepsis, Tense::Future)) ++found;
    chain.complete = found == 16;
    return chain;
}

bool within_margin(double pred, double truth, double margin) {
    if (!(margin > 0.0 && margin < 1.0))
        throw InputError("within_margin: margin must lie in (0, 1)");
    if (truth == 0.0) return std::abs(pred) <= 1e-9;
    const double ratio = pred / truth;
    return ratio >= 1.0 - margin && ratio <= 1.0 + margin;
}

std::vector<std::string> chain_node_keys() {
    std::vector<std::string> keys;
    for (const char* tense : {"current", "future"}) {
        for (Organ organ : kOrgans)
            keys.push_back(std::string(tense) + "/" + std::string(to_string(organ)));
        keys.push_back(std::string(tense) + "/total");
    }
    keys.emplace_back("diff");
    keys.emplace_back("sepsis");
    return keys;
}

namespace {

std::string node_key(NodeKind kind, Tense tense, std::optional<Organ> organ) {
    switch (kind) {
    case NodeKind::OrganScore:
        return std::string(tense == Tense::Current ? "current/" : "future/") +
               std::string(to_string(*organ));
    case NodeKind::Total:
        return tense == Tense::Current ? "current/total" : "future/total";
    case NodeKind::Diff: return "diff";
    case NodeKind::Sepsis: return "sepsis";
    }
    return "";
}

// Score conclusion vs the expected subscore under the margin rule.
bool conclusion_matches(const ChainNode& node, int expected, double margin) {
    return node.conclusion && within_margin(*node.conclusion, expected, margin);
}

bool derive_organ(const ChainNode& node, const ChainContext& ctx, const SofaConfig& config,
                  double margin) {
    try {
        switch (*node.organ) {
        case Organ::Cns: {
            const auto sum = node.premise("gcs_sum");
            std::optional<double> input;
            if (sum) {
                const auto e = node.premise("gcs_eye");
                const auto m = node.premise("gcs_motor");
                const auto v = node.premise("gcs_verbal");
                if (e && m && v && !within_margin(*sum, *e + *m + *v, margin)) return false;
                input = sum;
            } else if (!node.premise_missing("gcs_sum")) {
                const auto e = node.premise("gcs_eye");
                const auto m = node.premise("gcs_motor");
                const auto v = node.premise("gcs_verbal");
                if (e && m && v) input = textfmt::round3(*e + *m + *v);
                else return false;
            }
            const int expected = input ? score_cns(*input) : 0;
            return conclusion_matches(node, expected, margin);
        }
        case Organ::Cardio: {
            bool stated = false;
            auto slot = [&](const char* name) -> std::optional<double> {
                auto v = node.premise(name);
                if (v || node.premise_missing(name)) stated = true;
                return v;
            };
            const auto map = slot("map");
            const auto dopa = slot("dopamine");
            const auto dobu = slot("dobutamine");
            const auto epi = slot("epinephrine");
            const auto norepi = slot("norepinephrine");
            if (!stated) return false;
            const int expected = score_cardio(map, dopa, dobu, epi, norepi);
            return conclusion_matches(node, expected, margin);
        }
        case Organ::Resp: {
            const auto ratio = node.premise("pao2_fio2");
            const auto pao2 = node.premise("pao2");
            const auto fio2 = node.premise("fio2");
            std::optional<double> input;
            if (ratio) {
                if (pao2 && fio2) {
                    if (!(*fio2 > 0.0)) return false;
                    if (!within_margin(*ratio, horowitz(*pao2, *fio2), margin)) return false;
                }
                input = ratio;
            } else if (!node.premise_missing("pao2_fio2")) {
                if (pao2 && fio2 && *fio2 > 0.0) input = textfmt::round3(horowitz(*pao2, *fio2));
                else return false;
            }
            if (!config.mv_gating)
                return conclusion_matches(node, score_resp(input, false, false), margin);
            const auto mv =
                node.tense == Tense::Current ? ctx.mech_vent_current : ctx.mech_vent_future;
            if (mv) return conclusion_matches(node, score_resp(input, *mv, true), margin);
            // ventilation unknown: accept the conclusion under either state
            return conclusion_matches(node, score_resp(input, false, true), margin) ||
                   conclusion_matches(node, score_resp(input, true, true), margin);
        }
        case Organ::Coag: {
            if (!node.premise("platelets") && !node.premise_missing("platelets")) return false;
            return conclusion_matches(node, score_coag(node.premise("platelets")), margin);
        }
        case Organ::Liver: {
            if (!node.premise("bilirubin") && !node.premise_missing("bilirubin")) return false;
            return conclusion_matches(node, score_liver(node.premise("bilirubin")), margin);
        }
        case Organ::Renal: {
            const bool urine_stated = node.premise("urine") || node.premise_missing("urine");
            const bool creat_stated =
                node.premise("creatinine") || node.premise_missing("creatinine");
            if (!urine_stated && !creat_stated) return false;
            const int expected = score_renal(node.premise("creatinine"), node.premise("urine"));
            return conclusion_matches(node, expected, margin);
        }
        }
    } catch (const InputError&) {
        return false; // stated premises outside the rule's domain
    }
    return false;
}

} // namespace

std::map<std::string, bool> check_derivation(const InferenceChain& chain,
                                             const ChainContext& context, const SofaConfig& config,
                                             double margin) {
    std::map<std::string, bool> result;
    for (const std::string& key : chain_node_keys()) result[key] = false;

    for (Tense tense : {Tense::Current, Tense::Future}) {
        for (Organ organ : kOrgans) {
            const ChainNode* node = chain.find(NodeKind::OrganScore, tense, organ);
            if (!node) continue;
            result[node_key(NodeKind::OrganScore, tense, organ)] =
                derive_organ(*node, context, config, margin);
        }
        const ChainNode* total = chain.find(NodeKind::Total, tense);
        if (total && total->conclusion) {
            double expected = 0.0;
            bool all_present = true;
            for (Organ organ : kOrgans) {
                if (context.excluded && *context.excluded == organ) continue;
                const ChainNode* node = chain.find(NodeKind::OrganScore, tense, organ);
                if (!node || !node->conclusion) {
                    all_present = false;
                    break;
                }
                expected += *node->conclusion;
            }
            if (all_present)
                result[node_key(NodeKind::Total, tense, {})] =
                    within_margin(*total->conclusion, expected, margin);
        }
    }

    if (const ChainNode* diff = chain.find(NodeKind::Diff, Tense::Future)) {
        const auto cur = diff->premise("current_total");
        const auto fut = diff->premise("future_total");
        if (diff->conclusion && cur && fut)
            result["diff"] = within_margin(*diff->conclusion, *fut - *cur, margin);
    }

    if (const ChainNode* sepsis = chain.find(NodeKind::Sepsis, Tense::Future)) {
        const auto delta = sepsis->premise("delta");
        if (sepsis->verdict && delta) {
            const bool infection = context.suspected_infection.value_or(sepsis->infection_stated);
            const bool expected = (*delta >= 2.0) && infection;
            result["sepsis"] = *sepsis->verdict == expected;
        }
    }
    return result;
}

namespace {

std::optional<double> truth_ratio(const WorstValues& w) {
    if (w.pao2_min && w.fio2_min && *w.fio2_min > 0.0)
        return textfmt::round3(horowitz(*w.pao2_min, *w.fio2_min));
    return std::nullopt;
}

void score_value(std::map<std::string, bool>& out, const std::string& key,
                 const std::optional<double>& truth, const std::optional<double>& stated,
                 double margin) {
    if (!truth) return; // nothing to verify against
    out[key] = stated && within_margin(*stated, *truth, margin);
}

} // namespace

std::map<std::string, bool> check_values(const InferenceChain& chain, const WindowLabel& truth,
                                         double margin) {
    std::map<std::string, bool> out;

    struct TenseView {
        const char* prefix;
        Tense tense;
        const SofaSnapshot* snapshot;
    };
    const TenseView views[] = {{"current/", Tense::Current, &truth.current},
                               {"future/", Tense::Future, &truth.future}};

    for (const TenseView& view : views) {
        const WorstValues& w = view.snapshot->inputs;
        const std::string p = view.prefix;
        const ChainNode* cns = chain.find(NodeKind::OrganScore, view.tense, Organ::Cns);
        const ChainNode* cardio = chain.find(NodeKind::OrganScore, view.tense, Organ::Cardio);
        const ChainNode* resp = chain.find(NodeKind::OrganScore, view.tense, Organ::Resp);
        const ChainNode* coag = chain.find(NodeKind::OrganScore, view.tense, Organ::Coag);
        const ChainNode* liver = chain.find(NodeKind::OrganScore, view.tense, Organ::Liver);
        const ChainNode* renal = chain.find(NodeKind::OrganScore, view.tense, Organ::Renal);

        auto stated = [](const ChainNode* node, const char* name) -> std::optional<double> {
            return node ? node->premise(name) : std::nullopt;
        };

        score_value(out, p + "gcs_eye", w.gcs_eye, stated(cns, "gcs_eye"), margin);
        score_value(out, p + "gcs_motor", w.gcs_motor, stated(cns, "gcs_motor"), margin);
        score_value(out, p + "gcs_verbal", w.gcs_verbal, stated(cns, "gcs_verbal"), margin);
        score_value(out, p + "map", w.map_min, stated(cardio, "map"), margin);
        score_value(out, p + "dopamine", w.dopamine_max, stated(cardio, "dopamine"), margin);
        score_value(out, p + "dobutamine", w.dobutamine_max, stated(cardio, "dobutamine"), margin);
        score_value(out, p + "epinephrine", w.epinephrine_max, stated(cardio, "epinephrine"),
                    margin);
        score_value(out, p + "norepinephrine", w.norepinephrine_max,
                    stated(cardio, "norepinephrine"), margin);
        score_value(out, p + "weight", w.weight_kg, stated(cardio, "weight"), margin);
        score_value(out, p + "pao2_fio2", truth_ratio(w), stated(resp, "pao2_fio2"), margin);
        score_value(out, p + "pao2", w.pao2_min, stated(resp, "pao2"), margin);
        score_value(out, p + "fio2", w.fio2_min, stated(resp, "fio2"), margin);
        score_value(out, p + "platelets", w.platelets_min, stated(coag, "platelets"), margin);
        score_value(out, p + "bilirubin", w.bilirubin_max, stated(liver, "bilirubin"), margin);
        score_value(out, p + "urine", w.urine_total, stated(renal, "urine"), margin);
        score_value(out, p + "creatinine", w.creatinine_max, stated(renal, "creatinine"), margin);

        for (Organ organ : kOrgans) {
            const ChainNode* node = chain.find(NodeKind::OrganScore, view.tense, organ);
            const std::optional<double> conclusion =
                node ? node->conclusion : std::optional<double>{};
            score_value(out, p + std::string(to_string(organ)),
                        static_cast<double>(view.snapshot->score(organ)), conclusion, margin);
        }
        const ChainNode* total = chain.find(NodeKind::Total, view.tense);
        score_value(out, p + "total", static_cast<double>(view.snapshot->total),
                    total ? total->conclusion : std::optional<double>{}, margin);
    }

    const ChainNode* diff = chain.find(NodeKind::Diff, Tense::Future);
    score_value(out, "diff", static_cast<double>(truth.verdict.delta),
                diff ? diff->conclusion : std::optional<double>{}, margin);

    const ChainNode* sepsis = chain.find(NodeKind::Sepsis, Tense::Future);
    out["sepsis"] = sepsis && sepsis->verdict && *sepsis->verdict == truth.verdict.septic;
    return out;
}

namespace {

const SentencePattern& pattern_for(NodeKind kind, Tense tense, std::optional<Organ> organ) {
    if (kind == NodeKind::Total)
        return tense == Tense::Current ? total_current_pattern() : total_future_pattern();
    switch (*organ) {
    case Organ::Cns: return cns_pattern();
    case Organ::Cardio: return cardio_pattern();
    case Organ::Resp: return resp_pattern();
    case Organ::Coag: return coag_pattern();
    case Organ::Liver: return liver_pattern();
    case Organ::Renal: return renal_pattern();
    }
    return cns_pattern();
}

} // namespace

std::string forced_prefix(std::string_view gold, NodeKind kind, Tense tense,
                          std::optional<Organ> organ) {
    if (kind == NodeKind::Sepsis)
        throw InputError("forced_prefix: the sepsis verdict is not a valid forced target");

    if (kind == NodeKind::Diff) {
        // premises of the diff node end with the future total
        std::size_t cut = std::string_view::npos;
        scan(gold, total_future_pattern(), [&](const auto& m, std::size_t pos, std::size_t) {
            if (cut == std::string_view::npos)
                cut = pos + static_cast<std::size_t>(m.length(0));
        });
        if (cut == std::string_view::npos)
            throw InputError("forced_prefix: future total sentence absent in gold text");
        return std::string(gold.substr(0, cut));
    }

    if (kind == NodeKind::Total) {
        // everything up to the total sentence, i.e. through the sixth organ
        // sentence of that tense
        std::size_t start = std::string_view::npos;
        scan(gold, pattern_for(kind, tense, {}), [&](const auto&, std::size_t pos, std::size_t) {
            if (start == std::string_view::npos) start = pos;
        });
        if (start == std::string_view::npos)
            throw InputError("forced_prefix: total sentence absent in gold text");
        // the match starts after the sentence opener; cut before it
        const std::size_t opener = gold.rfind("To summarize:", start);
        if (opener != std::string_view::npos && start - opener <= 16) start = opener;
        return std::string(gold.substr(0, start));
    }

    // organ node: cut right after the last premise-value token
    const SentencePattern& pattern = pattern_for(kind, tense, organ);
    std::size_t cut = std::string_view::npos;
    const Tense wanted = tense;
    scan(gold, pattern, [&](const auto& m, std::size_t, std::size_t window_begin) {
        if (cut != std::string_view::npos) return;
        const Tense found =
            std::string_view(&*m[1].first, static_cast<std::size_t>(m[1].length())) == "is"
                ? Tense::Current
                : Tense::Future;
        if (found != wanted) return;
        // last premise group: the one right before the conclusion; for the
        // cardio sentence the optional weight clause may be unmatched
        int group = static_cast<int>(m.size()) - 2;
        while (group >= 1 && !m[group].matched) --group;
        cut = window_begin + static_cast<std::size_t>(m.position(group)) +
              static_cast<std::size_t>(m.length(group));
    });
    if (cut == std::string_view::npos)
        throw InputError("forced_prefix: target sentence absent in gold text");
    return std::string(gold.substr(0, cut));
}

std::string format_forced_target(NodeKind kind, Tense tense, std::optional<Organ> organ) {
    const std::string suffix = tense == Tense::Current ? "_current" : "_future";
    switch (kind) {
    case NodeKind::OrganScore: return std::string(to_string(*organ)) + suffix;
    case NodeKind::Total: return "total" + suffix;
    case NodeKind::Diff: return "diff";
    case NodeKind::Sepsis: return "sepsis";
    }
    return "";
}

std::optional<ForcedTarget> parse_forced_target(std::string_view name) {
    if (name == "diff") return ForcedTarget{NodeKind::Diff, Tense::Future, {}};
    for (Tense tense : {Tense::Current, Tense::Future}) {
        const std::string suffix = tense == Tense::Current ? "_current" : "_future";
        if (name.size() > suffix.size() && name.substr(name.size() - suffix.size()) == suffix) {
            const std::string_view stem = name.substr(0, name.size() - suffix.size());
            if (stem == "total") return ForcedTarget{NodeKind::Total, tense, {}};
            if (auto organ = organ_from_string(stem))
                return ForcedTarget{NodeKind::OrganScore, tense, organ};
        }
    }
    return std::nullopt;
}

std::string forced_target_key(const ForcedTarget& target) {
    return node_key(target.kind, target.tense, target.organ);
}

} // namespace sepsikit
