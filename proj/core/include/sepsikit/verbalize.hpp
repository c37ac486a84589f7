#pragma once

#include "sepsikit/ingest.hpp"
#include "sepsikit/sofa.hpp"

#include <span>
#include <string>

namespace sepsikit {

// "DBP at time -22.37: 49.0, SBP at time -22.37: 105.0, ..." sorted by time,
// then feature name.
std::string verbalize_measurements(std::span<const Observation> window,
                                   const FeatureCatalog& catalog = FeatureCatalog::builtin());

// Patient header, measurements and the closing question; the precondition
// sentence is inserted before the infection sentence when present.
std::string verbalize_prompt(const StayWindow& window,
                             const FeatureCatalog& catalog = FeatureCatalog::builtin());

enum class Tense { Current, Future };

// One organ sentence of the inference chain, e.g. "Because the minimum
// Platelet count is 310.0 the coagulation SOFA is 0."
std::string organ_sentence(Organ organ, Tense tense, const SofaSnapshot& snapshot);

std::string total_sentence(Tense tense, int total);

// Five-block gold answer: current scores, future scores, verdict (with the
// organ-failure remark when exactly one included organ rose and the total
// gained >= 2).
std::string verbalize_chain(const SofaSnapshot& current, const SofaSnapshot& future,
                            const SepsisVerdict& verdict);

} // namespace sepsikit
