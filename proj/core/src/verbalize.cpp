#include "sepsikit/verbalize.hpp"

#include "sepsikit/textfmt.hpp"

#include <algorithm>
#include <sstream>

namespace sepsikit {

namespace {

constexpr std::string_view kMissing = "missing";

std::string opt_value(const std::optional<double>& v) {
    return v ? textfmt::value(*v) : std::string(kMissing);
}

std::string opt_rate(const std::optional<double>& v) {
    return v ? textfmt::rate(*v) : "0";
}

std::string gcs_sum_text(const WorstValues& w) {
    if (w.gcs_eye && w.gcs_motor && w.gcs_verbal)
        return textfmt::value(*w.gcs_eye + *w.gcs_motor + *w.gcs_verbal);
    return std::string(kMissing);
}

std::string ratio_text(const WorstValues& w) {
    if (w.pao2_min && w.fio2_min && *w.fio2_min > 0.0)
        return textfmt::value(horowitz(*w.pao2_min, *w.fio2_min));
    return std::string(kMissing);
}

std::string_view failure_name(Organ o) {
    switch (o) {
    case Organ::Cns: return "central nervous system";
    case Organ::Cardio: return "cardiovascular";
    case Organ::Resp: return "lung";
    case Organ::Coag: return "coagulation";
    case Organ::Liver: return "liver";
    case Organ::Renal: return "kidney";
    }
    return "";
}

} // namespace

std::string verbalize_measurements(std::span<const Observation> window,
                                   const FeatureCatalog& catalog) {
    std::vector<const Observation*> sorted;
    sorted.reserve(window.size());
    for (const Observation& obs : window) sorted.push_back(&obs);
    std::stable_sort(sorted.begin(), sorted.end(), [&](const Observation* a, const Observation* b) {
        if (a->time_h != b->time_h) return a->time_h < b->time_h;
        return catalog.at(a->feature).name < catalog.at(b->feature).name;
    });

    std::string out = "Here are the measurements: ";
    bool first = true;
    for (const Observation* obs : sorted) {
        if (!first) out += ", ";
        first = false;
        out += catalog.at(obs->feature).name;
        out += " at time ";
        out += textfmt::time_point(obs->time_h);
        out += ": ";
        out += textfmt::value(obs->value);
    }
    return out;
}

std::string verbalize_prompt(const StayWindow& window, const FeatureCatalog& catalog) {
    std::ostringstream out;
    out << "Patient is " << textfmt::value(window.demographics.age_years) << " years old and is "
        << (window.demographics.gender ? to_string(*window.demographics.gender) : "of unknown gender")
        << ". Given all the information in this text, answer the question at the end.\n";
    out << verbalize_measurements(window.observation, catalog) << "\n\n";
    out << "Now answer the following question:\n";
    if (window.precondition)
        out << "The patient has an existing precondition given by the ICD-10 code "
            << window.precondition->icd_code << ".\n";
    out << "The doctors " << (window.suspected_infection ? "suspect" : "don't suspect")
        << " an infection, based on this information and the other information in this text, "
           "will the patient be classified as septic tomorrow?";
    return out.str();
}

std::string organ_sentence(Organ organ, Tense tense, const SofaSnapshot& snapshot) {
    const WorstValues& w = snapshot.inputs;
    const bool future = tense == Tense::Future;
    const char* is = future ? "will be" : "is";
    std::ostringstream out;
    switch (organ) {
    case Organ::Cns:
        out << "The minimum value of GCS_eye " << is << ' ' << opt_value(w.gcs_eye) << ", GCS_motor "
            << is << ' ' << opt_value(w.gcs_motor) << " and GCS_verbal " << is << ' '
            << opt_value(w.gcs_verbal) << ", this produces the sum " << gcs_sum_text(w)
            << " and means the CNS SOFA " << is << ' ' << snapshot.cns << '.';
        break;
    case Organ::Cardio: {
        const char* fut = future ? "future " : "";
        out << "Because " << fut << "minimum MAP " << is << ' ' << opt_value(w.map_min) << ", " << fut
            << "max Dopamine " << is << ' ' << opt_rate(w.dopamine_max) << ", " << fut
            << "max Dobutamine " << is << ' ' << opt_rate(w.dobutamine_max) << ", " << fut
            << "max Epinephrine " << is << ' ' << opt_rate(w.epinephrine_max) << " and " << fut
            << "max Norepinephrine " << is << ' ' << opt_rate(w.norepinephrine_max);
        if (w.weight_kg) out << " with a patient weight of " << textfmt::value(*w.weight_kg) << " kg";
        out << ", the cardiovascular SOFA " << is << ' ' << snapshot.cardio << '.';
        break;
    }
    case Organ::Resp:
        out << "Given that minimum PO2 " << is << ' ' << opt_value(w.pao2_min) << " and minimum FiO2 "
            << is << ' ' << opt_value(w.fio2_min) << " the " << (future ? "forecasted" : "calculated")
            << " PAO2FIO2 " << is << ' ' << ratio_text(w) << ", this means the respiratory SOFA " << is
            << ' ' << snapshot.resp << '.';
        break;
    case Organ::Coag:
        if (future)
            out << "Because the Platelet count will be " << opt_value(w.platelets_min)
                << " the coagulation SOFA is going to be " << snapshot.coag << '.';
        else
            out << "Because the minimum Platelet count is " << opt_value(w.platelets_min)
                << " the coagulation SOFA is " << snapshot.coag << '.';
        break;
    case Organ::Liver:
        out << "The maximum Bilirubin (Total) " << is << ' ' << opt_value(w.bilirubin_max)
            << " leading to a liver SOFA of " << snapshot.liver << '.';
        break;
    case Organ::Renal:
        out << "Because " << (future ? "" : "total ") << "Urine output " << is << ' '
            << opt_value(w.urine_total) << " and maximum creatinine in the blood " << is << ' '
            << opt_value(w.creatinine_max) << " the renal SOFA " << is << ' ' << snapshot.renal << '.';
        break;
    }
    return out.str();
}

std::string total_sentence(Tense tense, int total) {
    std::ostringstream out;
    if (tense == Tense::Future)
        out << "To summarize: the patient will have a future total SOFA score of " << total << '.';
    else
        out << "To summarize: the patient has a total SOFA score of " << total << '.';
    return out.str();
}

std::string verbalize_chain(const SofaSnapshot& current, const SofaSnapshot& future,
                            const SepsisVerdict& verdict) {
    std::ostringstream out;
    out << "First we need to calculate the SOFA scores given the extracted values. "
           "The SOFA scores for the current time are the following:\n";
    for (Organ organ : kOrgans) out << organ_sentence(organ, Tense::Current, current) << '\n';
    out << total_sentence(Tense::Current, current.total) << "\n\n";

    out << "Now we need to calculate the SOFA scores with forecasted values. "
           "The SOFA scores in the future based on the forecasted values are the following:\n";
    for (Organ organ : kOrgans) out << organ_sentence(organ, Tense::Future, future) << '\n';
    out << total_sentence(Tense::Future, future.total) << "\n\n";

    // Name the responsible organ when exactly one included subscore rose and
    // the total gained at least 2.
    std::optional<Organ> responsible;
    int risers = 0;
    for (Organ organ : kOrgans) {
        if (current.excluded == organ || future.excluded == organ) continue;
        if (future.score(organ) > current.score(organ)) {
            ++risers;
            responsible = organ;
        }
    }
    if (risers == 1 && verdict.delta >= 2)
        out << "This calculation means that the patient will likely experience a "
            << failure_name(*responsible) << " failure since SOFA increased by " << verdict.delta
            << ".\n";

    out << "The patient will " << (verdict.septic ? "" : "not ")
        << "develop sepsis in the next 24 hours, because total SOFA increased "
        << (verdict.delta < 0 ? "only " : "") << "by " << verdict.delta << " and infection is "
        << (verdict.suspected_infection ? "" : "not ") << "suspected.";
    return out.str();
}

} // namespace sepsikit
